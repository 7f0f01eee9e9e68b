#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "vctx/scaling_laws.hpp"
#include "vctx/types.hpp"

namespace vctx {

// Box-Muller over an explicit 64-bit stream: synthetic data stays
// byte-identical across standard libraries.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * 3.141592653589793238462643383279502884 * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  double uniform01() {  // in (0, 1]
    return (static_cast<double>(rng_() >> 11) + 1.0) * 0x1.0p-53;
  }

  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// A set of (frames, tokens, loss) measurements plus free-form metadata.
struct LossLog {
  std::vector<LossSample> rows;
  std::map<std::string, std::string> metadata;

  bool operator==(const LossLog&) const = default;
};

struct GridPoint {
  std::int64_t frames = 0;
  std::int64_t tokens = 0;
};

// CSV schema: optional "# meta key=value" lines, a "frames,tokens,loss"
// header, one row per sample. '#' lines elsewhere are comments.
LossLog parse_loss_log_csv(std::istream& in, bool allow_duplicates = false);
void write_loss_log_csv(std::ostream& out, const LossLog& log);

// JSON schema: {"version":"1","metadata":{...},"rows":[{frames,tokens,loss}]}.
LossLog parse_loss_log_json(std::istream& in, bool allow_duplicates = false);
void write_loss_log_json(std::ostream& out, const LossLog& log);

// Dispatches on the file extension (.csv or .json).
LossLog load_loss_log(const std::filesystem::path& path, bool allow_duplicates = false);
void save_loss_log(const std::filesystem::path& path, const LossLog& log);

// Joint-law surface values at the given configurations, plus optional
// Gaussian noise from a self-contained seeded generator (reproducible
// across platforms).
LossLog generate_synthetic(const JointParams& params, const std::vector<GridPoint>& configs,
                           double noise_sigma, std::uint64_t seed);

// The experiment grids used throughout the tests and fixtures.
std::vector<GridPoint> token_scaling_grid();  // 9 token counts at 32 frames
std::vector<GridPoint> frame_scaling_grid();  // 7 frame counts at 49 tokens
std::vector<GridPoint> joint_grid25();        // 25-run combined grid

}  // namespace vctx
