#pragma once

#include <cstdint>
#include <functional>
#include <variant>
#include <vector>

#include "vctx/scaling_laws.hpp"
#include "vctx/types.hpp"

namespace vctx {

enum class FitFamily {
  kPowerTokens,   // loss vs tokens, power law (frames held constant)
  kPowerFrames,   // loss vs frames, power law (tokens held constant)
  kLinearFrames,  // loss vs frames, straight line
  kJoint,         // loss vs (tokens, frames), two-term power law
};

const char* fit_family_name(FitFamily family);

struct FitOptions {
  int starts = 64;               // multi-start count
  std::uint64_t seed = 1729;     // start sampling seed
  int max_iterations = 10'000;   // per-start iteration cap
  double tolerance = 1e-12;      // relative objective / step tolerance
};

struct FitResult {
  FitFamily family = FitFamily::kJoint;
  std::variant<PowerLawParams, LinearParams, JointParams> params;
  double r_squared = 0.0;
  double mse = 0.0;
  int iterations = 0;    // iterations spent by the winning start
  bool converged = false;
  std::vector<double> residuals;  // predicted - observed, in sample order

  double predict(const LossSample& sample) const;
};

// Least-squares fit of the chosen family. Positive parameters are
// optimized through their logarithms; `starts` random initializations are
// run and the lowest final objective wins (ties keep the earliest start).
FitResult fit(FitFamily family, const std::vector<LossSample>& samples,
              const FitOptions& options = {});

using LossPredictor = std::function<double(const LossSample&)>;

// 1 - SS_res / SS_tot about the sample mean. A zero-variance sample set
// yields 1 for an exact predictor and 0 otherwise.
double r_squared(const std::vector<LossSample>& samples, const LossPredictor& predict);

double mse(const std::vector<LossSample>& samples, const LossPredictor& predict);

}  // namespace vctx
