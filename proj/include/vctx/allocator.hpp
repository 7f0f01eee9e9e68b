#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "vctx/scaling_laws.hpp"

namespace vctx {

// Maximum visual context size in tokens.
struct Budget {
  std::int64_t window = 1;

  void validate() const;
};

// An integer (frames, tokens) plan drawn from the realizable token set.
struct FeasibleConfig {
  std::int64_t frames = 0;
  std::int64_t tokens = 0;
  std::int64_t total = 0;  // frames * tokens
  std::optional<double> predicted_loss;  // joint-law value when params known

  bool operator==(const FeasibleConfig&) const = default;
};

struct RealAllocation {
  double frames = 0.0;  // T_opt
  double tokens = 0.0;  // M_opt
};

// Closed-form budget split for the joint law: with r = beta*c_t/(alpha*c_m),
//   frames = (L / r^(1/(1-alpha)))^((1-alpha)/(2-beta-alpha))
//   tokens = r^(1/(1-alpha)) * frames^((1-beta)/(1-alpha))
// The product frames*tokens equals the window exactly. Requires
// alpha < 1 and beta < 1.
RealAllocation closed_form_opt(const JointParams& params, Budget budget);

// Potential whose minimum along the full-budget boundary is the closed-form
// split:
//   J(tokens, frames) = alpha*c_m/(1-alpha) * tokens^(1-alpha)
//                     + beta*c_t/(1-beta)   * frames^(1-beta)
// Scores are comparable between configurations competing for the same
// window; lower is the better split.
double allocation_score(const JointParams& params, double tokens, double frames);

// Relative defect of the allocation stationarity condition
//   alpha*c_m*tokens^(1-alpha) = beta*c_t*frames^(1-beta)
// (equivalently tokens^2 * dL/dtokens = frames^2 * dL/dframes). Zero at the
// closed-form split.
double kkt_check(const JointParams& params, double tokens, double frames);

// Every (frames, tokens) with tokens in token_set, 1 <= frames <= max_frames
// and frames*tokens <= window. Ordered by descending tokens, ascending
// frames.
std::vector<FeasibleConfig> enumerate_feasible(Budget budget,
                                               const std::vector<std::int64_t>& token_set,
                                               std::int64_t max_frames);

// The budget-maximal, non-dominated subset of enumerate_feasible: for each
// token count the largest frame count, minus entries beaten on both axes.
std::vector<FeasibleConfig> frontier_configs(Budget budget,
                                             const std::vector<std::int64_t>& token_set,
                                             std::int64_t max_frames);

// Frontier config with the lowest allocation score (numeric counterpart of
// closed_form_opt). Ties go to the larger frame count.
FeasibleConfig grid_search_opt(const JointParams& params, Budget budget,
                               const std::vector<std::int64_t>& token_set,
                               std::int64_t max_frames);

// Frontier configs ranked best-first by allocation score, each annotated
// with its joint-law predicted loss. Rank 1 equals grid_search_opt.
std::vector<FeasibleConfig> snap_to_feasible(const JointParams& params,
                                             double frames_opt, double tokens_opt,
                                             Budget budget,
                                             const std::vector<std::int64_t>& token_set,
                                             std::int64_t max_frames);

// Closed-form split plus its snapped ranking for one budget.
struct AllocationResult {
  double t_opt = 0.0;
  double m_opt = 0.0;
  double predicted_loss_at_opt = 0.0;
  bool constraint_active = false;
  std::vector<FeasibleConfig> snapped;
};

AllocationResult allocate(const JointParams& params, Budget budget,
                          const std::vector<std::int64_t>& token_set,
                          std::int64_t max_frames);

struct PlanRow {
  std::int64_t budget = 0;
  RealAllocation exact;
  std::int64_t frames = 0;  // round-half-up of exact.frames
  std::int64_t tokens = 0;  // round-half-up of exact.tokens
  double predicted_loss = 0.0;
  FeasibleConfig best_feasible;
};

std::vector<PlanRow> plan(const JointParams& params,
                          const std::vector<std::int64_t>& budgets,
                          const std::vector<std::int64_t>& token_set,
                          std::int64_t max_frames);

// Token counts realizable by pooling a 27x27 grid: {1,4,9,16,25,36,49,81,196,729}.
std::vector<std::int64_t> default_token_set();

inline constexpr std::int64_t kDefaultMaxFrames = 1024;

}  // namespace vctx
