#include "vctx/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace vctx {
namespace {

void check_exponents(const JointParams& p) {
  p.validate();
  if (p.alpha >= 1.0) {
    throw DomainError("closed-form split needs alpha < 1 (got alpha = " +
                      std::to_string(p.alpha) + ")");
  }
  if (p.beta >= 1.0) {
    throw DomainError("closed-form split needs beta < 1 (got beta = " +
                      std::to_string(p.beta) + ")");
  }
}

void check_point(double tokens, double frames) {
  if (!(tokens > 0.0) || !(frames > 0.0)) {
    throw DomainError("allocation point needs tokens > 0 and frames > 0");
  }
}

std::vector<std::int64_t> sorted_token_set(const std::vector<std::int64_t>& token_set) {
  if (token_set.empty()) throw DataError("token set is empty");
  std::vector<std::int64_t> sorted = token_set;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (std::int64_t m : sorted) {
    if (m < 1) throw DataError("token set entries must be >= 1");
    const auto root = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(m))));
    if (root * root != m) {
      throw DataError("token set entry " + std::to_string(m) + " is not a perfect square");
    }
  }
  return sorted;
}

bool near(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max({std::abs(a), std::abs(b), 1.0});
}

}  // namespace

void Budget::validate() const {
  if (window < 1) throw DataError("budget window must be >= 1");
}

RealAllocation closed_form_opt(const JointParams& params, Budget budget) {
  check_exponents(params);
  budget.validate();
  // Evaluated in log space so extreme coefficient ratios cannot overflow.
  const double log_r = std::log(params.beta * params.c_t) - std::log(params.alpha * params.c_m);
  const double log_rp = log_r / (1.0 - params.alpha);
  const double log_frames = (1.0 - params.alpha) / (2.0 - params.beta - params.alpha) *
                            (std::log(static_cast<double>(budget.window)) - log_rp);
  const double log_tokens = log_rp + (1.0 - params.beta) / (1.0 - params.alpha) * log_frames;
  return {std::exp(log_frames), std::exp(log_tokens)};
}

double allocation_score(const JointParams& params, double tokens, double frames) {
  check_exponents(params);
  check_point(tokens, frames);
  return params.alpha * params.c_m / (1.0 - params.alpha) * std::pow(tokens, 1.0 - params.alpha) +
         params.beta * params.c_t / (1.0 - params.beta) * std::pow(frames, 1.0 - params.beta);
}

double kkt_check(const JointParams& params, double tokens, double frames) {
  params.validate();
  check_point(tokens, frames);
  const double log_side_m =
      std::log(params.alpha * params.c_m) + (1.0 - params.alpha) * std::log(tokens);
  const double log_side_t =
      std::log(params.beta * params.c_t) + (1.0 - params.beta) * std::log(frames);
  // |s_m - s_t| / max(s_m, s_t) = 1 - exp(-|log s_m - log s_t|)
  return -std::expm1(-std::abs(log_side_m - log_side_t));
}

std::vector<FeasibleConfig> enumerate_feasible(Budget budget,
                                               const std::vector<std::int64_t>& token_set,
                                               std::int64_t max_frames) {
  budget.validate();
  if (max_frames < 1) throw DataError("max_frames must be >= 1");
  std::vector<FeasibleConfig> out;
  for (std::int64_t tokens : sorted_token_set(token_set)) {
    const std::int64_t frame_cap = std::min(max_frames, budget.window / tokens);
    for (std::int64_t frames = 1; frames <= frame_cap; ++frames) {
      out.push_back({frames, tokens, frames * tokens, std::nullopt});
    }
  }
  return out;
}

std::vector<FeasibleConfig> frontier_configs(Budget budget,
                                             const std::vector<std::int64_t>& token_set,
                                             std::int64_t max_frames) {
  budget.validate();
  if (max_frames < 1) throw DataError("max_frames must be >= 1");
  std::vector<FeasibleConfig> out;
  for (std::int64_t tokens : sorted_token_set(token_set)) {
    const std::int64_t frames = std::min(max_frames, budget.window / tokens);
    if (frames < 1) continue;
    // Equal frame counts at a smaller token count are dominated.
    if (!out.empty() && out.back().frames == frames) continue;
    out.push_back({frames, tokens, frames * tokens, std::nullopt});
  }
  return out;
}

FeasibleConfig grid_search_opt(const JointParams& params, Budget budget,
                               const std::vector<std::int64_t>& token_set,
                               std::int64_t max_frames) {
  std::vector<FeasibleConfig> ranked =
      snap_to_feasible(params, 1.0, 1.0, budget, token_set, max_frames);
  return ranked.front();
}

std::vector<FeasibleConfig> snap_to_feasible(const JointParams& params,
                                             double frames_opt, double tokens_opt,
                                             Budget budget,
                                             const std::vector<std::int64_t>& token_set,
                                             std::int64_t max_frames) {
  check_exponents(params);
  check_point(tokens_opt, frames_opt);
  std::vector<FeasibleConfig> configs = frontier_configs(budget, token_set, max_frames);
  if (configs.empty()) throw DataError("no feasible configuration under the budget");

  std::vector<double> scores(configs.size());
  for (std::size_t i = 0; i < configs.size(); ++i) {
    scores[i] = allocation_score(params, static_cast<double>(configs[i].tokens),
                                 static_cast<double>(configs[i].frames));
    configs[i].predicted_loss = eval_joint(params, static_cast<double>(configs[i].tokens),
                                           static_cast<double>(configs[i].frames));
  }

  std::vector<std::size_t> order(configs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (near(scores[a], scores[b])) return configs[a].frames > configs[b].frames;
    return scores[a] < scores[b];
  });

  std::vector<FeasibleConfig> ranked;
  ranked.reserve(configs.size());
  for (std::size_t i : order) ranked.push_back(configs[i]);
  return ranked;
}

AllocationResult allocate(const JointParams& params, Budget budget,
                          const std::vector<std::int64_t>& token_set,
                          std::int64_t max_frames) {
  const RealAllocation opt = closed_form_opt(params, budget);
  AllocationResult result;
  result.t_opt = opt.frames;
  result.m_opt = opt.tokens;
  result.predicted_loss_at_opt = eval_joint(params, opt.tokens, opt.frames);
  result.constraint_active =
      opt.frames * opt.tokens >= static_cast<double>(budget.window) * (1.0 - 1e-9);
  result.snapped =
      snap_to_feasible(params, opt.frames, opt.tokens, budget, token_set, max_frames);
  return result;
}

std::vector<PlanRow> plan(const JointParams& params, const std::vector<std::int64_t>& budgets,
                          const std::vector<std::int64_t>& token_set,
                          std::int64_t max_frames) {
  if (budgets.empty()) throw UsageError("plan needs at least one budget");
  std::vector<PlanRow> rows;
  rows.reserve(budgets.size());
  for (std::int64_t window : budgets) {
    const Budget budget{window};
    const RealAllocation opt = closed_form_opt(params, budget);
    PlanRow row;
    row.budget = window;
    row.exact = opt;
    row.frames = std::llround(opt.frames);
    row.tokens = std::llround(opt.tokens);
    row.predicted_loss = eval_joint(params, opt.tokens, opt.frames);
    row.best_feasible = grid_search_opt(params, budget, token_set, max_frames);
    rows.push_back(row);
  }
  return rows;
}

std::vector<std::int64_t> default_token_set() {
  std::vector<std::int64_t> set;
  for (int p = 1; p <= 27; ++p) {
    const std::int64_t side = (27 + p - 1) / p;
    const std::int64_t tokens = side * side;
    if (set.empty() || set.back() != tokens) set.push_back(tokens);
  }
  return set;  // {729, 196, 81, 49, 36, 25, 16, 9, 4, 1}
}

}  // namespace vctx
