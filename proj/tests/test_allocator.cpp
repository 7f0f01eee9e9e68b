#include <doctest.h>

#include <cmath>
#include <random>

#include "vctx/allocator.hpp"

using namespace vctx;

namespace {

const JointParams kJointFit{0.25, 0.26, 0.13, 0.21, 0.50};
const std::vector<std::int64_t> kWindowTokenSet = {36, 49, 81, 196, 729};

}  // namespace

TEST_CASE("closed_form_opt reproduces the reference splits") {
  const RealAllocation at6k = closed_form_opt(kJointFit, {6000});
  CHECK(at6k.frames == doctest::Approx(118.463189527).epsilon(1e-9));
  CHECK(at6k.tokens == doctest::Approx(50.6486447307).epsilon(1e-9));
  CHECK(at6k.frames * at6k.tokens == doctest::Approx(6000.0).epsilon(1e-12));

  const RealAllocation at126k = closed_form_opt(kJointFit, {126000});
  CHECK(at126k.frames == doctest::Approx(516.521232232).epsilon(1e-9));
  CHECK(at126k.tokens == doctest::Approx(243.939633334).epsilon(1e-9));
}

TEST_CASE("closed_form_opt symmetric parameters split the window evenly") {
  const JointParams symmetric{0.2, 0.3, 0.2, 0.3, 0.4};
  for (std::int64_t window : {100, 10000, 123456}) {
    const RealAllocation opt = closed_form_opt(symmetric, {window});
    const double root = std::sqrt(static_cast<double>(window));
    CHECK(opt.frames == doctest::Approx(root).epsilon(1e-12));
    CHECK(opt.tokens == doctest::Approx(root).epsilon(1e-12));
  }
}

TEST_CASE("closed_form_opt rejects degenerate exponents") {
  CHECK_THROWS_AS(closed_form_opt({0.25, 1.0, 0.13, 0.21, 0.5}, {6000}), DomainError);
  CHECK_THROWS_AS(closed_form_opt({0.25, 0.26, 0.13, 1.2, 0.5}, {6000}), DomainError);
  CHECK_THROWS_AS(closed_form_opt(kJointFit, {0}), DataError);
}

TEST_CASE("kkt_check residuals") {
  const RealAllocation opt = closed_form_opt(kJointFit, {6000});
  CHECK(kkt_check(kJointFit, opt.tokens, opt.frames) <= 1e-9);

  const JointParams symmetric{0.2, 0.3, 0.2, 0.3, 0.4};
  CHECK(kkt_check(symmetric, 100.0, 100.0) <= 1e-15);

  CHECK(kkt_check(kJointFit, 729.0, 8.0) == doctest::Approx(0.98347003).epsilon(1e-6));
  CHECK(kkt_check(kJointFit, 729.0, 8.0) > 1e-3);

  CHECK_THROWS_AS(kkt_check(kJointFit, 0.0, 8.0), DomainError);
}

TEST_CASE("kkt stationarity holds at the closed form for random draws") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto log_uniform = [&](double lo, double hi) {
    return std::exp(std::log(lo) + unit(rng) * (std::log(hi) - std::log(lo)));
  };
  for (int rep = 0; rep < 200; ++rep) {
    const JointParams p{log_uniform(1e-3, 10.0), log_uniform(1e-3, 0.95),
                        log_uniform(1e-3, 10.0), log_uniform(1e-3, 0.95), unit(rng)};
    const std::int64_t window =
        static_cast<std::int64_t>(std::llround(log_uniform(10.0, 1e6)));
    const RealAllocation opt = closed_form_opt(p, {window});
    CHECK(kkt_check(p, opt.tokens, opt.frames) <= 1e-9);
    CHECK(std::abs(opt.tokens * opt.frames - static_cast<double>(window)) <=
          1e-9 * static_cast<double>(window));
  }
}

TEST_CASE("allocation_score is minimal on the boundary at the closed form") {
  const RealAllocation opt = closed_form_opt(kJointFit, {5880});
  const double here = allocation_score(kJointFit, opt.tokens, opt.frames);
  for (double shift : {0.9, 0.95, 1.05, 1.1}) {
    const double frames = opt.frames * shift;
    const double tokens = 5880.0 / frames;
    CHECK(allocation_score(kJointFit, tokens, frames) > here);
  }
}

TEST_CASE("enumerate_feasible covers the fixed-window configurations") {
  const std::vector<FeasibleConfig> all = enumerate_feasible({5880}, kWindowTokenSet, 162);
  std::vector<std::pair<std::int64_t, std::int64_t>> big;
  for (const FeasibleConfig& c : all) {
    CHECK(c.total == c.frames * c.tokens);
    CHECK(c.total <= 5880);
    if (c.total >= 5832) big.push_back({c.frames, c.tokens});
  }
  const std::vector<std::pair<std::int64_t, std::int64_t>> expected = {
      {8, 729}, {30, 196}, {72, 81}, {120, 49}, {162, 36}};
  CHECK(big == expected);

  // ordering: descending tokens, ascending frames
  for (std::size_t i = 1; i < all.size(); ++i) {
    const bool same_tokens = all[i].tokens == all[i - 1].tokens;
    CHECK((same_tokens ? all[i].frames > all[i - 1].frames
                       : all[i].tokens < all[i - 1].tokens));
  }

  CHECK(enumerate_feasible({1}, {1}, 1) ==
        std::vector<FeasibleConfig>{{1, 1, 1, std::nullopt}});
  const std::vector<FeasibleConfig> fixed = enumerate_feasible({512}, {16}, 32);
  CHECK(fixed.back().frames == 32);
  CHECK(fixed.back().total == 512);

  CHECK_THROWS_AS(enumerate_feasible({100}, {}, 10), DataError);
  CHECK_THROWS_AS(enumerate_feasible({100}, {10}, 10), DataError);  // not a square
}

TEST_CASE("frontier keeps only budget-maximal, non-dominated configs") {
  const std::vector<FeasibleConfig> frontier = frontier_configs({5880}, kWindowTokenSet, 162);
  REQUIRE(frontier.size() == 5);
  CHECK(frontier[0].frames == 8);
  CHECK(frontier[0].tokens == 729);
  CHECK(frontier[4].frames == 162);
  CHECK(frontier[4].tokens == 36);

  // a loose budget collapses the frontier to the all-maximal corner
  const std::vector<FeasibleConfig> corner = frontier_configs({1000000}, kWindowTokenSet, 162);
  REQUIRE(corner.size() == 1);
  CHECK(corner[0].frames == 162);
  CHECK(corner[0].tokens == 729);
}

TEST_CASE("grid_search_opt picks the fixed-window winner") {
  const FeasibleConfig best = grid_search_opt(kJointFit, {5880}, kWindowTokenSet, 162);
  CHECK(best.frames == 120);
  CHECK(best.tokens == 49);
  CHECK(best.total == 5880);
  CHECK(best.predicted_loss.value() == doctest::Approx(0.6384523774).epsilon(1e-9));
}

TEST_CASE("grid_search_opt breaks exact ties toward more frames") {
  const JointParams symmetric{0.2, 0.3, 0.2, 0.3, 0.4};
  const FeasibleConfig best = grid_search_opt(symmetric, {100}, {4, 25}, 25);
  CHECK(best.frames == 25);
  CHECK(best.tokens == 4);
}

TEST_CASE("snap_to_feasible ranks the frontier by allocation score") {
  const RealAllocation opt = closed_form_opt(kJointFit, {5880});
  const std::vector<FeasibleConfig> ranked =
      snap_to_feasible(kJointFit, opt.frames, opt.tokens, {5880}, kWindowTokenSet, 162);
  REQUIRE(ranked.size() == 5);
  CHECK(ranked[0].frames == 120);
  CHECK(ranked[1].frames == 162);
  CHECK(ranked[2].frames == 72);
  CHECK(ranked[3].frames == 30);
  CHECK(ranked[4].frames == 8);

  // the score order must agree with a direct recomputation
  for (std::size_t i = 1; i < ranked.size(); ++i) {
    CHECK(allocation_score(kJointFit, static_cast<double>(ranked[i - 1].tokens),
                           static_cast<double>(ranked[i - 1].frames)) <=
          allocation_score(kJointFit, static_cast<double>(ranked[i].tokens),
                           static_cast<double>(ranked[i].frames)));
  }

  const std::vector<double> losses = {0.6384523774, 0.6431321383, 0.6327051699,
                                      0.6270227708, 0.6290463015};
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    CHECK(ranked[i].predicted_loss.value() == doctest::Approx(losses[i]).epsilon(1e-9));
  }
}

TEST_CASE("snap_to_feasible: an exactly feasible even split ranks first") {
  const JointParams symmetric{0.2, 0.3, 0.2, 0.3, 0.4};
  const std::vector<FeasibleConfig> ranked =
      snap_to_feasible(symmetric, 16.0, 16.0, {256}, {4, 16, 64}, 64);
  REQUIRE(!ranked.empty());
  CHECK(ranked[0].frames == 16);
  CHECK(ranked[0].tokens == 16);
}

TEST_CASE("allocate bundles the closed form with the snapped ranking") {
  const AllocationResult result = allocate(kJointFit, {5880}, kWindowTokenSet, 162);
  CHECK(result.t_opt == doctest::Approx(117.31129368213).epsilon(1e-9));
  CHECK(result.m_opt == doctest::Approx(50.123051374171).epsilon(1e-9));
  CHECK(result.constraint_active);
  CHECK(result.t_opt * result.m_opt <= 5880.0 * (1.0 + 1e-9));
  REQUIRE(!result.snapped.empty());
  CHECK(result.snapped[0].frames == 120);
  CHECK(result.predicted_loss_at_opt ==
        doctest::Approx(eval_joint(kJointFit, result.m_opt, result.t_opt)).epsilon(1e-12));
}

TEST_CASE("plan emits rounded splits and the best feasible config") {
  const std::vector<PlanRow> rows =
      plan(kJointFit, {6000, 14000, 30000, 62000, 126000}, default_token_set(), 1024);
  REQUIRE(rows.size() == 5);
  const std::int64_t frames[] = {118, 178, 258, 367, 517};
  const std::int64_t tokens[] = {51, 78, 116, 169, 244};
  for (int i = 0; i < 5; ++i) {
    CHECK(rows[i].frames == frames[i]);
    CHECK(rows[i].tokens == tokens[i]);
    CHECK(rows[i].best_feasible.total <= rows[i].budget);
  }

  const std::vector<PlanRow> window = plan(kJointFit, {5880}, kWindowTokenSet, 162);
  CHECK(window[0].best_feasible.frames == 120);
  CHECK(window[0].best_feasible.tokens == 49);

  CHECK_THROWS_AS(plan(kJointFit, {}, default_token_set(), 1024), UsageError);
}

TEST_CASE("plan budget safety for random parameters") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto log_uniform = [&](double lo, double hi) {
    return std::exp(std::log(lo) + unit(rng) * (std::log(hi) - std::log(lo)));
  };
  for (int rep = 0; rep < 100; ++rep) {
    const JointParams p{log_uniform(0.01, 5.0), log_uniform(0.05, 0.9),
                        log_uniform(0.01, 5.0), log_uniform(0.05, 0.9), unit(rng)};
    const std::int64_t window = 40 + static_cast<std::int64_t>(rng() % 100000);
    const std::vector<PlanRow> rows = plan(p, {window}, default_token_set(), 1024);
    CHECK(rows[0].best_feasible.total <= window);
  }
}

TEST_CASE("argmin location is invariant to common scaling of the coefficients") {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    const JointParams base{0.1 + unit(rng), 0.1 + 0.7 * unit(rng), 0.1 + unit(rng),
                           0.1 + 0.7 * unit(rng), unit(rng)};
    const double gamma = 0.2 + 5.0 * unit(rng);
    const JointParams scaled{base.c_m * gamma, base.alpha, base.c_t * gamma, base.beta,
                             base.floor + unit(rng)};
    const RealAllocation a = closed_form_opt(base, {9000});
    const RealAllocation b = closed_form_opt(scaled, {9000});
    CHECK(a.frames == doctest::Approx(b.frames).epsilon(1e-12));
    CHECK(a.tokens == doctest::Approx(b.tokens).epsilon(1e-12));
  }
}

TEST_CASE("default token set lists the pooled 27-grid counts") {
  CHECK(default_token_set() ==
        std::vector<std::int64_t>{729, 196, 81, 49, 36, 25, 16, 9, 4, 1});
}
