#include "vctx/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Dense>

namespace vctx {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Guard for exp() inside model evaluation: keeps a wild trial step from
// producing inf residuals (the step is then rejected on cost).
double safe_exp(double arg) { return std::exp(std::min(arg, 200.0)); }

struct LMOutcome {
  VectorXd theta;
  double ssr = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
};

// Damped least squares on residuals r(theta) with analytic Jacobian.
// Only accepted steps move theta, so the objective is non-increasing.
template <typename EvalFn>
LMOutcome lm_minimize(const EvalFn& eval, VectorXd theta, int max_iterations,
                      double tolerance) {
  const int n = static_cast<int>(theta.size());
  VectorXd r;
  MatrixXd jac;
  eval(theta, r, &jac);
  double ssr = r.squaredNorm();

  LMOutcome out;
  out.theta = theta;
  out.ssr = ssr;
  if (!std::isfinite(ssr)) return out;
  if (ssr == 0.0) {
    out.converged = true;
    return out;
  }

  double lambda = 1e-3;
  VectorXd r_trial;
  for (int iter = 1; iter <= max_iterations; ++iter) {
    out.iterations = iter;
    MatrixXd normal = jac.transpose() * jac;
    const VectorXd gradient = jac.transpose() * r;
    for (int i = 0; i < n; ++i) {
      normal(i, i) += lambda * std::max(normal(i, i), 1e-12);
    }
    const VectorXd step = normal.ldlt().solve(-gradient);
    if (!step.allFinite()) {
      lambda *= 4.0;
      if (lambda > 1e12) break;
      continue;
    }

    const VectorXd theta_trial = theta + step;
    eval(theta_trial, r_trial, nullptr);
    const double ssr_trial = r_trial.squaredNorm();
    if (std::isfinite(ssr_trial) && ssr_trial < ssr) {
      const double decrease = ssr - ssr_trial;
      theta = theta_trial;
      const bool small_decrease = decrease <= tolerance * std::max(ssr, 1e-300);
      const bool small_step =
          step.lpNorm<Eigen::Infinity>() <=
          tolerance * (1.0 + theta.lpNorm<Eigen::Infinity>());
      ssr = ssr_trial;
      out.theta = theta;
      out.ssr = ssr;
      if (small_decrease || small_step || ssr == 0.0) {
        out.converged = true;
        return out;
      }
      eval(theta, r, &jac);
      lambda = std::max(lambda / 3.0, 1e-12);
    } else {
      // at the floor: even a heavily damped (near-gradient) step of
      // sub-tolerance size cannot improve, so we are done
      if (step.lpNorm<Eigen::Infinity>() <=
          tolerance * (1.0 + theta.lpNorm<Eigen::Infinity>())) {
        out.converged = true;
        return out;
      }
      lambda *= 4.0;
      if (lambda > 1e12) break;  // stalled; report best effort
    }
  }
  return out;
}

double coordinate(FitFamily family, const LossSample& s) {
  return family == FitFamily::kPowerTokens ? static_cast<double>(s.tokens)
                                           : static_cast<double>(s.frames);
}

// Power law in theta = (floor, log scale, log exponent).
struct PowerModel {
  std::vector<double> log_x;
  std::vector<double> y;

  void operator()(const VectorXd& theta, VectorXd& r, MatrixXd* jac) const {
    const int m = static_cast<int>(y.size());
    const double floor = theta[0];
    const double log_scale = theta[1];
    const double exponent = safe_exp(theta[2]);
    r.resize(m);
    if (jac) jac->resize(m, 3);
    for (int i = 0; i < m; ++i) {
      const double shifted = log_scale - log_x[i];
      const double power = safe_exp(exponent * shifted);
      r[i] = floor + power - y[i];
      if (jac) {
        (*jac)(i, 0) = 1.0;
        (*jac)(i, 1) = exponent * power;
        (*jac)(i, 2) = exponent * shifted * power;
      }
    }
  }
};

// Joint law in theta = (log c_m, log alpha, log c_t, log beta, floor).
struct JointModel {
  std::vector<double> log_m;
  std::vector<double> log_t;
  std::vector<double> y;

  void operator()(const VectorXd& theta, VectorXd& r, MatrixXd* jac) const {
    const int m = static_cast<int>(y.size());
    const double c_m = safe_exp(theta[0]);
    const double alpha = safe_exp(theta[1]);
    const double c_t = safe_exp(theta[2]);
    const double beta = safe_exp(theta[3]);
    const double floor = theta[4];
    r.resize(m);
    if (jac) jac->resize(m, 5);
    for (int i = 0; i < m; ++i) {
      const double term_m = c_m * safe_exp(-alpha * log_m[i]);
      const double term_t = c_t * safe_exp(-beta * log_t[i]);
      r[i] = term_m + term_t + floor - y[i];
      if (jac) {
        (*jac)(i, 0) = term_m;
        (*jac)(i, 1) = -alpha * log_m[i] * term_m;
        (*jac)(i, 2) = term_t;
        (*jac)(i, 3) = -beta * log_t[i] * term_t;
        (*jac)(i, 4) = 1.0;
      }
    }
  }
};

LinearParams fit_linear_exact(const std::vector<LossSample>& samples, FitFamily family) {
  double sx = 0.0, sy = 0.0;
  const double n = static_cast<double>(samples.size());
  for (const LossSample& s : samples) {
    sx += coordinate(family, s);
    sy += s.loss;
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (const LossSample& s : samples) {
    const double dx = coordinate(family, s) - mx;
    sxx += dx * dx;
    sxy += dx * (s.loss - my);
  }
  if (sxx == 0.0) return {0.0, my};  // all x equal: flat line through the mean
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

int parameter_count(FitFamily family) {
  switch (family) {
    case FitFamily::kLinearFrames: return 2;
    case FitFamily::kJoint: return 5;
    default: return 3;
  }
}

}  // namespace

const char* fit_family_name(FitFamily family) {
  switch (family) {
    case FitFamily::kPowerTokens: return "power-m";
    case FitFamily::kPowerFrames: return "power-t";
    case FitFamily::kLinearFrames: return "linear-t";
    case FitFamily::kJoint: return "joint";
  }
  return "?";
}

double FitResult::predict(const LossSample& sample) const {
  switch (family) {
    case FitFamily::kPowerTokens:
      return eval_power1d(std::get<PowerLawParams>(params),
                          static_cast<double>(sample.tokens));
    case FitFamily::kPowerFrames:
      return eval_power1d(std::get<PowerLawParams>(params),
                          static_cast<double>(sample.frames));
    case FitFamily::kLinearFrames:
      return eval_linear(std::get<LinearParams>(params),
                         static_cast<double>(sample.frames));
    case FitFamily::kJoint:
      return eval_joint(std::get<JointParams>(params),
                        static_cast<double>(sample.tokens),
                        static_cast<double>(sample.frames));
  }
  throw Error("unknown fit family");
}

FitResult fit(FitFamily family, const std::vector<LossSample>& samples,
              const FitOptions& options) {
  for (const LossSample& s : samples) s.validate();
  if (static_cast<int>(samples.size()) < parameter_count(family)) {
    throw DataError("underdetermined fit: " + std::to_string(samples.size()) +
                    " samples for " + std::to_string(parameter_count(family)) +
                    " parameters");
  }
  if (options.starts < 1) throw UsageError("fit needs at least one start");

  FitResult result;
  result.family = family;

  double y_max = 0.0;
  for (const LossSample& s : samples) y_max = std::max(y_max, s.loss);

  if (family == FitFamily::kLinearFrames) {
    result.params = fit_linear_exact(samples, family);
    result.iterations = 1;
    result.converged = true;
  } else {
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> floor_draw(0.0, y_max);
    std::uniform_real_distribution<double> log_scale_draw(std::log(1e-9), std::log(1e2));
    std::uniform_real_distribution<double> log_exponent_draw(std::log(1e-3), std::log(2.0));
    std::uniform_real_distribution<double> log_coeff_draw(std::log(1e-3), std::log(10.0));

    LMOutcome best;
    bool have_best = false;
    const auto consider = [&best, &have_best](LMOutcome run) {
      if (!have_best || run.ssr < best.ssr) {
        best = std::move(run);
        have_best = true;
      }
    };
    if (family == FitFamily::kJoint) {
      JointModel model;
      for (const LossSample& s : samples) {
        model.log_m.push_back(std::log(static_cast<double>(s.tokens)));
        model.log_t.push_back(std::log(static_cast<double>(s.frames)));
        model.y.push_back(s.loss);
      }
      for (int start = 0; start < options.starts; ++start) {
        VectorXd theta(5);
        theta << log_coeff_draw(rng), log_exponent_draw(rng), log_coeff_draw(rng),
            log_exponent_draw(rng), floor_draw(rng);
        consider(lm_minimize(model, theta, options.max_iterations, options.tolerance));
      }
      result.params = JointParams{safe_exp(best.theta[0]), safe_exp(best.theta[1]),
                                  safe_exp(best.theta[2]), safe_exp(best.theta[3]),
                                  best.theta[4]};
    } else {
      PowerModel model;
      for (const LossSample& s : samples) {
        model.log_x.push_back(std::log(coordinate(family, s)));
        model.y.push_back(s.loss);
      }
      for (int start = 0; start < options.starts; ++start) {
        VectorXd theta(3);
        theta << floor_draw(rng), log_scale_draw(rng), log_exponent_draw(rng);
        consider(lm_minimize(model, theta, options.max_iterations, options.tolerance));
      }
      result.params = PowerLawParams{best.theta[0], std::exp(best.theta[1]),
                                     safe_exp(best.theta[2])};
    }
    result.iterations = best.iterations;
    result.converged = best.converged;
  }

  const LossPredictor predictor = [&result](const LossSample& s) {
    return result.predict(s);
  };
  result.residuals.reserve(samples.size());
  for (const LossSample& s : samples) {
    result.residuals.push_back(predictor(s) - s.loss);
  }
  result.r_squared = r_squared(samples, predictor);
  result.mse = mse(samples, predictor);
  return result;
}

double r_squared(const std::vector<LossSample>& samples, const LossPredictor& predict) {
  if (samples.size() < 2) throw DataError("r_squared needs at least two samples");
  double mean = 0.0;
  for (const LossSample& s : samples) mean += s.loss;
  mean /= static_cast<double>(samples.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (const LossSample& s : samples) {
    const double r = predict(s) - s.loss;
    const double d = s.loss - mean;
    ss_res += r * r;
    ss_tot += d * d;
  }
  if (ss_tot == 0.0) return ss_res == 0.0 ? 1.0 : 0.0;
  return 1.0 - ss_res / ss_tot;
}

double mse(const std::vector<LossSample>& samples, const LossPredictor& predict) {
  if (samples.empty()) throw DataError("mse needs at least one sample");
  double sum = 0.0;
  for (const LossSample& s : samples) {
    const double r = predict(s) - s.loss;
    sum += r * r;
  }
  return sum / static_cast<double>(samples.size());
}

}  // namespace vctx
