#include "vctx/scaling_laws.hpp"

#include <cmath>

namespace vctx {

void PowerLawParams::validate() const {
  if (!std::isfinite(floor) || !std::isfinite(scale) || !std::isfinite(exponent)) {
    throw DomainError("power-law parameters must be finite");
  }
  if (scale <= 0.0) throw DomainError("power-law scale must be positive");
  if (exponent <= 0.0) throw DomainError("power-law exponent must be positive");
}

void LinearParams::validate() const {
  if (!std::isfinite(slope) || !std::isfinite(intercept)) {
    throw DomainError("linear parameters must be finite");
  }
}

void JointParams::validate() const {
  if (!std::isfinite(c_m) || !std::isfinite(alpha) || !std::isfinite(c_t) ||
      !std::isfinite(beta) || !std::isfinite(floor)) {
    throw DomainError("joint-law parameters must be finite");
  }
  if (c_m <= 0.0 || c_t <= 0.0) throw DomainError("joint-law coefficients must be positive");
  if (alpha <= 0.0 || beta <= 0.0) throw DomainError("joint-law exponents must be positive");
}

double eval_power1d(const PowerLawParams& p, double x) {
  if (!(x > 0.0)) throw DomainError("power law needs x > 0");
  return p.floor + std::pow(p.scale / x, p.exponent);
}

double power1d_slope(const PowerLawParams& p, double x) {
  if (!(x > 0.0)) throw DomainError("power law needs x > 0");
  return -p.exponent * std::pow(p.scale / x, p.exponent) / x;
}

double eval_linear(const LinearParams& p, double x) {
  return p.slope * x + p.intercept;
}

double eval_joint(const JointParams& p, double tokens, double frames) {
  if (!(tokens > 0.0) || !(frames > 0.0)) {
    throw DomainError("joint law needs tokens > 0 and frames > 0");
  }
  return p.c_m * std::pow(tokens, -p.alpha) + p.c_t * std::pow(frames, -p.beta) + p.floor;
}

JointGradient grad_joint(const JointParams& p, double tokens, double frames) {
  if (!(tokens > 0.0) || !(frames > 0.0)) {
    throw DomainError("joint law needs tokens > 0 and frames > 0");
  }
  return {-p.alpha * p.c_m * std::pow(tokens, -p.alpha - 1.0),
          -p.beta * p.c_t * std::pow(frames, -p.beta - 1.0)};
}

}  // namespace vctx
