#pragma once

#include <cmath>

#include "vctx/types.hpp"

namespace vctx {

// loss(x) = floor + (scale / x)^exponent, decreasing toward `floor`.
struct PowerLawParams {
  double floor = 0.0;
  double scale = 1.0;     // > 0
  double exponent = 1.0;  // > 0

  void validate() const;
};

// loss(x) = slope * x + intercept.
struct LinearParams {
  double slope = 0.0;
  double intercept = 0.0;

  void validate() const;
};

// loss(tokens, frames) = c_m * tokens^-alpha + c_t * frames^-beta + floor.
struct JointParams {
  double c_m = 1.0;   // > 0
  double alpha = 0.5; // > 0
  double c_t = 1.0;   // > 0
  double beta = 0.5;  // > 0
  double floor = 0.0;

  void validate() const;
};

double eval_power1d(const PowerLawParams& p, double x);
// d loss / dx for the power law.
double power1d_slope(const PowerLawParams& p, double x);

double eval_linear(const LinearParams& p, double x);

double eval_joint(const JointParams& p, double tokens, double frames);

struct JointGradient {
  double d_tokens = 0.0;  // d loss / d tokens
  double d_frames = 0.0;  // d loss / d frames
};

JointGradient grad_joint(const JointParams& p, double tokens, double frames);

}  // namespace vctx
