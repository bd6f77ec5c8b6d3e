#include "emm/model.hpp"

#include <boost/multiprecision/mpfr.hpp>

namespace emm {

Real max_rotation_angle() { return pi() / 10; }

RotationParams make_params(const Real& theta, const Real& energy, int precision_digits) {
  if (precision_digits < 30) {
    throw Error(ErrorCode::InvalidArgument,
                "precision_digits must be at least 30, got " + std::to_string(precision_digits));
  }
  ensure_working_digits(precision_digits);

  const Real limit = max_rotation_angle();
  if (!(theta > 0) || !(theta < limit)) {
    throw Error(ErrorCode::RejectAngle,
                "theta = " + format_sci(theta, 17) + " outside the open window (0, pi/10)");
  }
  if (!(energy > 0)) {
    throw Error(ErrorCode::RejectEnergy, "trial energy must be positive, got " + format_sci(energy, 17));
  }

  RotationParams p;
  p.precision_digits = precision_digits;
  // Re-round the inputs at the working precision so every derived quantity
  // carries it, whatever precision the caller's values were built with.
  p.theta = Real(theta, static_cast<unsigned>(working_digits()));
  p.energy = Real(energy, static_cast<unsigned>(working_digits()));
  p.c2 = cos(2 * p.theta);
  p.s2 = sin(2 * p.theta);
  p.c5 = cos(5 * p.theta);
  p.s5 = sin(5 * p.theta);
  p.b = -cbrt(p.energy * p.s2 / p.c5);
  return p;
}

Real eval_lambda(const RotationParams& params, const Real& xi) {
  return params.c5 * xi * xi * xi + params.energy * params.s2;
}

Real upsilon_factor(const RotationParams& params, const Real& chi) {
  const Real& b = params.b;
  return params.c5 * (3 * b * b + 3 * b * chi + chi * chi);
}

}  // namespace emm
