#pragma once

// Scalar context of the rotated problem x = e^{i theta} xi for V = -i x^3.

#include "emm/numeric.hpp"

namespace emm {

/// Rotation angle, trial energy and the constants every coefficient uses.
///
/// c_n = cos(n theta), s_n = sin(n theta). `b` is the real zero of
/// Lambda(xi) = c5 xi^3 + E s2, the point where the fourth-order density
/// equation has singular coefficients.
struct RotationParams {
  Real theta;
  Real energy;
  Real c2, s2, c5, s5;
  Real b;
  int precision_digits = kDefaultDigits;
};

/// Upper end of the open angle window in which the rotated bound state
/// decays at both ends of the real xi line.
Real max_rotation_angle();

/// Validates (theta, E) and fills the derived constants.
///
/// Throws REJECT_ANGLE unless 0 < theta < pi/10, REJECT_ENERGY unless E > 0,
/// and INVALID_ARGUMENT for fewer than 30 digits. Raises the process working
/// precision to `precision_digits` if it is lower.
RotationParams make_params(const Real& theta, const Real& energy, int precision_digits = kDefaultDigits);

/// Lambda(xi) = c5 xi^3 + E s2.
Real eval_lambda(const RotationParams& params, const Real& xi);

/// Upsilon(chi) = c5 (3 b^2 + 3 b chi + chi^2), so that Lambda(chi + b) = chi Upsilon(chi).
Real upsilon_factor(const RotationParams& params, const Real& chi);

}  // namespace emm
