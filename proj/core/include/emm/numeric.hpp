#pragma once

// Working arithmetic for the moment method: a runtime-precision MPFR float
// plus the error type shared by every module.

#include <boost/multiprecision/mpfr.hpp>

#include <stdexcept>
#include <string>
#include <string_view>

namespace emm {

using Real = boost::multiprecision::mpfr_float;

/// Decimal digits used when nothing else has been requested.
inline constexpr int kDefaultDigits = 100;

enum class ErrorCode {
  RejectAngle,
  RejectEnergy,
  PrecisionLoss,
  SingularEvenMap,
  IndexRange,
  LpNumerical,
  NonMonotone,
  Overflow,
  NoConvergence,
  ComplexEnergy,
  QuadratureUnconverged,
  SingularSubgrid,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// MPFR default precision is process wide. It is only ever raised, so that a
// table built at 100 digits is never silently continued at fewer. Callers
// that run work on several threads must settle the precision first.
void ensure_working_digits(int digits);
int working_digits();

Real pi();
Real parse_real(std::string_view text);

/// Fixed-point decimal rendering with `decimals` digits after the point.
std::string format_fixed(const Real& value, int decimals);
/// Scientific rendering with `significant` digits, used for full-precision dumps.
std::string format_sci(const Real& value, int significant);

inline double to_double(const Real& value) { return value.convert_to<double>(); }

}  // namespace emm
