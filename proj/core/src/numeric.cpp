#include "emm/numeric.hpp"

#include <boost/math/constants/constants.hpp>

#include <algorithm>
#include <cctype>
#include <iomanip>
#include <mutex>
#include <sstream>

namespace emm {

namespace {

std::mutex g_precision_mutex;

int initial_digits() {
  Real::default_precision(kDefaultDigits);
  return kDefaultDigits;
}

// Boost's own default (50 digits) is too low for P_max = 40 tables.
const int g_initialized_digits = initial_digits();

}  // namespace

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::RejectAngle: return "REJECT_ANGLE";
    case ErrorCode::RejectEnergy: return "REJECT_ENERGY";
    case ErrorCode::PrecisionLoss: return "PRECISION_LOSS";
    case ErrorCode::SingularEvenMap: return "SINGULAR_EVEN_MAP";
    case ErrorCode::IndexRange: return "INDEX_RANGE";
    case ErrorCode::LpNumerical: return "LP_NUMERICAL";
    case ErrorCode::NonMonotone: return "NON_MONOTONE";
    case ErrorCode::Overflow: return "OVERFLOW";
    case ErrorCode::NoConvergence: return "NO_CONVERGENCE";
    case ErrorCode::ComplexEnergy: return "COMPLEX_ENERGY";
    case ErrorCode::QuadratureUnconverged: return "QUADRATURE_UNCONVERGED";
    case ErrorCode::SingularSubgrid: return "SINGULAR_SUBGRID";
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
  }
  return "UNKNOWN";
}

void ensure_working_digits(int digits) {
  (void)g_initialized_digits;
  std::lock_guard lock(g_precision_mutex);
  if (static_cast<int>(Real::default_precision()) < digits) {
    Real::default_precision(static_cast<unsigned>(digits));
  }
}

int working_digits() {
  (void)g_initialized_digits;
  return static_cast<int>(Real::default_precision());
}

Real pi() { return boost::math::constants::pi<Real>(); }

Real parse_real(std::string_view text) {
  std::string s(text);
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
  if (s.empty()) throw Error(ErrorCode::InvalidArgument, "empty numeric value");
  try {
    return Real(s);
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidArgument, "not a number: '" + s + "'");
  }
}

std::string format_fixed(const Real& value, int decimals) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(decimals) << value;
  std::string s = out.str();
  // "-0.000" reads badly in CSV output.
  if (s.starts_with('-') && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

std::string format_sci(const Real& value, int significant) {
  std::ostringstream out;
  out << std::scientific << std::setprecision(std::max(1, significant - 1)) << value;
  return out.str();
}

}  // namespace emm
