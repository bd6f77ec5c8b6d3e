#pragma once

// Moment generation for S(chi) = |Psi|^2 in the translated variable
// chi = xi - b. Hamburger moments mu_p = int chi^p S dchi obey a 13-term
// linear recursion; together with the two closure relations at p = -1, -2
// they are fixed by mu_0..mu_7, and after normalising the first eight even
// moments to sum to one, by seven numbers u_1..u_7 in a simplex.

#include "emm/linalg.hpp"
#include "emm/model.hpp"

#include <array>
#include <iosfwd>
#include <span>
#include <vector>

namespace emm {

/// Multipliers of mu_{p-3} .. mu_{p+9} in the moment equation at index p.
struct RecursionBand {
  static constexpr int kLowOffset = -3;
  static constexpr int kHighOffset = 9;
  static constexpr int kWidth = kHighOffset - kLowOffset + 1;

  int p = 0;
  std::array<Real, kWidth> coeffs;

  /// Coefficient of mu_{p + offset}, offset in [-3, 9].
  const Real& at(int offset) const { return coeffs[static_cast<std::size_t>(offset - kLowOffset)]; }
  Real& at(int offset) { return coeffs[static_cast<std::size_t>(offset - kLowOffset)]; }
};

/// Band at index p >= -2. For p = -1 and p = -2 the entries on negative
/// moment indices are the terms that the closure combination cancels.
RecursionBand recursion_band(const RotationParams& params, int p);

enum class TableStage { MTilde, M, MHat };

std::string_view to_string(TableStage stage);

/// Row p expresses mu_p (MTilde, M) or mu_p in terms of (1, u_1..u_7) (MHat).
struct GeneratorTable {
  TableStage stage = TableStage::MHat;
  int p_max = 0;
  RealMatrix rows;  // (p_max + 1) x {9, 8, 8}

  std::size_t columns() const { return rows.cols(); }
};

/// mu_8 as a combination of mu_0..mu_7.
struct Mu8Constraint {
  std::array<Real, 8> weights;
};

/// Coefficients of the closure relation (p = -1 relation) - (b/2)(p = -2
/// relation) on mu_{-5} .. mu_8. Index k holds the coefficient of mu_{k-5}.
/// Entries 0..4 vanish to working precision: no negative moment survives.
std::array<Real, 14> closure_combination(const RotationParams& params);

/// M~: identity on rows 0..8, further rows from the recursion at p >= 0.
/// Throws PRECISION_LOSS if a row fails its own recursion residual check.
GeneratorTable generate_mtilde(const RotationParams& params, int p_max);

Mu8Constraint mu8_constraint(const RotationParams& params);

/// M: mu_p = sum_{l<8} M_{p,l} mu_l after eliminating mu_8.
GeneratorTable generate_m(const RotationParams& params, int p_max);
GeneratorTable generate_m(const GeneratorTable& mtilde, const Mu8Constraint& mu8);

struct EvenMap {
  RealMatrix forward;  // u_l = sum_v forward(l, v) mu_v, u_l = mu_{2l}
  RealMatrix inverse;  // mu_l = sum_v inverse(l, v) u_v
  Real determinant;
  Real condition;      // 1-norm condition estimate
};

/// Throws SINGULAR_EVEN_MAP when the forward map is numerically singular.
EvenMap build_even_map(const GeneratorTable& m_table);

/// M^: mu_p = M^_{p,0} + sum_{l=1..7} M^_{p,l} u_l.
GeneratorTable generate_mhat(const GeneratorTable& m_table, const EvenMap& even_map);
GeneratorTable generate_mhat(const RotationParams& params, int p_max);

/// Evaluates every moment row of an MHat table at u_hat = (u_1..u_7).
std::vector<Real> moments_from_u(const GeneratorTable& mhat, std::span<const Real> u_hat);

/// Relative residual of the recursion at index p for a moment sequence:
/// |sum_k c_k mu_{p+k}| / max_k |c_k mu_{p+k}|. Negative indices are skipped,
/// so only use p >= 0.
Real recursion_residual(const RecursionBand& band, std::span<const Real> moments);

/// Debug dump: header "p,c0,c1,..." then one full-precision row per moment index.
void write_table_csv(std::ostream& out, const GeneratorTable& table, int significant_digits = 40);

}  // namespace emm
