#pragma once

// Pointwise checks of the density relations on an oracle wavefunction.
//
// For H psi = A psi'' + B psi' + C psi with x = e^{i theta} xi one has
// A = -e^{-2 i theta}, B = 0 and C = V - E, V = -i (e^{i theta} xi)^3.
// Densities: S = |psi|^2, P = |psi'|^2, J = -Im(conj(psi) psi'),
// T = -Im(conj(psi') psi'').

#include "emm/oracle.hpp"

#include <optional>
#include <string>
#include <vector>

namespace emm {

/// Half-width of the centred stencils; fields are valid on
/// [kStencilHalf, size - 1 - kStencilHalf].
inline constexpr std::size_t kStencilHalf = 4;

/// Weights for derivative orders 0..max_order at `offsets` around 0 (Fornberg).
/// Row m holds the weights of the m-th derivative.
std::vector<std::vector<double>> fornberg_weights(const std::vector<double>& offsets, int max_order);

struct DensityFields {
  double theta = 0;
  Complex energy;
  double h = 0;
  std::vector<double> xi;
  std::vector<double> S, P, J, T;
  std::vector<double> S1, S2, S3, S4;  // stencil derivatives of S
  std::vector<double> P1, J1;
  std::vector<double> T_stencil;       // T with psi'' from a stencil on psi'

  std::size_t size() const noexcept { return xi.size(); }
  std::size_t begin_valid() const noexcept { return kStencilHalf; }
  std::size_t end_valid() const noexcept { return size() > 2 * kStencilHalf ? size() - kStencilHalf : 0; }
};

struct ContourCoefficients {
  double theta = 0;
  double energy = 0;
  Complex A;             // constant along the line
  Complex B;             // identically zero for the linear map
  std::vector<Complex> C;
};

/// Builds the fields; psi'' for T comes from the ODE at the grid energy.
DensityFields compute_fields(const WavefunctionGrid& grid);

/// Coefficients on the field nodes at an arbitrary (real) energy.
ContourCoefficients contour_coefficients(const DensityFields& fields, double energy);

struct BilinearResiduals {
  double sigma1 = 0, delta1 = 0, sigma2 = 0, delta2 = 0;
  double max() const;
};

/// Relative sup norms: sup |relation| / sup (largest term), over valid nodes.
BilinearResiduals bilinear_residuals(const DensityFields& fields, const ContourCoefficients& coeffs);

/// The same four quantities built directly as 2 Re and 2 Im of
/// conj(psi) H psi and conj(psi') H psi, node by node, with psi'' = Q psi.
struct BilinearDirect {
  std::vector<double> sigma1, delta1, sigma2, delta2;
};
BilinearDirect bilinear_from_products(const WavefunctionGrid& grid, const ContourCoefficients& coeffs);

/// Same relations evaluated pointwise from the fields (Row k is node k).
BilinearDirect bilinear_from_fields(const DensityFields& fields, const ContourCoefficients& coeffs);

struct SubgridResidual {
  double norm = 0;
  double excision = 0;
  std::size_t nodes_used = 0;
  std::size_t nodes_total = 0;
};

/// J recovered from P', S' and P against the direct J, relative to max |J|
/// on the nodes with |xi - b| > excision. SINGULAR_SUBGRID if fewer than half
/// of the valid nodes survive.
SubgridResidual j_closure_check(const DensityFields& fields, const ContourCoefficients& coeffs, double b,
                                double excision = 0.2);

/// J from the closure formula at one node.
double j_from_closure(double P1, double P, double S1, Complex A, Complex B, Complex C);

/// Relative sup residual of the fourth-order density equation at energy E,
/// excluding |xi - b| <= excision (default 0.1 max(1, |b|)).
SubgridResidual fourth_order_residual(const DensityFields& fields, double theta, double energy,
                                      std::optional<double> excision = std::nullopt);

/// Singular point of the fourth-order equation, in double precision.
double singular_point(double theta, double energy);

struct MomentChainReport {
  double recursion = 0;       // max relative band residual, p = 0..10
  double mtilde_row9 = 0;     // relative mismatch of mu_9 against the MTilde row
  double mu8 = 0;             // relative mismatch of mu_8 against the closure weights
  double reconstruction = 0;  // max relative MHat reconstruction error, p <= 20
};

/// Moment-engine pipeline at `energy` against quadrature moments of the grid
/// density. Needs a rotated grid (theta > 0).
MomentChainReport moment_chain_check(const WavefunctionGrid& grid, double energy, int precision_digits = 100);

struct CheckResult {
  std::string name;
  double norm = 0;
  double threshold = 0;
  bool passed = false;
  std::size_t grid_size = 0;
  double excision = 0;
  std::string detail;  // error text when the check could not be evaluated
};

struct ValidationReport {
  double theta = 0;
  double energy = 0;              // grid energy
  double coefficient_energy = 0;  // energy used in the coefficients
  std::vector<CheckResult> checks;

  bool passed() const;
  /// First failing check, if any.
  const CheckResult* first_failure() const;
};

/// Every residual check at `coefficient_energy` (the grid energy when unset),
/// with the moment chain included when `with_moments` is set.
ValidationReport validate_grid(const WavefunctionGrid& grid, std::optional<double> coefficient_energy = std::nullopt,
                               bool with_moments = true);

struct OracleValidation {
  GroundEnergy ground;
  ValidationReport report;
};

/// Oracle E0 at theta, grid re-shot at E0 (1 + relative_offset), every check
/// at that grid energy. A nonzero offset is the sensitivity probe: the grid
/// is then no eigenfunction and the residuals must grow.
OracleValidation validate_oracle(double theta, double relative_offset = 0, const OracleOptions& options = {});

}  // namespace emm
