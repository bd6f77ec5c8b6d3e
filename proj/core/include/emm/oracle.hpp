#pragma once

// Independent reference: two-sided shooting for the rotated ODE
//   psi'' = Q psi,  Q(xi) = -i e^{5 i theta} xi^3 - E e^{2 i theta},
// in hardware complex arithmetic. Provides E0, the wavefunction on a
// uniform grid, and quadrature moments of S = |psi|^2.

#include <complex>
#include <iosfwd>
#include <vector>

namespace emm {

using Complex = std::complex<double>;

struct OracleOptions {
  double L = 0.0;            // truncation half-width; 0 selects truncation_half_width(theta)
  double h = 1.0 / 256.0;    // grid spacing; L / h must be an even integer
  double rel_tol = 1e-13;    // adaptive integrator tolerances
  double abs_tol = 1e-14;
};

enum class Side { Left = -1, Right = 1 };

/// Half-solution: nodes ordered by increasing xi, from the end inward to 0
/// for the left side and from 0 out to L for the right.
struct HalfSolution {
  Side side = Side::Right;
  std::vector<double> xi;
  std::vector<Complex> psi;
  std::vector<Complex> dpsi;
};

struct WavefunctionGrid {
  double theta = 0;
  Complex energy;
  double L = 0;
  double h = 0;
  std::vector<double> xi;  // -L, -L + h, ..., L
  std::vector<Complex> psi;
  std::vector<Complex> dpsi;
  double edge_ratio = 0;   // max |psi(+-L)| / max |psi|

  std::size_t size() const noexcept { return xi.size(); }
};

/// Largest |psi(+-L)| / max |psi| accepted for quadrature.
inline constexpr double kEdgeDecay = 1e-10;

/// Integer half-width, at least 12, at which the slower WKB tail has decayed
/// by e^-30; grows without bound toward the wedge edge (capped at 40).
double truncation_half_width(double theta);

/// `options` with an automatic L replaced by truncation_half_width(theta).
OracleOptions resolve_options(double theta, const OracleOptions& options);

Complex rotated_q(double theta, Complex energy, double xi);

/// Integrates from +-L toward 0 on the grid nodes of that half, starting
/// from the decaying WKB branch psi'/psi = -+sqrt(Q) - Q'/(4Q).
/// Throws OVERFLOW (naming xi) if the solution leaves the representable range.
HalfSolution integrate_ode(double theta, Complex energy, Side side, const OracleOptions& options = {});

/// psi_R'/psi_R - psi_L'/psi_L at xi = 0: the Wronskian divided by psi_L(0) psi_R(0).
/// Invariant under rescaling either half and analytic in E away from zeros of psi(0).
Complex matching_wronskian(double theta, Complex energy, const OracleOptions& options = {});

struct GroundEnergy {
  Complex energy;
  double residual = 0;  // |W| at the returned energy
  int iterations = 0;
};

/// Newton iteration on complex E from `start`, stopping at |W| < 1e-10.
/// Throws NO_CONVERGENCE, or COMPLEX_ENERGY when |Im E| >= 1e-8.
GroundEnergy find_ground_energy_complex(double theta, const OracleOptions& options = {}, Complex start = {1.1, 0.0});

/// Re E0 after the checks of find_ground_energy_complex.
double find_ground_energy(double theta, const OracleOptions& options = {});

/// Both halves on one grid, the right half rescaled to meet the left at 0,
/// then normalised to unit integral of |psi|^2 with psi(0) real positive.
WavefunctionGrid solve_grid(double theta, Complex energy, const OracleOptions& options = {});

/// (int P - i int x^3 S) / int S; for the unrotated grid only (INVALID_ARGUMENT otherwise).
Complex energy_functional(const WavefunctionGrid& grid);

/// Composite Simpson rule on a uniform grid with an even number of intervals.
double simpson(const std::vector<double>& values, double h);

/// mu_p = int (xi - b)^p |psi|^2 dxi for p = 0..p_max.
/// Throws QUADRATURE_UNCONVERGED if the tails have not decayed to kEdgeDecay
/// or if doubling the step changes any mu_p, p <= 20, by more than 1e-6 relative.
std::vector<double> numeric_moments(const WavefunctionGrid& grid, double b, int p_max);

/// Divides by mu_0 + mu_2 + ... + mu_14 so that the eight even moments sum to one.
std::vector<double> normalize_even_sum(std::vector<double> moments);

void write_grid_csv(std::ostream& out, const WavefunctionGrid& grid);
void write_moments_csv(std::ostream& out, const std::vector<double>& moments);

}  // namespace emm
