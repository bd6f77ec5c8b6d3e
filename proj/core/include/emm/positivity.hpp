#pragma once

// Hankel positivity test for a trial energy: a nonnegative density on the
// real line has H_ij = mu_{i+j} positive semidefinite, and with the moments
// affine in u_hat every violated quadratic form a^T H a >= 0 becomes a linear
// cut in u_hat. Cutting-plane LP either finds a u_hat where H passes the
// eigenvalue test or empties the polytope.

#include "emm/linalg.hpp"
#include "emm/moment_engine.hpp"
#include "emm/simplex.hpp"

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace emm {

struct HankelMatrix {
  int order = 0;   // H is (order+1) x (order+1)
  RealMatrix h;
};

/// H_ij = mu_{i+j}, 0 <= i, j <= n. Throws INDEX_RANGE if 2n >= moments.size().
HankelMatrix assemble_hankel(std::span<const Real> moments, int n);

/// a^T H(u) a = constant + sum_l weights[l-1] u_l; valid means >= 0.
struct Cut {
  std::vector<Real> direction;
  Real constant;
  std::array<Real, 7> weights;

  Real evaluate(std::span<const Real> u_hat) const;
};

/// Linearises the quadratic form along `direction` (normalised here).
Cut make_cut(std::span<const Real> direction, const GeneratorTable& mhat, int n);

struct EigenDirection {
  Real lambda_min;
  std::vector<Real> direction;  // unit norm
};

/// Smallest eigenpair by Jacobi rotations at working precision.
EigenDirection min_eigen_direction(const HankelMatrix& hankel);

struct LpPoint {
  bool feasible = false;
  std::vector<Real> u_hat;  // Chebyshev centre, size 7
  Real radius;
  std::vector<std::size_t> certificate;  // cut indices with positive dual weight when infeasible
  int pivots = 0;
};

/// Deepest point of {0 <= u_l, sum u_l <= 1} intersected with every cut.
/// The box constraints are always added here. A radius at or below
/// `empty_radius` (default 10^-(working digits / 2)) reports INFEASIBLE.
LpPoint lp_feasible_point(const std::vector<Cut>& cuts, const Real& empty_radius = Real(0));

enum class Feasibility { Feasible, Infeasible };

std::string_view to_string(Feasibility f);

struct FeasibilityOptions {
  int cut_budget = 200;          // cutting-plane rounds, one LP solve each
  Real eps_psd = Real("1e-30");  // accepted lambda_min of the unit-diagonal Hankel, times its trace
  int cuts_per_round = 4;        // negative eigen-directions turned into cuts per round
  std::ostream* trace = nullptr; // "iter lambda_min radius cuts" lines when set
};

struct FeasibilityVerdict {
  Feasibility status = Feasibility::Feasible;
  int iterations = 0;
  int cuts = 0;
  bool budget_exhausted = false;
  std::vector<Real> witness;             // u_hat when FEASIBLE
  Real lambda_min;                       // at the last tested point
  std::vector<std::size_t> certificate;  // indices into the final cut list when INFEASIBLE
};

/// Cutting-plane feasibility with Hankel order n (n = P_max / 2).
/// Seeds the cut set with the n+1 coordinate directions (mu_{2k} >= 0).
/// When the budget runs out the verdict is FEASIBLE with budget_exhausted set.
FeasibilityVerdict emm_feasible(const GeneratorTable& mhat, int n, const FeasibilityOptions& options = {});

/// Convenience: build the MHat table at (theta, E) and run emm_feasible with n = p_max / 2.
FeasibilityVerdict emm_feasible(const RotationParams& params, int p_max, const FeasibilityOptions& options = {});

}  // namespace emm
