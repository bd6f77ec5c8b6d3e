#pragma once

// Chebyshev centre of a polytope {x : g_k . x <= h_k} by linear programming.
//
// The primal  max r  s.t.  g_k . x + |g_k| r <= h_k  (r free) is always
// feasible; when the polytope is bounded its dual
//   min sum_k y_k h_k  s.t.  sum_k y_k g_k = 0,  sum_k y_k |g_k| = 1,  y >= 0
// is feasible too and is solved by a revised simplex (two phases, Dantzig
// pricing with a Bland fallback against cycling). The centre and radius are
// the simplex multipliers. A non-positive optimal radius means the polytope
// has no interior; the positive dual weights are then an infeasibility
// certificate.
//
// Each half-space is one dual column, so adding a constraint keeps the
// current basis feasible and the solver reoptimises from it.

#include "emm/linalg.hpp"
#include "emm/numeric.hpp"

#include <cstddef>
#include <vector>

namespace emm {

struct HalfSpace {
  std::vector<Real> normal;
  Real offset;
};

struct ChebyshevCenter {
  std::vector<Real> center;
  Real radius;
  /// Constraint indices carrying positive dual weight at the optimum.
  std::vector<std::size_t> active;
  std::vector<Real> dual_weights;
  int pivots = 0;
};

struct SimplexOptions {
  /// Entries below this magnitude count as zero; 0 means 10^-(0.8 * working digits).
  Real zero_tolerance = 0;
  int max_pivots = 200000;
};

class ChebyshevSolver {
 public:
  explicit ChebyshevSolver(std::size_t dim, SimplexOptions options = {});

  void add(const HalfSpace& constraint);
  std::size_t size() const noexcept { return costs_.size(); }

  /// Throws LP_NUMERICAL when no certified optimum is reached (pivot limit,
  /// or a dual that is unbounded or infeasible, which happens only for an
  /// unbounded polytope or severe rounding).
  ChebyshevCenter solve();

 private:
  void pivot(std::size_t row, std::size_t col);
  void run(bool phase_one);
  void phase_one();

  std::size_t dim_;
  std::size_t rows_;
  Real tol_;
  int max_pivots_;
  int total_pivots_ = 0;
  bool started_ = false;

  std::vector<std::vector<Real>> raw_;      // a_j = (g_j, |g_j|)
  std::vector<Real> costs_;                 // h_j
  RealMatrix binv_;                         // B^{-1}
  std::vector<Real> rhs_;                   // B^{-1} b
  std::vector<long> basis_;                 // structural index, or -1 - row for an artificial
};

/// One-shot form of ChebyshevSolver.
ChebyshevCenter chebyshev_center(const std::vector<HalfSpace>& constraints, std::size_t dim,
                                 const SimplexOptions& options = {});

}  // namespace emm
