#include "emm/simplex.hpp"

#include <boost/multiprecision/mpfr.hpp>

#include <limits>
#include <string>

namespace emm {

namespace {

constexpr int kDegenerateBeforeBland = 25;

}  // namespace

ChebyshevSolver::ChebyshevSolver(std::size_t dim, SimplexOptions options)
    : dim_(dim), rows_(dim + 1), tol_(std::move(options.zero_tolerance)), max_pivots_(options.max_pivots) {
  if (dim == 0) throw Error(ErrorCode::InvalidArgument, "ChebyshevSolver: zero dimension");
  if (tol_ == 0) tol_ = pow(Real(10), -(working_digits() * 4) / 5);
}

void ChebyshevSolver::add(const HalfSpace& constraint) {
  if (constraint.normal.size() != dim_) throw Error(ErrorCode::InvalidArgument, "ChebyshevSolver: normal size mismatch");
  std::vector<Real> column(rows_);
  Real norm2 = 0;
  for (std::size_t i = 0; i < dim_; ++i) {
    column[i] = constraint.normal[i];
    norm2 += constraint.normal[i] * constraint.normal[i];
  }
  if (norm2 == 0) throw Error(ErrorCode::InvalidArgument, "ChebyshevSolver: zero normal");
  column[dim_] = sqrt(norm2);
  raw_.push_back(std::move(column));
  costs_.push_back(constraint.offset);
}

void ChebyshevSolver::pivot(std::size_t row, std::size_t col) {
  std::vector<Real> w(rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    Real acc = 0;
    for (std::size_t k = 0; k < rows_; ++k) acc += binv_(i, k) * raw_[col][k];
    w[i] = std::move(acc);
  }
  const Real inv = 1 / w[row];
  for (std::size_t k = 0; k < rows_; ++k) binv_(row, k) *= inv;
  rhs_[row] *= inv;
  for (std::size_t i = 0; i < rows_; ++i) {
    if (i == row || w[i] == 0) continue;
    const Real& f = w[i];
    for (std::size_t k = 0; k < rows_; ++k) binv_(i, k) -= f * binv_(row, k);
    rhs_[i] -= f * rhs_[row];
  }
  basis_[row] = static_cast<long>(col);
  if (++total_pivots_ > max_pivots_) {
    throw Error(ErrorCode::LpNumerical, "simplex pivot limit " + std::to_string(max_pivots_) + " reached");
  }
}

// Revised simplex on  min c.y, A y = b, y >= 0  with an explicit B^{-1}.
void ChebyshevSolver::run(bool phase_one) {
  const std::size_t m = raw_.size();
  std::vector<char> basic(m, 0);
  for (long b : basis_) {
    if (b >= 0) basic[static_cast<std::size_t>(b)] = 1;
  }
  auto basic_cost = [&](std::size_t i) -> Real {
    const long b = basis_[i];
    if (b < 0) return phase_one ? Real(1) : Real(0);
    return phase_one ? Real(0) : costs_[static_cast<std::size_t>(b)];
  };

  int degenerate_run = 0;
  std::vector<Real> pi(rows_);
  std::vector<Real> w(rows_);
  for (;;) {
    for (std::size_t k = 0; k < rows_; ++k) pi[k] = 0;
    for (std::size_t i = 0; i < rows_; ++i) {
      const Real cb = basic_cost(i);
      if (cb == 0) continue;
      for (std::size_t k = 0; k < rows_; ++k) pi[k] += cb * binv_(i, k);
    }

    const bool bland = degenerate_run >= kDegenerateBeforeBland;
    std::size_t entering = std::numeric_limits<std::size_t>::max();
    Real best = -tol_;
    for (std::size_t j = 0; j < m; ++j) {
      if (basic[j]) continue;
      Real d = phase_one ? Real(0) : costs_[j];
      for (std::size_t k = 0; k < rows_; ++k) d -= pi[k] * raw_[j][k];
      if (d < best) {
        entering = j;
        if (bland) break;
        best = d;
      }
    }
    if (entering == std::numeric_limits<std::size_t>::max()) return;

    for (std::size_t i = 0; i < rows_; ++i) {
      Real acc = 0;
      for (std::size_t k = 0; k < rows_; ++k) acc += binv_(i, k) * raw_[entering][k];
      w[i] = std::move(acc);
    }
    std::size_t leaving = std::numeric_limits<std::size_t>::max();
    Real best_ratio;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (w[i] <= tol_) continue;
      Real ratio = rhs_[i] / w[i];
      bool take = leaving == std::numeric_limits<std::size_t>::max() || ratio < best_ratio;
      if (!take && ratio == best_ratio) {
        take = bland ? basis_[i] < basis_[leaving] : w[i] > w[leaving];
      }
      if (take) {
        leaving = i;
        best_ratio = std::move(ratio);
      }
    }
    if (leaving == std::numeric_limits<std::size_t>::max()) {
      throw Error(ErrorCode::LpNumerical, "Chebyshev dual unbounded: polytope judged empty by rounding");
    }
    degenerate_run = best_ratio <= tol_ ? degenerate_run + 1 : 0;
    const long out = basis_[leaving];
    if (out >= 0) basic[static_cast<std::size_t>(out)] = 0;
    basic[entering] = 1;
    pivot(leaving, entering);
  }
}

void ChebyshevSolver::phase_one() {
  binv_ = RealMatrix::identity(rows_);
  rhs_.assign(rows_, Real(0));
  rhs_[dim_] = 1;
  basis_.resize(rows_);
  for (std::size_t i = 0; i < rows_; ++i) basis_[i] = -1 - static_cast<long>(i);
  run(/*phase_one=*/true);

  Real infeasibility = 0;
  for (std::size_t i = 0; i < rows_; ++i) {
    if (basis_[i] < 0) infeasibility += abs(rhs_[i]);
  }
  if (infeasibility > tol_ * 1000) {
    throw Error(ErrorCode::LpNumerical,
                "Chebyshev dual infeasible (polytope unbounded?) residual " + format_sci(infeasibility, 6));
  }
  // Artificials left at zero level are pivoted out where possible.
  for (std::size_t r = 0; r < rows_; ++r) {
    if (basis_[r] >= 0) continue;
    for (std::size_t j = 0; j < raw_.size(); ++j) {
      bool basic = false;
      for (long b : basis_) basic = basic || b == static_cast<long>(j);
      if (basic) continue;
      Real wr = 0;
      for (std::size_t k = 0; k < rows_; ++k) wr += binv_(r, k) * raw_[j][k];
      if (abs(wr) > tol_) {
        pivot(r, j);
        break;
      }
    }
  }
}

ChebyshevCenter ChebyshevSolver::solve() {
  if (raw_.empty()) throw Error(ErrorCode::LpNumerical, "chebyshev_center: no constraints, polytope unbounded");
  const int start = total_pivots_;
  if (!started_) {
    phase_one();
    started_ = true;
  }
  run(/*phase_one=*/false);

  ChebyshevCenter out;
  std::vector<Real> pi(rows_, Real(0));
  out.radius = 0;
  out.dual_weights.assign(raw_.size(), Real(0));
  for (std::size_t i = 0; i < rows_; ++i) {
    const long b = basis_[i];
    if (b < 0) continue;
    const Real& cb = costs_[static_cast<std::size_t>(b)];
    out.dual_weights[static_cast<std::size_t>(b)] = rhs_[i];
    out.radius += cb * rhs_[i];
    for (std::size_t k = 0; k < rows_; ++k) pi[k] += cb * binv_(i, k);
  }
  out.center.assign(pi.begin(), pi.begin() + static_cast<std::ptrdiff_t>(dim_));
  for (std::size_t k = 0; k < raw_.size(); ++k) {
    if (out.dual_weights[k] > tol_) out.active.push_back(k);
  }
  out.pivots = total_pivots_ - start;
  return out;
}

ChebyshevCenter chebyshev_center(const std::vector<HalfSpace>& constraints, std::size_t dim,
                                 const SimplexOptions& options) {
  ChebyshevSolver solver(dim, options);
  for (const HalfSpace& hs : constraints) solver.add(hs);
  return solver.solve();
}

}  // namespace emm
