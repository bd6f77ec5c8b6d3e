#include "emm/positivity.hpp"

#include <boost/multiprecision/mpfr.hpp>

#include <ostream>
#include <string>

namespace emm {

namespace {

Real jacobi_tolerance() { return pow(Real(10), -(working_digits() * 3) / 5); }

// Normalised so the largest coefficient has unit magnitude; the cut
// c0 + c.u >= 0 becomes the half-space (-c).u <= c0.
HalfSpace to_half_space(const Cut& cut) {
  Real scale = abs(cut.constant);
  for (const Real& w : cut.weights) {
    if (abs(w) > scale) scale = abs(w);
  }
  HalfSpace hs;
  hs.normal.resize(7);
  if (scale == 0) scale = 1;
  for (std::size_t l = 0; l < 7; ++l) hs.normal[l] = -cut.weights[l] / scale;
  hs.offset = cut.constant / scale;
  return hs;
}

std::vector<Real> unit_vector(std::size_t size, std::size_t k) {
  std::vector<Real> v(size, Real(0));
  v[k] = 1;
  return v;
}

std::vector<HalfSpace> base_constraints() {
  std::vector<HalfSpace> out;
  out.reserve(8);
  for (std::size_t l = 0; l < 7; ++l) {
    HalfSpace hs;
    hs.normal.assign(7, Real(0));
    hs.normal[l] = -1;
    hs.offset = 0;
    out.push_back(std::move(hs));
  }
  HalfSpace simplex_face;
  simplex_face.normal.assign(7, Real(1));
  simplex_face.offset = 1;
  out.push_back(std::move(simplex_face));
  return out;
}

LpPoint to_lp_point(const ChebyshevCenter& cc, const Real& empty_radius) {
  const Real threshold = empty_radius > 0 ? empty_radius : pow(Real(10), -working_digits() / 2);
  LpPoint out;
  out.radius = cc.radius;
  out.pivots = cc.pivots;
  out.u_hat = cc.center;
  out.feasible = cc.radius > threshold;
  if (!out.feasible) {
    for (std::size_t k : cc.active) {
      if (k >= 8) out.certificate.push_back(k - 8);
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(Feasibility f) {
  return f == Feasibility::Feasible ? "FEASIBLE" : "INFEASIBLE";
}

HankelMatrix assemble_hankel(std::span<const Real> moments, int n) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "Hankel order must be >= 0");
  if (static_cast<std::size_t>(2 * n) >= moments.size()) {
    throw Error(ErrorCode::IndexRange, "Hankel order " + std::to_string(n) + " needs moments through " +
                                           std::to_string(2 * n) + ", have " + std::to_string(moments.size()));
  }
  HankelMatrix h;
  h.order = n;
  const auto dim = static_cast<std::size_t>(n) + 1;
  h.h = RealMatrix(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) h.h(i, j) = moments[i + j];
  }
  return h;
}

Real Cut::evaluate(std::span<const Real> u_hat) const {
  Real v = constant;
  for (std::size_t l = 0; l < 7; ++l) v += weights[l] * u_hat[l];
  return v;
}

Cut make_cut(std::span<const Real> direction, const GeneratorTable& mhat, int n) {
  if (mhat.stage != TableStage::MHat) throw Error(ErrorCode::InvalidArgument, "make_cut expects an MHat table");
  const auto dim = static_cast<std::size_t>(n) + 1;
  if (direction.size() != dim) throw Error(ErrorCode::InvalidArgument, "cut direction has wrong length");
  if (mhat.p_max < 2 * n) throw Error(ErrorCode::IndexRange, "MHat table too short for Hankel order");

  Real norm2 = 0;
  for (const Real& x : direction) norm2 += x * x;
  if (norm2 == 0) throw Error(ErrorCode::InvalidArgument, "zero cut direction");
  const Real inv_norm = 1 / sqrt(norm2);

  Cut cut;
  cut.direction.reserve(dim);
  for (const Real& x : direction) cut.direction.push_back(x * inv_norm);

  // a^T H a = sum_s q_s mu_s with q_s = sum_{i+j=s} a_i a_j
  std::vector<Real> q(2 * dim - 1, Real(0));
  for (std::size_t i = 0; i < dim; ++i) {
    if (cut.direction[i] == 0) continue;
    for (std::size_t j = 0; j < dim; ++j) q[i + j] += cut.direction[i] * cut.direction[j];
  }
  cut.constant = 0;
  for (auto& w : cut.weights) w = 0;
  for (std::size_t s = 0; s < q.size(); ++s) {
    if (q[s] == 0) continue;
    const auto row = mhat.rows.row(s);
    cut.constant += q[s] * row[0];
    for (std::size_t l = 1; l < 8; ++l) cut.weights[l - 1] += q[s] * row[l];
  }
  return cut;
}

EigenDirection min_eigen_direction(const HankelMatrix& hankel) {
  const SymmetricEigen<Real> eig = symmetric_eigen(hankel.h, jacobi_tolerance());
  EigenDirection out;
  out.lambda_min = eig.values.front();
  const std::size_t dim = hankel.h.rows();
  out.direction.resize(dim);
  Real norm2 = 0;
  for (std::size_t i = 0; i < dim; ++i) {
    out.direction[i] = eig.vectors(i, 0);
    norm2 += out.direction[i] * out.direction[i];
  }
  const Real inv = 1 / sqrt(norm2);
  for (Real& x : out.direction) x *= inv;
  return out;
}

LpPoint lp_feasible_point(const std::vector<Cut>& cuts, const Real& empty_radius) {
  std::vector<HalfSpace> constraints = base_constraints();
  for (const Cut& c : cuts) constraints.push_back(to_half_space(c));
  return to_lp_point(chebyshev_center(constraints, 7), empty_radius);
}

FeasibilityVerdict emm_feasible(const GeneratorTable& mhat, int n, const FeasibilityOptions& options) {
  if (options.cut_budget < 1) throw Error(ErrorCode::InvalidArgument, "cut_budget must be >= 1");
  if (mhat.p_max < 2 * n) throw Error(ErrorCode::IndexRange, "MHat table too short for Hankel order");
  const auto dim = static_cast<std::size_t>(n) + 1;

  std::vector<Cut> cuts;
  cuts.reserve(dim + static_cast<std::size_t>(options.cut_budget * options.cuts_per_round));
  for (std::size_t k = 0; k < dim; ++k) cuts.push_back(make_cut(unit_vector(dim, k), mhat, n));

  const Real accept = -options.eps_psd * Real(static_cast<int>(dim));

  // One solver for the whole run: each round only appends columns.
  ChebyshevSolver solver(7);
  for (const HalfSpace& hs : base_constraints()) solver.add(hs);
  std::size_t submitted = 0;

  FeasibilityVerdict verdict;
  for (int iter = 1; iter <= options.cut_budget; ++iter) {
    verdict.iterations = iter;
    for (; submitted < cuts.size(); ++submitted) solver.add(to_half_space(cuts[submitted]));
    const LpPoint point = to_lp_point(solver.solve(), Real(0));
    if (!point.feasible) {
      verdict.status = Feasibility::Infeasible;
      verdict.certificate = point.certificate;
      verdict.cuts = static_cast<int>(cuts.size());
      if (options.trace) *options.trace << iter << " - " << format_sci(point.radius, 6) << ' ' << cuts.size() << '\n';
      return verdict;
    }

    const std::vector<Real> mu = moments_from_u(mhat, point.u_hat);
    // Congruence with D = diag(mu_{2i}^{-1/2}) gives a unit diagonal; PSD is
    // unchanged and the eigen-test becomes scale free.
    std::vector<Real> scale(dim);
    bool diagonal_ok = true;
    for (std::size_t i = 0; i < dim; ++i) {
      const Real& d = mu[2 * i];
      if (!(d > 0)) {
        diagonal_ok = false;
        break;
      }
      scale[i] = 1 / sqrt(d);
    }
    if (!diagonal_ok) {
      // Only reachable through rounding at the polytope boundary.
      throw Error(ErrorCode::LpNumerical, "LP centre has a non-positive even moment");
    }
    RealMatrix scaled(dim, dim);
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t j = 0; j < dim; ++j) scaled(i, j) = mu[i + j] * scale[i] * scale[j];
    }
    const SymmetricEigen<Real> eig = symmetric_eigen_ql(scaled);
    verdict.lambda_min = eig.values.front();
    if (options.trace) {
      *options.trace << iter << ' ' << format_sci(verdict.lambda_min, 6) << ' ' << format_sci(point.radius, 6) << ' '
                     << cuts.size() << ' ' << point.pivots << '\n';
    }
    if (verdict.lambda_min >= accept) {
      verdict.status = Feasibility::Feasible;
      verdict.witness = point.u_hat;
      verdict.cuts = static_cast<int>(cuts.size());
      return verdict;
    }
    int added = 0;
    for (std::size_t k = 0; k < dim && added < options.cuts_per_round; ++k) {
      if (!(eig.values[k] < 0)) break;
      std::vector<Real> a(dim);
      for (std::size_t i = 0; i < dim; ++i) a[i] = eig.vectors(i, k) * scale[i];
      cuts.push_back(make_cut(a, mhat, n));
      ++added;
    }
  }
  verdict.status = Feasibility::Feasible;
  verdict.budget_exhausted = true;
  verdict.cuts = static_cast<int>(cuts.size());
  return verdict;
}

FeasibilityVerdict emm_feasible(const RotationParams& params, int p_max, const FeasibilityOptions& options) {
  const GeneratorTable mhat = generate_mhat(params, p_max);
  return emm_feasible(mhat, p_max / 2, options);
}

}  // namespace emm
