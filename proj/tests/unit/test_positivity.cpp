#include "emm/positivity.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <sstream>

using namespace emm;

namespace {

constexpr int kPmax = 20;
constexpr int kOrder = kPmax / 2;

std::vector<Real> random_u() {
  std::vector<double> raw(8);
  double sum = 0;
  for (double& r : raw) sum += (r = test::uniform(0.01, 1.0));
  std::vector<Real> u;
  for (std::size_t l = 1; l < 8; ++l) u.emplace_back(raw[l] / sum);
  return u;
}

// u_hat of the actual ground-state density: normalised even quadrature moments.
std::vector<Real> oracle_u(double theta, double energy, const RotationParams& params) {
  const WavefunctionGrid g = solve_grid(theta, energy);
  const std::vector<double> mu = normalize_even_sum(numeric_moments(g, to_double(params.b), 2 * kOrder));
  std::vector<Real> u;
  for (std::size_t l = 1; l < 8; ++l) u.emplace_back(mu[2 * l]);
  return u;
}

}  // namespace

TEST_CASE("Hankel assembly") {
  std::vector<Real> mu;
  for (int k = 0; k <= 8; ++k) mu.emplace_back(k + 1);
  const HankelMatrix h = assemble_hankel(mu, 4);
  CHECK(h.order == 4);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) CHECK(h.h(i, j) == mu[i + j]);
  CHECK_THROWS_AS(assemble_hankel(mu, 5), Error);
}

TEST_CASE("a cut equals the quadratic form of the Hankel it linearises") {
  const RotationParams params = make_params(Real("0.05"), Real("1.2"));
  const GeneratorTable mhat = generate_mhat(params, kPmax);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<Real> a(kOrder + 1);
    for (Real& v : a) v = Real(test::uniform(-1, 1));
    const Cut cut = make_cut(a, mhat, kOrder);
    Real n2 = 0;
    for (const Real& d : cut.direction) n2 += d * d;
    CHECK(test::abs_real(n2 - 1) <= test::working_tolerance(5));

    const std::vector<Real> u = random_u();
    const HankelMatrix h = assemble_hankel(moments_from_u(mhat, u), kOrder);
    Real form = 0;
    for (std::size_t i = 0; i <= kOrder; ++i)
      for (std::size_t j = 0; j <= kOrder; ++j) form += cut.direction[i] * h.h(i, j) * cut.direction[j];
    CHECK(test::abs_real(cut.evaluate(u) - form) <= test::working_tolerance(30) * (1 + test::abs_real(form)));
  }
}

TEST_CASE("minimum eigenpair") {
  const RotationParams params = make_params(Real("0.05"), Real("1.2"));
  const GeneratorTable mhat = generate_mhat(params, kPmax);
  const HankelMatrix h = assemble_hankel(moments_from_u(mhat, random_u()), kOrder);
  const EigenDirection e = min_eigen_direction(h);
  const Cut cut = make_cut(e.direction, mhat, kOrder);
  Real rayleigh = 0;
  for (std::size_t i = 0; i <= kOrder; ++i)
    for (std::size_t j = 0; j <= kOrder; ++j) rayleigh += e.direction[i] * h.h(i, j) * e.direction[j];
  CHECK(test::abs_real(rayleigh - e.lambda_min) <= test::working_tolerance(30) * (1 + test::abs_real(rayleigh)));
  (void)cut;
}

TEST_CASE("cuts never remove the true density") {
  const double theta = 0.05;
  const double e0 = test::oracle_e0();
  const RotationParams params = make_params(Real(theta), Real(e0));
  const GeneratorTable mhat = generate_mhat(params, kPmax);
  const std::vector<Real> truth = oracle_u(theta, e0, params);

  std::vector<Cut> cuts;
  for (int k = 0; k <= kOrder; ++k) {
    std::vector<Real> e(kOrder + 1, Real(0));
    e[k] = 1;
    cuts.push_back(make_cut(e, mhat, kOrder));
  }
  // Eigen-cuts from indefinite Hankels at random trial points.
  for (int trial = 0; trial < 10; ++trial) {
    const HankelMatrix h = assemble_hankel(moments_from_u(mhat, random_u()), kOrder);
    const auto eig = symmetric_eigen_ql(h.h);
    for (std::size_t k = 0; k < eig.values.size() && eig.values[k] < 0; ++k) {
      std::vector<Real> dir(kOrder + 1);
      for (std::size_t i = 0; i <= kOrder; ++i) dir[i] = eig.vectors(i, k);
      cuts.push_back(make_cut(dir, mhat, kOrder));
    }
  }
  REQUIRE(cuts.size() > static_cast<std::size_t>(kOrder + 1));
  for (const Cut& c : cuts) {
    Real scale = test::abs_real(c.constant);
    for (std::size_t l = 0; l < 7; ++l) scale += test::abs_real(c.weights[l] * truth[l]);
    // Quadrature moments carry ~1e-14 relative error.
    CHECK(c.evaluate(truth) >= -Real("1e-9") * scale);
  }
}

TEST_CASE("LP point of the bare simplex") {
  const LpPoint pt = lp_feasible_point({});
  CHECK(pt.feasible);
  REQUIRE(pt.u_hat.size() == 7);
  CHECK(test::abs_real(pt.radius - 1 / (7 + sqrt(Real(7)))) <= test::working_tolerance(20));
}

TEST_CASE("feasibility verdicts on both sides of the ground state") {
  const RotationParams at_e0 = make_params(Real("0.05"), Real(test::oracle_e0()));
  std::ostringstream trace;
  FeasibilityOptions opts;
  opts.trace = &trace;
  const FeasibilityVerdict yes = emm_feasible(at_e0, kPmax, opts);
  CHECK(yes.status == Feasibility::Feasible);
  CHECK_FALSE(yes.budget_exhausted);
  REQUIRE(yes.witness.size() == 7);
  CHECK_FALSE(trace.str().empty());

  // The witness passes the PSD test it was accepted by.
  const GeneratorTable mhat = generate_mhat(at_e0, kPmax);
  const HankelMatrix h = assemble_hankel(moments_from_u(mhat, yes.witness), kOrder);
  Real trace_h = 0;
  for (std::size_t i = 0; i <= kOrder; ++i) trace_h += h.h(i, i);
  std::vector<Real> d(kOrder + 1);
  for (std::size_t i = 0; i <= kOrder; ++i) d[i] = 1 / sqrt(h.h(i, i));
  RealMatrix scaled = h.h;
  for (std::size_t i = 0; i <= kOrder; ++i)
    for (std::size_t j = 0; j <= kOrder; ++j) scaled(i, j) *= d[i] * d[j];
  CHECK(symmetric_eigen_ql(scaled).values.front() >= -Real("1e-25"));

  const FeasibilityVerdict no = emm_feasible(make_params(Real("0.05"), Real("0.7")), kPmax);
  CHECK(no.status == Feasibility::Infeasible);
  CHECK_FALSE(no.certificate.empty());
}

TEST_CASE("exhausting the budget reports FEASIBLE") {
  FeasibilityOptions opts;
  opts.cut_budget = 1;
  const FeasibilityVerdict v = emm_feasible(make_params(Real("0.05"), Real("0.7")), kPmax, opts);
  CHECK(v.status == Feasibility::Feasible);
  CHECK(v.budget_exhausted);
}
