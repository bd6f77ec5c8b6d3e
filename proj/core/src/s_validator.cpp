#include "emm/s_validator.hpp"

#include "emm/model.hpp"
#include "emm/moment_engine.hpp"
#include "emm/numeric.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace emm {

namespace {

constexpr double kBilinearThreshold = 1e-6;
constexpr double kTThreshold = 1e-6;
constexpr double kClosureThreshold = 1e-5;
constexpr double kFourthThreshold = 1e-4;
constexpr double kRecursionThreshold = 1e-4;
constexpr double kRow9Threshold = 1e-6;
constexpr double kMu8Threshold = 1e-4;
constexpr double kReconstructionThreshold = 1e-4;

// Centred 9-point weights for derivatives 1..4, already divided by h^m.
struct Stencil {
  std::array<std::array<double, 2 * kStencilHalf + 1>, 5> w{};

  explicit Stencil(double h) {
    std::vector<double> offsets;
    for (int k = -static_cast<int>(kStencilHalf); k <= static_cast<int>(kStencilHalf); ++k) offsets.push_back(k);
    const auto raw = fornberg_weights(offsets, 4);
    for (std::size_t m = 0; m <= 4; ++m) {
      const double scale = std::pow(h, static_cast<double>(m));
      for (std::size_t j = 0; j < offsets.size(); ++j) w[m][j] = raw[m][j] / scale;
    }
  }

  template <class T>
  T apply(const std::vector<T>& f, std::size_t node, std::size_t order) const {
    T acc{};
    for (std::size_t j = 0; j < w[order].size(); ++j) acc += w[order][j] * f[node + j - kStencilHalf];
    return acc;
  }
};

// Tracks sup |sum| and sup of the largest single term.
struct RelativeSup {
  double residual = 0;
  double scale = 0;

  template <std::size_t N>
  void add(const std::array<double, N>& terms) {
    double sum = 0, biggest = 0;
    for (double t : terms) {
      sum += t;
      biggest = std::max(biggest, std::abs(t));
    }
    residual = std::max(residual, std::abs(sum));
    scale = std::max(scale, biggest);
  }

  double value() const { return scale > 0 ? residual / scale : 0.0; }
};

struct Parts {
  double AR, AI, BR, BI, CR, CI;
};

Parts split(Complex A, Complex B, Complex C) { return {A.real(), A.imag(), B.real(), B.imag(), C.real(), C.imag()}; }

std::array<double, 5> sigma1_terms(const DensityFields& f, std::size_t k, const Parts& c) {
  return {(f.S2[k] - 2 * f.P[k]) * c.AR, f.S1[k] * c.BR, 2 * f.S[k] * c.CR, 2 * c.BI * f.J[k], 2 * c.AI * f.J1[k]};
}
std::array<double, 5> delta1_terms(const DensityFields& f, std::size_t k, const Parts& c) {
  return {(f.S2[k] - 2 * f.P[k]) * c.AI, f.S1[k] * c.BI, 2 * f.S[k] * c.CI, -2 * c.BR * f.J[k], -2 * c.AR * f.J1[k]};
}
std::array<double, 5> sigma2_terms(const DensityFields& f, std::size_t k, const Parts& c) {
  return {f.P1[k] * c.AR, 2 * f.T[k] * c.AI, 2 * f.P[k] * c.BR, f.S1[k] * c.CR, -2 * f.J[k] * c.CI};
}
std::array<double, 5> delta2_terms(const DensityFields& f, std::size_t k, const Parts& c) {
  return {f.P1[k] * c.AI, -2 * f.T[k] * c.AR, 2 * f.P[k] * c.BI, f.S1[k] * c.CI, 2 * f.J[k] * c.CR};
}

template <std::size_t N>
double total(const std::array<double, N>& t) {
  double s = 0;
  for (double v : t) s += v;
  return s;
}

void require_same_nodes(const DensityFields& fields, const ContourCoefficients& coeffs) {
  if (coeffs.C.size() != fields.size()) throw Error(ErrorCode::InvalidArgument, "coefficients and fields differ in size");
}

CheckResult check(std::string name, double norm, double threshold, std::size_t grid_size, double excision = 0) {
  return {std::move(name), norm, threshold, norm <= threshold, grid_size, excision, {}};
}

double relative(double value, double reference) {
  return std::abs(value - reference) / std::max(std::abs(reference), std::numeric_limits<double>::min());
}

}  // namespace

std::vector<std::vector<double>> fornberg_weights(const std::vector<double>& offsets, int max_order) {
  const std::size_t n = offsets.size();
  if (n == 0 || max_order < 0) throw Error(ErrorCode::InvalidArgument, "fornberg_weights: empty stencil");
  const auto m = static_cast<std::size_t>(max_order);
  std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));  // c[node][order]
  double c1 = 1.0;
  double c4 = offsets[0];
  c[0][0] = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = offsets[i];
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = offsets[i] - offsets[j];
      c2 *= c3;
      if (j == i - 1) {
        for (std::size_t k = mn; k >= 1; --k) {
          c[i][k] = c1 * (static_cast<double>(k) * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        }
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (std::size_t k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - static_cast<double>(k) * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<std::vector<double>> out(m + 1, std::vector<double>(n));
  for (std::size_t k = 0; k <= m; ++k) {
    for (std::size_t j = 0; j < n; ++j) out[k][j] = c[j][k];
  }
  return out;
}

DensityFields compute_fields(const WavefunctionGrid& grid) {
  const std::size_t n = grid.size();
  if (n <= 2 * kStencilHalf) throw Error(ErrorCode::InvalidArgument, "grid too small for the derivative stencils");
  DensityFields f;
  f.theta = grid.theta;
  f.energy = grid.energy;
  f.h = grid.h;
  f.xi = grid.xi;
  f.S.resize(n);
  f.P.resize(n);
  f.J.resize(n);
  f.T.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Complex psi = grid.psi[k];
    const Complex d1 = grid.dpsi[k];
    const Complex d2 = rotated_q(grid.theta, grid.energy, grid.xi[k]) * psi;
    f.S[k] = std::norm(psi);
    f.P[k] = std::norm(d1);
    f.J[k] = -(std::conj(psi) * d1).imag();
    f.T[k] = -(std::conj(d1) * d2).imag();
  }

  const Stencil st(grid.h);
  f.S1.assign(n, 0.0);
  f.S2.assign(n, 0.0);
  f.S3.assign(n, 0.0);
  f.S4.assign(n, 0.0);
  f.P1.assign(n, 0.0);
  f.J1.assign(n, 0.0);
  f.T_stencil.assign(n, 0.0);
  for (std::size_t k = f.begin_valid(); k < f.end_valid(); ++k) {
    f.S1[k] = st.apply(f.S, k, 1);
    f.S2[k] = st.apply(f.S, k, 2);
    f.S3[k] = st.apply(f.S, k, 3);
    f.S4[k] = st.apply(f.S, k, 4);
    f.P1[k] = st.apply(f.P, k, 1);
    f.J1[k] = st.apply(f.J, k, 1);
    const Complex d2 = st.apply(grid.dpsi, k, 1);
    f.T_stencil[k] = -(std::conj(grid.dpsi[k]) * d2).imag();
  }
  return f;
}

ContourCoefficients contour_coefficients(const DensityFields& fields, double energy) {
  ContourCoefficients c;
  c.theta = fields.theta;
  c.energy = energy;
  c.A = -std::exp(Complex(0, -2 * fields.theta));
  c.B = 0;
  c.C.resize(fields.size());
  const Complex rot3 = std::exp(Complex(0, 3 * fields.theta));
  for (std::size_t k = 0; k < fields.size(); ++k) {
    const double xi = fields.xi[k];
    c.C[k] = Complex(0, -1) * rot3 * (xi * xi * xi) - energy;
  }
  return c;
}

double BilinearResiduals::max() const { return std::max({sigma1, delta1, sigma2, delta2}); }

BilinearResiduals bilinear_residuals(const DensityFields& fields, const ContourCoefficients& coeffs) {
  require_same_nodes(fields, coeffs);
  RelativeSup s1, d1, s2, d2;
  for (std::size_t k = fields.begin_valid(); k < fields.end_valid(); ++k) {
    const Parts c = split(coeffs.A, coeffs.B, coeffs.C[k]);
    s1.add(sigma1_terms(fields, k, c));
    d1.add(delta1_terms(fields, k, c));
    s2.add(sigma2_terms(fields, k, c));
    d2.add(delta2_terms(fields, k, c));
  }
  return {s1.value(), d1.value(), s2.value(), d2.value()};
}

BilinearDirect bilinear_from_products(const WavefunctionGrid& grid, const ContourCoefficients& coeffs) {
  if (coeffs.C.size() != grid.size()) throw Error(ErrorCode::InvalidArgument, "coefficients and grid differ in size");
  BilinearDirect out;
  const std::size_t n = grid.size();
  out.sigma1.resize(n);
  out.delta1.resize(n);
  out.sigma2.resize(n);
  out.delta2.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Complex psi = grid.psi[k];
    const Complex d1 = grid.dpsi[k];
    const Complex d2 = rotated_q(grid.theta, grid.energy, grid.xi[k]) * psi;
    const Complex hpsi = coeffs.A * d2 + coeffs.B * d1 + coeffs.C[k] * psi;
    const Complex first = std::conj(psi) * hpsi;
    const Complex second = std::conj(d1) * hpsi;
    // X + c.c. = 2 Re X and (X - c.c.) / i = 2 Im X
    out.sigma1[k] = 2 * first.real();
    out.delta1[k] = 2 * first.imag();
    out.sigma2[k] = 2 * second.real();
    out.delta2[k] = 2 * second.imag();
  }
  return out;
}

BilinearDirect bilinear_from_fields(const DensityFields& fields, const ContourCoefficients& coeffs) {
  require_same_nodes(fields, coeffs);
  BilinearDirect out;
  const std::size_t n = fields.size();
  out.sigma1.assign(n, 0.0);
  out.delta1.assign(n, 0.0);
  out.sigma2.assign(n, 0.0);
  out.delta2.assign(n, 0.0);
  for (std::size_t k = fields.begin_valid(); k < fields.end_valid(); ++k) {
    const Parts c = split(coeffs.A, coeffs.B, coeffs.C[k]);
    out.sigma1[k] = total(sigma1_terms(fields, k, c));
    out.delta1[k] = total(delta1_terms(fields, k, c));
    out.sigma2[k] = total(sigma2_terms(fields, k, c));
    out.delta2[k] = total(delta2_terms(fields, k, c));
  }
  return out;
}

double j_from_closure(double P1, double P, double S1, Complex A, Complex B, Complex C) {
  const Complex ac = A * std::conj(C);
  const Complex ab = A * std::conj(B);
  return (P1 * std::norm(A) + 2 * P * ab.real() + S1 * ac.real()) / (-2 * ac.imag());
}

SubgridResidual j_closure_check(const DensityFields& fields, const ContourCoefficients& coeffs, double b,
                                double excision) {
  require_same_nodes(fields, coeffs);
  SubgridResidual r;
  r.excision = excision;
  r.nodes_total = fields.end_valid() - fields.begin_valid();
  double worst = 0, jmax = 0;
  for (std::size_t k = fields.begin_valid(); k < fields.end_valid(); ++k) {
    if (std::abs(fields.xi[k] - b) <= excision) continue;
    ++r.nodes_used;
    const double j = j_from_closure(fields.P1[k], fields.P[k], fields.S1[k], coeffs.A, coeffs.B, coeffs.C[k]);
    worst = std::max(worst, std::abs(j - fields.J[k]));
    jmax = std::max(jmax, std::abs(fields.J[k]));
  }
  if (2 * r.nodes_used < r.nodes_total) {
    throw Error(ErrorCode::SingularSubgrid, "excision around the singular point leaves " + std::to_string(r.nodes_used) +
                                                " of " + std::to_string(r.nodes_total) + " nodes");
  }
  r.norm = jmax > 0 ? worst / jmax : 0.0;
  return r;
}

double singular_point(double theta, double energy) {
  return -std::cbrt(energy * std::sin(2 * theta) / std::cos(5 * theta));
}

SubgridResidual fourth_order_residual(const DensityFields& fields, double theta, double energy,
                                      std::optional<double> excision) {
  const double c2 = std::cos(2 * theta), s2 = std::sin(2 * theta);
  const double c5 = std::cos(5 * theta), s5 = std::sin(5 * theta);
  const double E = energy;
  const double b = singular_point(theta, energy);
  SubgridResidual r;
  r.excision = excision.value_or(0.1 * std::max(1.0, std::abs(b)));
  r.nodes_total = fields.end_valid() - fields.begin_valid();
  RelativeSup sup;
  for (std::size_t k = fields.begin_valid(); k < fields.end_valid(); ++k) {
    const double x = fields.xi[k];
    if (std::abs(x - b) <= r.excision) continue;
    ++r.nodes_used;
    const double x2 = x * x, x3 = x2 * x;
    const double lam = c5 * x3 + E * s2;
    const double lam2 = lam * lam;
    const double poly0 = 4 * c5 * c5 * c5 * x3 * x3 * x3 + 12 * c5 * c5 * s2 * E * x3 * x3 +
                         12 * c5 * s2 * s2 * E * E * x3 + 4 * E * E * E * s2 * s2 * s2 - 6 * c5 * s5 * x2 * x2 +
                         12 * E * s2 * s5 * x;
    sup.add(std::array<double, 5>{
        fields.S4[k] / lam,
        -3 * c5 * x2 * fields.S3[k] / lam2,
        (4 * c2 * E - 4 * x3 * s5) * fields.S2[k] / lam,
        -6 * x2 * (2 * c2 * c5 * E + c5 * s5 * x3 + 3 * E * s2 * s5) * fields.S1[k] / lam2,
        -poly0 * fields.S[k] / lam2,
    });
  }
  r.norm = sup.value();
  return r;
}

MomentChainReport moment_chain_check(const WavefunctionGrid& grid, double energy, int precision_digits) {
  const RotationParams params = make_params(Real(grid.theta), Real(energy), precision_digits);
  const std::vector<double> raw = numeric_moments(grid, to_double(params.b), 40);
  const std::vector<double> mu_d = normalize_even_sum(raw);
  std::vector<Real> mu(mu_d.begin(), mu_d.end());

  MomentChainReport rep;
  for (int p = 0; p <= 10; ++p) {
    rep.recursion = std::max(rep.recursion, to_double(recursion_residual(recursion_band(params, p), mu)));
  }
  const GeneratorTable mtilde = generate_mtilde(params, 40);
  Real row9 = 0;
  for (std::size_t l = 0; l < 9; ++l) row9 += mtilde.rows(9, l) * mu[l];
  rep.mtilde_row9 = relative(to_double(row9), mu_d[9]);

  const Mu8Constraint mu8 = mu8_constraint(params);
  Real via = 0;
  for (std::size_t l = 0; l < 8; ++l) via += mu8.weights[l] * mu[l];
  rep.mu8 = relative(to_double(via), mu_d[8]);

  const GeneratorTable m = generate_m(mtilde, mu8);
  const GeneratorTable mhat = generate_mhat(m, build_even_map(m));
  std::vector<Real> u_hat(7);
  for (std::size_t l = 1; l < 8; ++l) u_hat[l - 1] = mu[2 * l];
  const std::vector<Real> rec = moments_from_u(mhat, u_hat);
  for (std::size_t p = 0; p <= 20; ++p) rep.reconstruction = std::max(rep.reconstruction, relative(to_double(rec[p]), mu_d[p]));
  return rep;
}

bool ValidationReport::passed() const { return first_failure() == nullptr; }

const CheckResult* ValidationReport::first_failure() const {
  for (const CheckResult& c : checks) {
    if (!c.passed) return &c;
  }
  return nullptr;
}

ValidationReport validate_grid(const WavefunctionGrid& grid, std::optional<double> coefficient_energy,
                               bool with_moments) {
  ValidationReport rep;
  rep.theta = grid.theta;
  rep.energy = grid.energy.real();
  rep.coefficient_energy = coefficient_energy.value_or(rep.energy);
  const double E = rep.coefficient_energy;

  const DensityFields fields = compute_fields(grid);
  const ContourCoefficients coeffs = contour_coefficients(fields, E);
  const std::size_t n = fields.size();

  const BilinearResiduals bil = bilinear_residuals(fields, coeffs);
  rep.checks.push_back(check("sigma1", bil.sigma1, kBilinearThreshold, n));
  rep.checks.push_back(check("delta1", bil.delta1, kBilinearThreshold, n));
  rep.checks.push_back(check("sigma2", bil.sigma2, kBilinearThreshold, n));
  rep.checks.push_back(check("delta2", bil.delta2, kBilinearThreshold, n));

  double t_worst = 0, t_max = 0;
  for (std::size_t k = fields.begin_valid(); k < fields.end_valid(); ++k) {
    t_worst = std::max(t_worst, std::abs(fields.T[k] - fields.T_stencil[k]));
    t_max = std::max(t_max, std::abs(fields.T[k]));
  }
  rep.checks.push_back(check("t_stencil", t_max > 0 ? t_worst / t_max : 0.0, kTThreshold, n));

  const double b = singular_point(grid.theta, E);
  const SubgridResidual jc = j_closure_check(fields, coeffs, b);
  rep.checks.push_back(check("j_closure", jc.norm, kClosureThreshold, jc.nodes_used, jc.excision));
  const SubgridResidual fo = fourth_order_residual(fields, grid.theta, E);
  rep.checks.push_back(check("fourth_order", fo.norm, kFourthThreshold, fo.nodes_used, fo.excision));

  if (with_moments && grid.theta > 0) {
    try {
      const MomentChainReport mc = moment_chain_check(grid, E);
      rep.checks.push_back(check("moment_recursion", mc.recursion, kRecursionThreshold, n));
      rep.checks.push_back(check("mtilde_row9", mc.mtilde_row9, kRow9Threshold, n));
      rep.checks.push_back(check("mu8_constraint", mc.mu8, kMu8Threshold, n));
      rep.checks.push_back(check("mhat_reconstruction", mc.reconstruction, kReconstructionThreshold, n));
    } catch (const Error& e) {
      // Moments that cannot be formed fail the chain as a whole.
      CheckResult failed = check("moment_chain", std::numeric_limits<double>::infinity(), kRecursionThreshold, n);
      failed.detail = e.what();
      rep.checks.push_back(std::move(failed));
    }
  }
  return rep;
}

OracleValidation validate_oracle(double theta, double relative_offset, const OracleOptions& options) {
  OracleValidation out;
  out.ground = find_ground_energy_complex(theta, options);
  const double energy = out.ground.energy.real() * (1.0 + relative_offset);
  out.report = validate_grid(solve_grid(theta, energy, options));
  return out;
}

}  // namespace emm
