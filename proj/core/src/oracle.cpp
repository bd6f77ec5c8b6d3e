#include "emm/oracle.hpp"

#include "emm/numeric.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

namespace emm {

namespace {

namespace odeint = boost::numeric::odeint;

using State = std::array<double, 4>;  // Re psi, Im psi, Re psi', Im psi'

constexpr double kOverflow = 1e290;
constexpr double kWronskianTol = 1e-10;
constexpr double kImagTol = 1e-8;

Complex rotated_dq(double theta, double xi) {
  return Complex(0, -3) * std::exp(Complex(0, 5 * theta)) * (xi * xi);
}

void check_options(const OracleOptions& o) {
  if (!(o.L > 0) || !(o.h > 0)) throw Error(ErrorCode::InvalidArgument, "oracle L and h must be positive");
  if (!(o.rel_tol > 0) || !(o.abs_tol > 0)) throw Error(ErrorCode::InvalidArgument, "oracle tolerances must be positive");
  const double ratio = o.L / o.h;
  const long n = std::lround(ratio);
  if (std::abs(ratio - static_cast<double>(n)) > 1e-9 * ratio || n % 2 != 0) {
    throw Error(ErrorCode::InvalidArgument, "oracle L / h must be an even integer");
  }
}

void check_theta(double theta) {
  if (!(theta >= 0) || !(theta < std::numbers::pi / 10)) {
    throw Error(ErrorCode::RejectAngle, "oracle angle must lie in [0, pi/10)");
  }
}

long half_nodes(const OracleOptions& o) { return std::lround(o.L / o.h); }

State initial_state(double theta, Complex energy, Side side, double L) {
  const double xi = static_cast<int>(side) * L;
  const Complex q = rotated_q(theta, energy, xi);
  Complex root = std::sqrt(q);
  if (root.real() < 0) root = -root;
  const Complex kappa = -static_cast<double>(static_cast<int>(side)) * root - rotated_dq(theta, xi) / (4.0 * q);
  return {1.0, 0.0, kappa.real(), kappa.imag()};
}

struct Rhs {
  double theta;
  Complex energy;
  void operator()(const State& y, State& dy, double xi) const {
    const Complex psi(y[0], y[1]);
    const Complex d2 = rotated_q(theta, energy, xi) * psi;
    dy[0] = y[2];
    dy[1] = y[3];
    dy[2] = d2.real();
    dy[3] = d2.imag();
  }
};

auto make_stepper(const OracleOptions& o) {
  return odeint::make_controlled(o.abs_tol, o.rel_tol, odeint::runge_kutta_fehlberg78<State>());
}

void guard(const State& y, double xi) {
  for (double v : y) {
    if (!std::isfinite(v) || std::abs(v) > kOverflow) {  // rescaling keeps finite runs far below this
      throw Error(ErrorCode::Overflow, "shooting solution overflowed at xi = " + std::to_string(xi));
    }
  }
}

// Half-solution on the nodes k h, k = n..0 (times sign), integrated chunk by
// chunk with the state rescaled whenever it grows large; log_scale[k] is the
// logarithm of the factor divided out at node k.
struct Shot {
  std::vector<double> times;
  std::vector<State> states;
  std::vector<double> log_scale;
};

Shot shoot(double theta, Complex energy, Side side, const OracleOptions& o, bool keep_nodes) {
  constexpr std::size_t kChunk = 32;
  constexpr double kRescaleAbove = 1e100;
  const long n = half_nodes(o);
  const double sign = static_cast<int>(side);
  const double h = o.L / static_cast<double>(n);

  Shot shot;
  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(n) + 1);
  for (long k = n; k >= 0; --k) times.push_back(sign * static_cast<double>(k) * h);

  State y = initial_state(theta, energy, side, times.front() * sign);
  double log_scale = 0;
  auto stepper = make_stepper(o);
  const Rhs rhs{theta, energy};
  if (keep_nodes) {
    shot.states.push_back(y);
    shot.log_scale.push_back(0);
  }
  for (std::size_t start = 0; start + 1 < times.size(); start += kChunk) {
    const std::size_t stop = std::min(start + kChunk, times.size() - 1);
    std::size_t seen = 0;
    odeint::integrate_times(stepper, rhs, y, times.begin() + static_cast<std::ptrdiff_t>(start),
                            times.begin() + static_cast<std::ptrdiff_t>(stop) + 1, -sign * h,
                            [&](const State& s, double xi) {
                              guard(s, xi);
                              if (seen++ > 0 && keep_nodes) {
                                shot.states.push_back(s);
                                shot.log_scale.push_back(log_scale);
                              }
                            });
    double big = 0;
    for (double v : y) big = std::max(big, std::abs(v));
    if (big > kRescaleAbove) {
      for (double& v : y) v /= big;
      log_scale += std::log(big);
    }
  }
  if (!keep_nodes) {
    shot.states.push_back(y);
    shot.log_scale.push_back(log_scale);
  }
  shot.times = std::move(times);
  return shot;
}

double simpson_weight(std::size_t k, std::size_t n_intervals) {
  if (k == 0 || k == n_intervals) return 1.0;
  return k % 2 == 1 ? 4.0 : 2.0;
}

}  // namespace

double truncation_half_width(double theta) {
  check_theta(theta);
  // |psi| ~ exp(-0.4 Re(e^{i phi}) |xi|^{5/2}); the left tail has the larger phase.
  const double slowest = std::cos(2.5 * theta + std::numbers::pi / 4);
  const double needed = std::pow(30.0 / (0.4 * slowest), 0.4);
  return std::clamp(std::ceil(needed), 12.0, 40.0);
}

OracleOptions resolve_options(double theta, const OracleOptions& options) {
  OracleOptions o = options;
  if (o.L == 0.0) o.L = truncation_half_width(theta);
  check_options(o);
  return o;
}

Complex rotated_q(double theta, Complex energy, double xi) {
  return Complex(0, -1) * std::exp(Complex(0, 5 * theta)) * (xi * xi * xi) - energy * std::exp(Complex(0, 2 * theta));
}

HalfSolution integrate_ode(double theta, Complex energy, Side side, const OracleOptions& options) {
  check_theta(theta);
  Shot shot = shoot(theta, energy, side, resolve_options(theta, options), true);
  if (shot.states.size() != shot.times.size()) throw Error(ErrorCode::Overflow, "integrator skipped grid nodes");
  // Common scale: the one in force at the origin.
  const double ref = shot.log_scale.back();
  HalfSolution out;
  out.side = side;
  out.psi.reserve(shot.states.size());
  out.dpsi.reserve(shot.states.size());
  for (std::size_t k = 0; k < shot.states.size(); ++k) {
    const double f = std::exp(shot.log_scale[k] - ref);
    const State& s = shot.states[k];
    out.psi.emplace_back(s[0] * f, s[1] * f);
    out.dpsi.emplace_back(s[2] * f, s[3] * f);
  }
  out.xi = std::move(shot.times);
  if (side == Side::Right) {
    std::reverse(out.xi.begin(), out.xi.end());
    std::reverse(out.psi.begin(), out.psi.end());
    std::reverse(out.dpsi.begin(), out.dpsi.end());
  }
  return out;
}

Complex matching_wronskian(double theta, Complex energy, const OracleOptions& options) {
  check_theta(theta);
  const OracleOptions o = resolve_options(theta, options);
  const State l = shoot(theta, energy, Side::Left, o, false).states.back();
  const State r = shoot(theta, energy, Side::Right, o, false).states.back();
  const Complex pl(l[0], l[1]), dl(l[2], l[3]);
  const Complex pr(r[0], r[1]), dr(r[2], r[3]);
  return dr / pr - dl / pl;
}

GroundEnergy find_ground_energy_complex(double theta, const OracleOptions& options, Complex start) {
  GroundEnergy g;
  g.energy = start;
  Complex w = matching_wronskian(theta, g.energy, options);
  constexpr int kMaxIterations = 60;
  for (g.iterations = 0; g.iterations < kMaxIterations && std::abs(w) >= kWronskianTol; ++g.iterations) {
    const double step = 1e-6 * std::max(1.0, std::abs(g.energy));
    const Complex slope =
        (matching_wronskian(theta, g.energy + step, options) - matching_wronskian(theta, g.energy - step, options)) /
        (2.0 * step);
    if (slope == Complex(0) || !std::isfinite(std::abs(slope))) break;
    Complex delta = w / slope;
    // Damped so that a poor start cannot throw the iterate out of the basin.
    if (std::abs(delta) > 0.25) delta *= 0.25 / std::abs(delta);
    g.energy -= delta;
    w = matching_wronskian(theta, g.energy, options);
  }
  g.residual = std::abs(w);
  if (!(g.residual < kWronskianTol)) {
    throw Error(ErrorCode::NoConvergence, "shooting Newton stopped at |W| = " + std::to_string(g.residual));
  }
  if (std::abs(g.energy.imag()) >= kImagTol) {
    throw Error(ErrorCode::ComplexEnergy, "ground energy has imaginary part " + std::to_string(g.energy.imag()));
  }
  return g;
}

double find_ground_energy(double theta, const OracleOptions& options) {
  return find_ground_energy_complex(theta, options).energy.real();
}

WavefunctionGrid solve_grid(double theta, Complex energy, const OracleOptions& options) {
  check_theta(theta);
  const OracleOptions resolved = resolve_options(theta, options);
  const HalfSolution left = integrate_ode(theta, energy, Side::Left, resolved);
  const HalfSolution right = integrate_ode(theta, energy, Side::Right, resolved);
  const Complex scale = left.psi.back() / right.psi.front();

  WavefunctionGrid g;
  g.theta = theta;
  g.energy = energy;
  g.L = resolved.L;
  g.h = resolved.h;
  const std::size_t total = left.xi.size() + right.xi.size() - 1;
  g.xi.reserve(total);
  g.psi.reserve(total);
  g.dpsi.reserve(total);
  for (std::size_t k = 0; k < left.xi.size(); ++k) {
    g.xi.push_back(left.xi[k]);
    g.psi.push_back(left.psi[k]);
    g.dpsi.push_back(left.dpsi[k]);
  }
  for (std::size_t k = 1; k < right.xi.size(); ++k) {
    g.xi.push_back(right.xi[k]);
    g.psi.push_back(right.psi[k] * scale);
    g.dpsi.push_back(right.dpsi[k] * scale);
  }

  std::vector<double> s(total);
  for (std::size_t k = 0; k < total; ++k) s[k] = std::norm(g.psi[k]);
  const double norm = std::sqrt(simpson(s, g.h));
  const Complex origin = left.psi.back();
  const Complex phase = std::conj(origin) / std::abs(origin);
  const Complex factor = phase / norm;
  for (std::size_t k = 0; k < total; ++k) {
    g.psi[k] *= factor;
    g.dpsi[k] *= factor;
  }
  double peak = 0;
  for (const Complex& v : g.psi) peak = std::max(peak, std::abs(v));
  g.edge_ratio = std::max(std::abs(g.psi.front()), std::abs(g.psi.back())) / peak;
  return g;
}

double simpson(const std::vector<double>& values, double h) {
  if (values.size() < 3 || values.size() % 2 == 0) {
    throw Error(ErrorCode::InvalidArgument, "simpson needs an odd number (>= 3) of samples");
  }
  const std::size_t n = values.size() - 1;
  double acc = 0;
  for (std::size_t k = 0; k <= n; ++k) acc += simpson_weight(k, n) * values[k];
  return acc * h / 3.0;
}

Complex energy_functional(const WavefunctionGrid& grid) {
  if (grid.theta != 0.0) throw Error(ErrorCode::InvalidArgument, "energy functional is defined on the real line only");
  const std::size_t n = grid.size();
  std::vector<double> s(n), p(n), x3s(n);
  for (std::size_t k = 0; k < n; ++k) {
    s[k] = std::norm(grid.psi[k]);
    p[k] = std::norm(grid.dpsi[k]);
    x3s[k] = grid.xi[k] * grid.xi[k] * grid.xi[k] * s[k];
  }
  const double is = simpson(s, grid.h);
  return Complex(simpson(p, grid.h), -simpson(x3s, grid.h)) / is;
}

std::vector<double> numeric_moments(const WavefunctionGrid& grid, double b, int p_max) {
  if (p_max < 0) throw Error(ErrorCode::InvalidArgument, "p_max must be >= 0");
  const std::size_t n = grid.size();
  if (n < 5 || (n - 1) % 4 != 0) throw Error(ErrorCode::InvalidArgument, "grid interval count must be a multiple of 4");
  if (!(grid.edge_ratio <= kEdgeDecay)) {
    throw Error(ErrorCode::QuadratureUnconverged,
                "wavefunction has not decayed at the truncation edge (ratio " + std::to_string(grid.edge_ratio) + ")");
  }
  const auto count = static_cast<std::size_t>(p_max) + 1;
  std::vector<double> fine(count, 0.0), coarse(count, 0.0);
  const std::size_t intervals = n - 1;
  for (std::size_t k = 0; k < n; ++k) {
    const double s = std::norm(grid.psi[k]);
    const double chi = grid.xi[k] - b;
    const double wf = simpson_weight(k, intervals);
    const double wc = k % 2 == 0 ? simpson_weight(k / 2, intervals / 2) : 0.0;
    double power = s;
    for (std::size_t p = 0; p < count; ++p) {
      fine[p] += wf * power;
      coarse[p] += wc * power;
      power *= chi;
    }
  }
  for (std::size_t p = 0; p < count; ++p) {
    fine[p] *= grid.h / 3.0;
    coarse[p] *= 2.0 * grid.h / 3.0;
  }
  for (std::size_t p = 0; p < count && p <= 20; ++p) {
    const double change = std::abs(fine[p] - coarse[p]);
    if (change > 1e-6 * std::abs(fine[p])) {
      throw Error(ErrorCode::QuadratureUnconverged,
                  "moment " + std::to_string(p) + " changed by " + std::to_string(change / std::abs(fine[p])) +
                      " relative under step doubling");
    }
  }
  return fine;
}

std::vector<double> normalize_even_sum(std::vector<double> moments) {
  if (moments.size() < 15) throw Error(ErrorCode::IndexRange, "even-sum normalisation needs moments through 14");
  double sum = 0;
  for (std::size_t l = 0; l < 8; ++l) sum += moments[2 * l];
  for (double& m : moments) m /= sum;
  return moments;
}

void write_grid_csv(std::ostream& out, const WavefunctionGrid& grid) {
  const auto old = out.precision(std::numeric_limits<double>::max_digits10);
  out << "xi,re_psi,im_psi,re_dpsi,im_dpsi\n";
  for (std::size_t k = 0; k < grid.size(); ++k) {
    out << grid.xi[k] << ',' << grid.psi[k].real() << ',' << grid.psi[k].imag() << ',' << grid.dpsi[k].real() << ','
        << grid.dpsi[k].imag() << '\n';
  }
  out.precision(old);
}

void write_moments_csv(std::ostream& out, const std::vector<double>& moments) {
  const auto old = out.precision(std::numeric_limits<double>::max_digits10);
  out << "p,mu\n";
  for (std::size_t p = 0; p < moments.size(); ++p) out << p << ',' << moments[p] << '\n';
  out.precision(old);
}

}  // namespace emm
