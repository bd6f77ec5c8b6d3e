#include "emm/bounding.hpp"

#include "emm/model.hpp"

#include <boost/multiprecision/mpfr.hpp>

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace emm {

namespace {

int worker_count(int requested, std::size_t jobs) {
  int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  n = std::max(n, 1);
  return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(n), jobs));
}

void check_window(const Real& e_min, const Real& e_max, const Real& step) {
  if (!(e_min > 0)) throw Error(ErrorCode::InvalidArgument, "e_min must be positive");
  if (!(e_max > e_min)) throw Error(ErrorCode::InvalidArgument, "e_max must exceed e_min");
  if (!(step > 0)) throw Error(ErrorCode::InvalidArgument, "step must be positive");
}

// Uniform grid with `intervals` subintervals, endpoints included.
std::vector<Real> uniform(const Real& lo, const Real& hi, int intervals) {
  std::vector<Real> out;
  out.reserve(static_cast<std::size_t>(intervals) + 1);
  const Real h = (hi - lo) / intervals;
  for (int k = 0; k < intervals; ++k) out.push_back(lo + h * k);
  out.push_back(hi);
  return out;
}

struct Block {
  std::size_t first = 0;
  std::size_t last = 0;
};

// Lowest run of consecutive feasible entries.
std::optional<Block> lowest_block(const std::vector<ScanVerdict>& verdicts) {
  for (std::size_t i = 0; i < verdicts.size(); ++i) {
    if (!counts_feasible(verdicts[i])) continue;
    Block b{i, i};
    while (b.last + 1 < verdicts.size() && counts_feasible(verdicts[b.last + 1])) ++b.last;
    return b;
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(ScanVerdict v) {
  switch (v) {
    case ScanVerdict::Feasible: return "FEASIBLE";
    case ScanVerdict::Infeasible: return "INFEASIBLE";
    case ScanVerdict::Undecided: return "UNDECIDED";
  }
  return "UNDECIDED";
}

std::string_view to_string(BoundStatus s) { return s == BoundStatus::Bounded ? "BOUNDED" : "NO_SOLUTION"; }

ScanPoint evaluate_energy(const Real& theta, const Real& energy, const ScanSettings& settings) {
  ScanPoint point;
  point.energy = energy;
  point.p_max = settings.p_max;
  try {
    const RotationParams params = make_params(theta, energy, settings.precision_digits);
    FeasibilityOptions options;
    options.cut_budget = settings.cut_budget;
    options.eps_psd = settings.eps_psd;
    const FeasibilityVerdict v = emm_feasible(params, settings.p_max, options);
    point.verdict = v.status == Feasibility::Feasible ? ScanVerdict::Feasible : ScanVerdict::Infeasible;
    point.iterations = v.iterations;
    point.cuts = v.cuts;
    point.budget_exhausted = v.budget_exhausted;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::RejectAngle || e.code() == ErrorCode::InvalidArgument) throw;
    point.verdict = ScanVerdict::Undecided;
    point.error = e.what();
  } catch (const std::exception& e) {
    point.verdict = ScanVerdict::Undecided;
    point.error = e.what();
  }
  return point;
}

std::vector<ScanPoint> evaluate_energies(const Real& theta, const std::vector<Real>& energies,
                                         const ScanSettings& settings) {
  std::vector<ScanPoint> out(energies.size());
  if (energies.empty()) return out;
  // Precision is fixed before any worker starts; workers never change it.
  ensure_working_digits(settings.precision_digits);
  const int workers = worker_count(settings.threads, energies.size());
  if (workers == 1) {
    for (std::size_t i = 0; i < energies.size(); ++i) out[i] = evaluate_energy(theta, energies[i], settings);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < energies.size() && !failed; i = next++) {
          try {
            out[i] = evaluate_energy(theta, energies[i], settings);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            failed = true;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::vector<Real> energy_grid(const Real& e_min, const Real& e_max, const Real& step) {
  check_window(e_min, e_max, step);
  std::vector<Real> out;
  const Real slack = step * Real("1e-9");
  for (long k = 0;; ++k) {
    Real e = e_min + step * k;
    if (e > e_max - slack) break;
    out.push_back(std::move(e));
  }
  out.push_back(e_max);
  return out;
}

std::vector<ScanPoint> scan_energies(const Real& theta, const Real& e_min, const Real& e_max, const Real& step,
                                     const ScanSettings& settings) {
  (void)make_params(theta, e_min > 0 ? e_min : Real(1), settings.precision_digits);
  return evaluate_energies(theta, energy_grid(e_min, e_max, step), settings);
}

EdgeRefinement refine_edge(const Real& theta, const Real& e_feasible, const Real& e_infeasible, const Real& tol,
                           const ScanSettings& settings, bool verify_endpoints) {
  if (!(tol > 0)) throw Error(ErrorCode::InvalidArgument, "bisection tolerance must be positive");
  EdgeRefinement r;
  r.feasible_side = e_feasible;
  r.infeasible_side = e_infeasible;
  auto record = [&](const Real& e) {
    ScanPoint p = evaluate_energy(theta, e, settings);
    ++r.evaluations;
    r.trace.push_back(p);
    return p.verdict;
  };
  if (verify_endpoints) {
    if (!counts_feasible(record(e_feasible)) || counts_feasible(record(e_infeasible))) {
      r.error = ErrorCode::NonMonotone;
      r.edge = (e_feasible + e_infeasible) / 2;
      return r;
    }
  }
  while (abs(r.infeasible_side - r.feasible_side) >= tol) {
    const Real mid = (r.feasible_side + r.infeasible_side) / 2;
    if (counts_feasible(record(mid))) {
      r.feasible_side = mid;
    } else {
      r.infeasible_side = mid;
    }
  }
  r.edge = (r.feasible_side + r.infeasible_side) / 2;
  return r;
}

std::vector<int> ladder_orders(const BoundConfig& config) {
  const int p_max = config.scan.p_max;
  if (p_max < 14) throw Error(ErrorCode::InvalidArgument, "p_max must be at least 14");
  if (config.ladder_step < 2) throw Error(ErrorCode::InvalidArgument, "ladder_step must be at least 2");
  std::vector<int> out;
  int p = std::clamp(config.ladder_start, 14, p_max);
  p -= p % 2;
  for (; p < p_max; p += config.ladder_step) out.push_back(p);
  out.push_back(p_max);
  return out;
}

EnergyBoundResult bound_ground_state(const Real& theta, const BoundConfig& config) {
  check_window(config.e_min, config.e_max, config.step);
  if (config.rung_points < 2) throw Error(ErrorCode::InvalidArgument, "rung_points must be at least 2");
  (void)make_params(theta, config.e_min, config.scan.precision_digits);

  EnergyBoundResult result;
  result.theta = theta;
  result.p_max = config.scan.p_max;
  result.rungs = ladder_orders(config);

  // Window energies; an endpoint either is a window edge or was infeasible at a lower order.
  Real lo = config.e_min;
  Real hi = config.e_max;
  bool lo_is_edge = true;
  bool hi_is_edge = true;
  Real lo_in, hi_in;  // feasible ends of the current block

  for (std::size_t r = 0; r < result.rungs.size(); ++r) {
    ScanSettings settings = config.scan;
    settings.p_max = result.rungs[r];

    std::optional<Block> block;
    std::vector<Real> energies;
    std::vector<ScanVerdict> verdicts;
    for (int attempt = 0; attempt <= config.max_densify && !block; ++attempt) {
      if (r == 0) {
        const Real step = config.step / pow(Real(4), attempt);
        energies = energy_grid(lo, hi, step);
      } else {
        // Never coarser than the first-rung step.
        int intervals = config.rung_points;
        const Real by_step = ceil((hi - lo) / config.step);
        if (by_step > intervals) intervals = by_step.convert_to<int>();
        energies = uniform(lo, hi, intervals * (1 << (2 * attempt)));
      }
      // Endpoints inherited as infeasible are not retested.
      std::vector<Real> todo;
      for (std::size_t i = 0; i < energies.size(); ++i) {
        const bool inherited = (i == 0 && !lo_is_edge) || (i + 1 == energies.size() && !hi_is_edge);
        if (!inherited) todo.push_back(energies[i]);
      }
      std::vector<ScanPoint> points = evaluate_energies(theta, todo, settings);
      verdicts.assign(energies.size(), ScanVerdict::Infeasible);
      std::size_t k = 0;
      for (std::size_t i = 0; i < energies.size(); ++i) {
        const bool inherited = (i == 0 && !lo_is_edge) || (i + 1 == energies.size() && !hi_is_edge);
        if (!inherited) verdicts[i] = points[k++].verdict;
      }
      for (ScanPoint& p : points) result.scan_trace.push_back(std::move(p));
      block = lowest_block(verdicts);
    }
    if (!block) {
      result.status = BoundStatus::NoSolution;
      return result;
    }
    lo_in = energies[block->first];
    hi_in = energies[block->last];
    lo_is_edge = block->first == 0;
    hi_is_edge = block->last + 1 == energies.size();
    // A block touching a window edge that is itself inherited cannot happen:
    // inherited endpoints are infeasible.
    if (!lo_is_edge) lo = energies[block->first - 1];
    if (!hi_is_edge) hi = energies[block->last + 1];
    if (lo_is_edge) lo = energies.front();
    if (hi_is_edge) hi = energies.back();
  }

  ScanSettings final_settings = config.scan;
  result.status = BoundStatus::Bounded;
  result.lower_at_window = lo_is_edge;
  result.upper_at_window = hi_is_edge;
  if (lo_is_edge) {
    result.e_lower = lo;
  } else {
    EdgeRefinement edge = refine_edge(theta, lo_in, lo, config.bisect_tol, final_settings, false);
    result.e_lower = edge.edge;
    if (edge.error) result.refine_error = edge.error;
    for (ScanPoint& p : edge.trace) result.scan_trace.push_back(std::move(p));
  }
  if (hi_is_edge) {
    result.e_upper = hi;
  } else {
    EdgeRefinement edge = refine_edge(theta, hi_in, hi, config.bisect_tol, final_settings, false);
    result.e_upper = edge.edge;
    if (edge.error && !result.refine_error) result.refine_error = edge.error;
    for (ScanPoint& p : edge.trace) result.scan_trace.push_back(std::move(p));
  }
  return result;
}

}  // namespace emm
