#pragma once

// Ground-state energy brackets from per-energy feasibility verdicts.
//
// Feasible sets shrink as the moment order grows, so the bracket is found by
// continuation in P_max: a coarse scan at a low order locates the lowest
// feasible block, every later rung rescans only the window between the
// infeasible neighbours of that block, and both edges are bisected at the
// final order.

#include "emm/numeric.hpp"
#include "emm/positivity.hpp"

#include <optional>
#include <string>
#include <vector>

namespace emm {

enum class ScanVerdict { Feasible, Infeasible, Undecided };

std::string_view to_string(ScanVerdict v);

/// UNDECIDED counts as feasible so that a numerical failure never tightens a bound.
constexpr bool counts_feasible(ScanVerdict v) noexcept { return v != ScanVerdict::Infeasible; }

struct ScanPoint {
  Real energy;
  int p_max = 0;
  ScanVerdict verdict = ScanVerdict::Undecided;
  int iterations = 0;
  int cuts = 0;
  bool budget_exhausted = false;
  std::string error;  // set when UNDECIDED
};

struct ScanSettings {
  int p_max = 40;
  int precision_digits = kDefaultDigits;
  int cut_budget = 200;
  Real eps_psd = Real("1e-30");
  int threads = 0;  // 0: hardware concurrency
};

/// One verdict; module errors are caught and produce UNDECIDED.
ScanPoint evaluate_energy(const Real& theta, const Real& energy, const ScanSettings& settings);

/// Verdicts at the given energies, evaluated concurrently, returned in input order.
std::vector<ScanPoint> evaluate_energies(const Real& theta, const std::vector<Real>& energies,
                                         const ScanSettings& settings);

/// e_min, e_min + step, ..., with e_max always included.
std::vector<Real> energy_grid(const Real& e_min, const Real& e_max, const Real& step);

/// Throws REJECT_ANGLE before any work for an angle outside the wedge, and
/// INVALID_ARGUMENT for a malformed window.
std::vector<ScanPoint> scan_energies(const Real& theta, const Real& e_min, const Real& e_max, const Real& step,
                                     const ScanSettings& settings);

struct EdgeRefinement {
  Real edge;            // midpoint of the final bracket
  Real feasible_side;
  Real infeasible_side;
  int evaluations = 0;
  std::optional<ErrorCode> error;  // NON_MONOTONE: refinement stopped at the current bracket
  std::vector<ScanPoint> trace;
};

/// Bisection of the feasibility boundary between a feasible and an
/// infeasible energy. With verify_endpoints the two inputs are re-tested
/// first and a contradicting verdict is reported as NON_MONOTONE.
EdgeRefinement refine_edge(const Real& theta, const Real& e_feasible, const Real& e_infeasible, const Real& tol,
                           const ScanSettings& settings, bool verify_endpoints = true);

struct BoundConfig {
  ScanSettings scan;
  Real e_min = Real("0.5");
  Real e_max = Real("8.0");
  Real step = Real("0.1");       // coarse spacing of the first rung
  Real bisect_tol = Real("1e-5");
  int ladder_start = 16;         // first rung order, clamped to [14, p_max]
  int ladder_step = 4;
  int rung_points = 24;          // subintervals per later-rung window
  int max_densify = 3;           // 4x denser rescans when a rung finds no feasible point
};

enum class BoundStatus { Bounded, NoSolution };

std::string_view to_string(BoundStatus s);

struct EnergyBoundResult {
  Real theta;
  int p_max = 0;
  Real e_lower;
  Real e_upper;
  BoundStatus status = BoundStatus::NoSolution;
  bool lower_at_window = false;  // feasible block reaches e_min; e_lower is the window edge
  bool upper_at_window = false;
  std::optional<ErrorCode> refine_error;
  std::vector<int> rungs;
  std::vector<ScanPoint> scan_trace;  // in evaluation order, rung by rung

  Real width() const { return e_upper - e_lower; }
};

EnergyBoundResult bound_ground_state(const Real& theta, const BoundConfig& config);

/// Orders used by bound_ground_state for a given configuration.
std::vector<int> ladder_orders(const BoundConfig& config);

}  // namespace emm
