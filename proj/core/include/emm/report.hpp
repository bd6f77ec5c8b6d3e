#pragma once

// Machine-readable output: CSV is the summary surface, JSON carries the full
// scan traces and per-check residuals. Column order and number formatting
// are fixed so that identical runs produce identical bytes.

#include "emm/bounding.hpp"
#include "emm/s_validator.hpp"

#include <iosfwd>
#include <span>

namespace emm {

inline constexpr int kThetaDecimals = 6;
inline constexpr int kEnergyDecimals = 8;

/// "theta,E_L,E_U,p_max,width,status"; NO_SOLUTION rows leave the energy columns empty.
void write_bound_csv(std::ostream& out, std::span<const EnergyBoundResult> results);

/// {"results": [...]} with every scan point in evaluation order.
void write_bound_json(std::ostream& out, std::span<const EnergyBoundResult> results);

/// "theta,E,p_max,verdict,iterations,cuts,budget_exhausted" in energy order.
void write_scan_csv(std::ostream& out, const Real& theta, std::span<const ScanPoint> points);
void write_scan_json(std::ostream& out, const Real& theta, std::span<const ScanPoint> points);

/// Check name, norm, threshold, grid size and excision for every residual.
void write_validation_json(std::ostream& out, const ValidationReport& report);

}  // namespace emm
