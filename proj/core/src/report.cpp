#include "emm/report.hpp"

#include <json.hpp>

#include <ostream>

namespace emm {

namespace {

using nlohmann::ordered_json;

std::string theta_text(const Real& theta) { return format_fixed(theta, kThetaDecimals); }
std::string energy_text(const Real& e) { return format_fixed(e, kEnergyDecimals); }

ordered_json point_json(const ScanPoint& p) {
  ordered_json j;
  j["energy"] = energy_text(p.energy);
  j["p_max"] = p.p_max;
  j["verdict"] = std::string(to_string(p.verdict));
  j["iterations"] = p.iterations;
  j["cuts"] = p.cuts;
  j["budget_exhausted"] = p.budget_exhausted;
  if (!p.error.empty()) j["error"] = p.error;
  return j;
}

ordered_json bound_json(const EnergyBoundResult& r) {
  ordered_json j;
  j["theta"] = theta_text(r.theta);
  j["p_max"] = r.p_max;
  j["status"] = std::string(to_string(r.status));
  if (r.status == BoundStatus::Bounded) {
    j["E_L"] = energy_text(r.e_lower);
    j["E_U"] = energy_text(r.e_upper);
    j["width"] = energy_text(r.width());
  }
  j["lower_at_window"] = r.lower_at_window;
  j["upper_at_window"] = r.upper_at_window;
  if (r.refine_error) j["refine_error"] = std::string(to_string(*r.refine_error));
  j["rungs"] = r.rungs;
  ordered_json trace = ordered_json::array();
  for (const ScanPoint& p : r.scan_trace) trace.push_back(point_json(p));
  j["scan_trace"] = std::move(trace);
  return j;
}

}  // namespace

void write_bound_csv(std::ostream& out, std::span<const EnergyBoundResult> results) {
  out << "theta,E_L,E_U,p_max,width,status\n";
  for (const EnergyBoundResult& r : results) {
    out << theta_text(r.theta) << ',';
    if (r.status == BoundStatus::Bounded) {
      out << energy_text(r.e_lower) << ',' << energy_text(r.e_upper) << ',' << r.p_max << ','
          << energy_text(r.width());
    } else {
      out << ",," << r.p_max << ',';
    }
    out << ',' << to_string(r.status) << '\n';
  }
}

void write_bound_json(std::ostream& out, std::span<const EnergyBoundResult> results) {
  ordered_json j;
  j["results"] = ordered_json::array();
  for (const EnergyBoundResult& r : results) j["results"].push_back(bound_json(r));
  out << j.dump(2) << '\n';
}

void write_scan_csv(std::ostream& out, const Real& theta, std::span<const ScanPoint> points) {
  out << "theta,E,p_max,verdict,iterations,cuts,budget_exhausted\n";
  for (const ScanPoint& p : points) {
    out << theta_text(theta) << ',' << energy_text(p.energy) << ',' << p.p_max << ',' << to_string(p.verdict) << ','
        << p.iterations << ',' << p.cuts << ',' << (p.budget_exhausted ? 1 : 0) << '\n';
  }
}

void write_scan_json(std::ostream& out, const Real& theta, std::span<const ScanPoint> points) {
  ordered_json j;
  j["theta"] = theta_text(theta);
  j["points"] = ordered_json::array();
  for (const ScanPoint& p : points) j["points"].push_back(point_json(p));
  out << j.dump(2) << '\n';
}

void write_validation_json(std::ostream& out, const ValidationReport& report) {
  ordered_json j;
  j["theta"] = report.theta;
  j["energy"] = report.energy;
  j["coefficient_energy"] = report.coefficient_energy;
  j["passed"] = report.passed();
  if (const CheckResult* f = report.first_failure()) j["first_failure"] = f->name;
  j["checks"] = ordered_json::array();
  for (const CheckResult& c : report.checks) {
    ordered_json row;
    row["name"] = c.name;
    row["norm"] = c.norm;
    row["threshold"] = c.threshold;
    row["passed"] = c.passed;
    row["grid_size"] = c.grid_size;
    row["excision"] = c.excision;
    if (!c.detail.empty()) row["detail"] = c.detail;
    j["checks"].push_back(std::move(row));
  }
  out << j.dump(2) << '\n';
}

}  // namespace emm
