#include "cli.hpp"

#include "emm/bounding.hpp"
#include "emm/numeric.hpp"
#include "emm/oracle.hpp"
#include "emm/report.hpp"
#include "emm/s_validator.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace emm::cli {

namespace {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

int parse_int(const std::string& key, const std::string& value) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw std::invalid_argument(key + ": not an integer: '" + value + "'");
  }
  return v;
}

double parse_double(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  double v = 0;
  if (!(in >> v) || !(in >> std::ws).eof()) throw std::invalid_argument(key + ": not a number: '" + value + "'");
  return v;
}

OutputFormat parse_format(const std::string& value) {
  if (value == "csv") return OutputFormat::Csv;
  if (value == "json") return OutputFormat::Json;
  throw std::invalid_argument("format must be csv or json, got '" + value + "'");
}

void apply_key(RunConfig& c, const std::string& key, const std::string& value) {
  if (key == "theta") {
    c.thetas = {value};
  } else if (key == "theta_list") {
    c.thetas = split_theta_list(value);
    c.theta_list_given = true;
  } else if (key == "p_max") {
    c.p_max = parse_int(key, value);
  } else if (key == "precision_digits") {
    c.precision_digits = parse_int(key, value);
  } else if (key == "e_min") {
    c.e_min = value;
  } else if (key == "e_max") {
    c.e_max = value;
  } else if (key == "step") {
    c.step = value;
  } else if (key == "bisect_tol") {
    c.bisect_tol = value;
  } else if (key == "cut_budget") {
    c.cut_budget = parse_int(key, value);
  } else if (key == "threads") {
    c.threads = parse_int(key, value);
  } else if (key == "out") {
    c.out = value;
  } else if (key == "format") {
    c.format = parse_format(value);
  } else if (key == "energy_offset") {
    c.energy_offset = parse_double(key, value);
  } else if (key == "grid_out") {
    c.grid_out = value;
  } else {
    throw std::invalid_argument("unknown key '" + key + "'");
  }
}

Real positive_real(const std::string& name, const std::string& text) {
  Real v;
  try {
    v = parse_real(text);
  } catch (const Error& e) {
    throw ConfigError(name + ": " + e.what());
  }
  if (!(v > 0)) throw ConfigError(name + " must be positive");
  return v;
}

// EMM commands need the open wedge; the oracle also admits the real line.
Real emm_theta(const std::string& text) {
  Real theta;
  try {
    theta = parse_real(text);
  } catch (const Error& e) {
    throw ConfigError(std::string("theta: ") + e.what());
  }
  if (!(theta > 0) || !(theta < pi() / 10)) {
    throw ConfigError("REJECT_ANGLE: theta = " + text + " outside (0, pi/10)");
  }
  return theta;
}

double oracle_theta(const std::string& text) {
  double theta = 0;
  try {
    theta = parse_double("theta", text);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(theta >= 0) || !(theta < std::numbers::pi / 10)) {
    throw ConfigError("REJECT_ANGLE: theta = " + text + " outside [0, pi/10)");
  }
  return theta;
}

const std::string& single_theta(const RunConfig& c) {
  if (c.thetas.size() != 1) throw ConfigError("this command takes exactly one theta");
  return c.thetas.front();
}

BoundConfig bound_config(const RunConfig& c) {
  BoundConfig b;
  b.scan.p_max = c.p_max;
  b.scan.precision_digits = c.precision_digits;
  b.scan.cut_budget = c.cut_budget;
  b.scan.threads = c.threads;
  b.e_min = positive_real("e_min", c.e_min);
  b.e_max = positive_real("e_max", c.e_max);
  b.step = positive_real("step", c.step);
  b.bisect_tol = positive_real("bisect_tol", c.bisect_tol);
  if (!(b.e_max > b.e_min)) throw ConfigError("e_max must exceed e_min");
  return b;
}

void check_common(const RunConfig& c) {
  if (c.p_max < 14 || c.p_max % 2 != 0) throw ConfigError("p_max must be an even integer >= 14");
  if (c.precision_digits < 30) throw ConfigError("precision_digits must be at least 30");
  if (c.cut_budget <= 0) throw ConfigError("cut_budget must be positive");
  if (c.threads < 0) throw ConfigError("threads must be >= 0");
}

int run_bounds(const RunConfig& c, std::ostream& out, const std::vector<std::string>& thetas) {
  const BoundConfig config = bound_config(c);
  std::vector<Real> angles;
  for (const std::string& t : thetas) angles.push_back(emm_theta(t));
  std::vector<EnergyBoundResult> results;
  for (const Real& theta : angles) results.push_back(bound_ground_state(theta, config));
  if (c.format == OutputFormat::Json) {
    write_bound_json(out, results);
  } else {
    write_bound_csv(out, results);
  }
  for (const EnergyBoundResult& r : results) {
    if (r.status == BoundStatus::NoSolution) return kExitNoSolution;
  }
  return kExitOk;
}

int run_scan(const RunConfig& c, std::ostream& out) {
  const BoundConfig config = bound_config(c);
  const Real theta = emm_theta(single_theta(c));
  const std::vector<ScanPoint> points = scan_energies(theta, config.e_min, config.e_max, config.step, config.scan);
  if (c.format == OutputFormat::Json) {
    write_scan_json(out, theta, points);
  } else {
    write_scan_csv(out, theta, points);
  }
  return kExitOk;
}

int run_oracle(const RunConfig& c, std::ostream& out) {
  const double theta = oracle_theta(single_theta(c));
  const GroundEnergy g = find_ground_energy_complex(theta);
  std::optional<Complex> functional;
  std::optional<WavefunctionGrid> grid;
  if (theta == 0.0 || !c.grid_out.empty()) grid = solve_grid(theta, g.energy.real());
  if (theta == 0.0) functional = energy_functional(*grid);
  if (!c.grid_out.empty()) {
    std::ofstream dump(c.grid_out);
    if (!dump) throw ConfigError("cannot write grid dump '" + c.grid_out + "'");
    write_grid_csv(dump, *grid);
  }

  std::ostringstream e0;
  e0 << std::fixed << std::setprecision(8) << g.energy.real();
  if (c.format == OutputFormat::Json) {
    out << "{\n  \"theta\": " << std::setprecision(6) << std::fixed << theta << ",\n  \"E0\": " << e0.str()
        << ",\n  \"wronskian\": " << std::scientific << std::setprecision(3) << g.residual
        << ",\n  \"iterations\": " << g.iterations;
    if (functional) {
      out << ",\n  \"functional\": [" << std::fixed << std::setprecision(8) << functional->real() << ", "
          << std::scientific << std::setprecision(3) << functional->imag() << "]";
    }
    out << "\n}\n";
  } else {
    out << "theta,E0,wronskian,iterations" << (functional ? ",functional_re,functional_im" : "") << '\n';
    out << std::fixed << std::setprecision(6) << theta << ',' << e0.str() << ',' << std::scientific
        << std::setprecision(3) << g.residual << ',' << g.iterations;
    if (functional) {
      out << ',' << std::fixed << std::setprecision(8) << functional->real() << ',' << std::scientific
          << std::setprecision(3) << functional->imag();
    }
    out << '\n';
  }
  return kExitOk;
}

int run_validate(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const double theta = oracle_theta(single_theta(c));
  const OracleValidation v = validate_oracle(theta, c.energy_offset);
  write_validation_json(out, v.report);
  if (const CheckResult* f = v.report.first_failure()) {
    err << "validate: check '" << f->name << "' failed: norm " << std::scientific << std::setprecision(3) << f->norm
        << " > threshold " << f->threshold;
    if (!f->detail.empty()) err << " (" << f->detail << ')';
    err << '\n';
    return kExitValidate;
  }
  return kExitOk;
}

}  // namespace

std::vector<std::string> split_theta_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  for (char ch : text + ",") {
    if (ch == ',' || ch == ' ' || ch == '\t') {
      if (!item.empty()) out.push_back(item);
      item.clear();
    } else {
      item.push_back(ch);
    }
  }
  return out;
}

void apply_config_text(RunConfig& config, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  for (int number = 1; std::getline(in, line); ++number) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("line " + std::to_string(number) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw std::invalid_argument("line " + std::to_string(number) + ": empty key");
    try {
      apply_key(config, key, value);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("line " + std::to_string(number) + ": " + e.what());
    }
  }
}

int run_command(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    check_common(config);
    ensure_working_digits(config.precision_digits);

    std::ofstream file;
    std::ostream* sink = &out;
    if (!config.out.empty()) {
      file.open(config.out);
      if (!file) throw ConfigError("cannot open output '" + config.out + "'");
      sink = &file;
    }

    switch (config.command) {
      case Command::Table: {
        if (config.theta_list_given && config.thetas.empty()) throw ConfigError("theta list is empty");
        return run_bounds(config, *sink, config.thetas.empty() ? kDefaultThetas : config.thetas);
      }
      case Command::Bound: return run_bounds(config, *sink, {single_theta(config)});
      case Command::Scan: return run_scan(config, *sink);
      case Command::Oracle: return run_oracle(config, *sink);
      case Command::Validate: return run_validate(config, *sink, err);
    }
  } catch (const ConfigError& e) {
    err << "emm: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    err << "emm: " << e.what() << '\n';
    switch (e.code()) {
      case ErrorCode::NoConvergence:
      case ErrorCode::ComplexEnergy:
      case ErrorCode::Overflow:
      case ErrorCode::QuadratureUnconverged: return kExitOracle;
      case ErrorCode::SingularSubgrid: return kExitValidate;
      default: return kExitConfig;
    }
  }
  return kExitConfig;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig config;
  if (const char* env = std::getenv("EMM_PRECISION_DIGITS"); env != nullptr && *env != '\0') {
    try {
      config.precision_digits = parse_int("EMM_PRECISION_DIGITS", env);
    } catch (const std::invalid_argument& e) {
      err << "emm: " << e.what() << '\n';
      return kExitConfig;
    }
  }

  CLI::App app{"Ground-state energy bounds for p^2 - i x^3 by Hankel positivity on a rotated contour", "emm"};
  app.fallthrough();
  app.require_subcommand(1);
  std::string config_path, theta, theta_list, e_min, e_max, step, tol, out_path, format, grid_out;
  int p_max = 0, digits = 0, budget = 0, threads = 0;
  double offset = 0;
  app.add_option("--config", config_path, "key=value configuration file");
  auto* o_theta = app.add_option("--theta", theta, "rotation angle");
  auto* o_list = app.add_option("--theta-list", theta_list, "comma-separated angles for `table`");
  auto* o_pmax = app.add_option("--pmax", p_max, "highest moment order (even)");
  auto* o_digits = app.add_option("--digits", digits, "working precision in decimal digits");
  auto* o_emin = app.add_option("--emin", e_min, "scan window start");
  auto* o_emax = app.add_option("--emax", e_max, "scan window end");
  auto* o_step = app.add_option("--step", step, "coarse scan spacing");
  auto* o_tol = app.add_option("--tol", tol, "edge bisection tolerance");
  auto* o_budget = app.add_option("--budget", budget, "cutting-plane rounds per energy");
  auto* o_threads = app.add_option("--threads", threads, "worker threads, 0 for all cores");
  auto* o_out = app.add_option("--out", out_path, "output file (default standard output)");
  auto* o_format = app.add_option("--format", format, "csv or json");
  auto* o_offset = app.add_option("--energy-offset", offset, "relative energy perturbation (validate)");
  auto* o_grid = app.add_option("--grid-out", grid_out, "oracle wavefunction dump (CSV)");

  const std::pair<const char*, Command> commands[] = {
      {"bound", Command::Bound},   {"scan", Command::Scan},   {"oracle", Command::Oracle},
      {"validate", Command::Validate}, {"table", Command::Table},
  };
  const char* help[] = {"bracket the ground-state energy at one angle", "feasibility verdicts on an energy grid",
                        "shooting reference energy", "density-relation and moment-chain residuals",
                        "brackets for a list of angles"};
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < std::size(commands); ++i) subs.push_back(app.add_subcommand(commands[i].first, help[i]));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "emm: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw std::invalid_argument("cannot read config file '" + config_path + "'");
      std::stringstream text;
      text << in.rdbuf();
      apply_config_text(config, text.str());
    }
    if (o_theta->count() > 0) config.thetas = {theta};
    if (o_list->count() > 0) {
      config.thetas = split_theta_list(theta_list);
      config.theta_list_given = true;
    }
    if (o_pmax->count() > 0) config.p_max = p_max;
    if (o_digits->count() > 0) config.precision_digits = digits;
    if (o_emin->count() > 0) config.e_min = e_min;
    if (o_emax->count() > 0) config.e_max = e_max;
    if (o_step->count() > 0) config.step = step;
    if (o_tol->count() > 0) config.bisect_tol = tol;
    if (o_budget->count() > 0) config.cut_budget = budget;
    if (o_threads->count() > 0) config.threads = threads;
    if (o_out->count() > 0) config.out = out_path;
    if (o_format->count() > 0) config.format = parse_format(format);
    if (o_offset->count() > 0) config.energy_offset = offset;
    if (o_grid->count() > 0) config.grid_out = grid_out;
  } catch (const std::invalid_argument& e) {
    err << "emm: " << e.what() << '\n';
    return kExitConfig;
  }

  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (subs[i]->parsed()) config.command = commands[i].second;
  }
  if (config.command != Command::Validate && config.energy_offset != 0.0) {
    err << "emm: --energy-offset applies to validate only\n";
    return kExitConfig;
  }
  return run_command(config, out, err);
}

}  // namespace emm::cli
