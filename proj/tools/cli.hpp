#pragma once

// Batch front end. Settings are layered: built-in defaults, then
// EMM_PRECISION_DIGITS, then a key=value config file, then flags.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace emm::cli {

enum class Command { Bound, Scan, Oracle, Validate, Table };
enum class OutputFormat { Csv, Json };

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitNoSolution = 2,
  kExitOracle = 3,
  kExitValidate = 4,
};

/// Numeric fields stay textual until the working precision is known.
struct RunConfig {
  Command command = Command::Table;
  std::vector<std::string> thetas;  // empty for `table` means the default list
  bool theta_list_given = false;    // an explicitly empty list is an error
  int p_max = 40;
  int precision_digits = 100;
  std::string e_min = "0.5";
  std::string e_max = "8.0";
  std::string step = "0.1";
  std::string bisect_tol = "1e-5";
  int cut_budget = 200;
  int threads = 0;
  std::string out;  // empty: standard output
  OutputFormat format = OutputFormat::Csv;
  double energy_offset = 0;  // relative, validate only
  std::string grid_out;      // oracle grid dump
};

inline const std::vector<std::string> kDefaultThetas = {"0.01", "0.05", "0.10", "0.15", "0.20"};

/// Applies `key = value` lines ('#' starts a comment). Throws
/// std::invalid_argument naming the line for anything malformed.
void apply_config_text(RunConfig& config, const std::string& text);

/// Comma- or whitespace-separated list; empty entries are dropped.
std::vector<std::string> split_theta_list(const std::string& text);

/// Parses argv, runs the command, writes results to `out` (or --out) and
/// diagnostics to `err`. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

int run_command(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace emm::cli
