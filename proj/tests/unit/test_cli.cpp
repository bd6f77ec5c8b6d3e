#include "cli.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace emm::cli;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "emm");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Outcome o;
  o.code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

std::string data(const char* name) { return std::string(EMM_TEST_DATA_DIR) + "/" + name; }

}  // namespace

TEST_CASE("config text parsing") {
  RunConfig c;
  apply_config_text(c, "# comment\n p_max = 24 \ntheta_list = 0.01, 0.05 0.1\nformat=json\n\n");
  CHECK(c.p_max == 24);
  CHECK(c.thetas == std::vector<std::string>{"0.01", "0.05", "0.1"});
  CHECK(c.theta_list_given);
  CHECK(c.format == OutputFormat::Json);
  CHECK_THROWS_AS(apply_config_text(c, "p_max 24"), std::invalid_argument);
  CHECK_THROWS_AS(apply_config_text(c, "p_max = 2x"), std::invalid_argument);
  CHECK_THROWS_AS(apply_config_text(c, "format = xml"), std::invalid_argument);
  CHECK(split_theta_list(" , ").empty());
}

TEST_CASE("configuration errors exit 1") {
  CHECK(invoke({"table", "--theta-list", ""}).code == kExitConfig);
  const Outcome reject = invoke({"table", "--theta-list", "0.05,0.35"});
  CHECK(reject.code == kExitConfig);
  CHECK(reject.err.find("REJECT_ANGLE") != std::string::npos);
  CHECK(invoke({"bound", "--theta", "0"}).code == kExitConfig);
  CHECK(invoke({"scan", "--theta", "0.3142"}).code == kExitConfig);
  CHECK(invoke({"oracle", "--theta", "0.4"}).code == kExitConfig);
  CHECK(invoke({"oracle", "--config", data("malformed.cfg")}).code == kExitConfig);
  CHECK(invoke({"oracle", "--config", data("unknown_key.cfg")}).code == kExitConfig);
  CHECK(invoke({"oracle", "--config", data("missing.cfg")}).code == kExitConfig);
  CHECK(invoke({"bound", "--theta", "0.05", "--pmax", "15"}).code == kExitConfig);
  CHECK(invoke({"bound", "--theta", "0.05", "--emin", "2", "--emax", "1"}).code == kExitConfig);
  CHECK(invoke({"oracle", "--theta", "0.05", "--energy-offset", "0.01"}).code == kExitConfig);
  CHECK(invoke({"oracle", "--theta", "0.05", "--format", "xml"}).code == kExitConfig);
  CHECK(invoke({"frobnicate"}).code == kExitConfig);
  CHECK(invoke({}).code == kExitConfig);
}

TEST_CASE("oracle command") {
  const Outcome o = invoke({"oracle", "--config", data("oracle_theta05.cfg")});
  CHECK(o.code == kExitOk);
  CHECK(o.out.find("0.050000,1.15626707,") != std::string::npos);

  const Outcome real_line = invoke({"oracle", "--theta", "0", "--format", "json"});
  CHECK(real_line.code == kExitOk);
  CHECK(real_line.out.find("\"E0\": 1.15626707") != std::string::npos);
  CHECK(real_line.out.find("\"functional\": [1.15626707") != std::string::npos);

  // Flags win over the file.
  CHECK(invoke({"oracle", "--config", data("rejected_angle.cfg"), "--theta", "0.02"}).code == kExitOk);
  CHECK(invoke({"oracle", "--config", data("rejected_angle.cfg")}).code == kExitConfig);

  const auto dump = std::filesystem::temp_directory_path() / "emm_cli_grid.csv";
  CHECK(invoke({"oracle", "--theta", "0.05", "--grid-out", dump.string()}).code == kExitOk);
  std::ifstream in(dump);
  std::string header;
  std::getline(in, header);
  CHECK(header == "xi,re_psi,im_psi,re_dpsi,im_dpsi");
  std::filesystem::remove(dump);
}

TEST_CASE("validate command") {
  const Outcome ok = invoke({"validate", "--theta", "0.05"});
  CHECK(ok.code == kExitOk);
  CHECK(ok.out.find("\"mhat_reconstruction\"") != std::string::npos);
  const Outcome bad = invoke({"validate", "--theta", "0.05", "--energy-offset", "0.01"});
  CHECK(bad.code == kExitValidate);
  CHECK(bad.err.find("'sigma1'") != std::string::npos);
  CHECK(invoke({"validate", "--theta", "0.30"}).code == kExitOk);
  CHECK(invoke({"validate", "--theta", "0"}).code == kExitOk);
}

TEST_CASE("precision from the environment, overridden by flags") {
  setenv("EMM_PRECISION_DIGITS", "abc", 1);
  CHECK(invoke({"oracle", "--theta", "0.05"}).code == kExitConfig);
  setenv("EMM_PRECISION_DIGITS", "20", 1);
  CHECK(invoke({"scan", "--theta", "0.05", "--pmax", "16", "--emin", "1.0", "--emax", "1.1", "--step", "0.1"}).code ==
        kExitConfig);
  CHECK(invoke({"scan", "--theta", "0.05", "--pmax", "16", "--emin", "1.0", "--emax", "1.1", "--step", "0.1",
                "--digits", "100"})
            .code == kExitOk);
  unsetenv("EMM_PRECISION_DIGITS");
}

TEST_CASE("scan command lists verdicts in energy order") {
  const Outcome o = invoke({"scan", "--theta", "0.05", "--pmax", "16", "--emin", "0.6", "--emax", "1.2", "--step", "0.3"});
  REQUIRE(o.code == kExitOk);
  std::istringstream in(o.out);
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "theta,E,p_max,verdict,iterations,cuts,budget_exhausted");
  CHECK(lines[1].starts_with("0.050000,0.60000000,16,INFEASIBLE,"));
  CHECK(lines[2].starts_with("0.050000,0.90000000,16,"));
  CHECK(lines[3].starts_with("0.050000,1.20000000,16,FEASIBLE,"));
}

TEST_CASE("table output is byte-identical across runs") {
  const Outcome a = invoke({"table", "--config", data("small_table.cfg")});
  const Outcome b = invoke({"table", "--config", data("small_table.cfg")});
  REQUIRE(a.code == kExitOk);
  CHECK(a.out == b.out);
  CHECK(a.out.starts_with("theta,E_L,E_U,p_max,width,status\n0.050000,"));
  CHECK(a.out.find(",BOUNDED\n") != std::string::npos);

  const Outcome none = invoke({"bound", "--theta", "0.05", "--pmax", "20", "--emin", "0.5", "--emax", "0.9"});
  CHECK(none.code == kExitNoSolution);
  CHECK(none.out.find("NO_SOLUTION") != std::string::npos);

  const auto path = std::filesystem::temp_directory_path() / "emm_cli_bound.json";
  CHECK(invoke({"bound", "--config", data("small_table.cfg"), "--theta", "0.05", "--format", "json", "--out",
                path.string()})
            .code == kExitOk);
  std::ifstream in(path);
  std::stringstream text;
  text << in.rdbuf();
  CHECK(text.str().find("\"scan_trace\"") != std::string::npos);
  std::filesystem::remove(path);
}
