#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>
#include <json.hpp>

// End-to-end checks of the command-line binary: exit codes, report shape,
// CSV exports, and run-to-run determinism. The binary path arrives through
// the UCCERT_CLI_PATH environment variable set by the test harness.

namespace {

using nlohmann::ordered_json;

std::string cli_path() {
  if (const char* env = std::getenv("UCCERT_CLI_PATH_OVERRIDE")) return env;
#ifdef UCCERT_CLI_PATH
  return UCCERT_CLI_PATH;
#else
  FAIL("UCCERT_CLI_PATH was not provided at build time");
  return "";
#endif
}

struct CliRun {
  int exit_code = -1;
  std::string output;
};

/// Runs `<cli> <args>` and captures one stream: stdout by default,
/// stderr when capture_stderr is set (stdout is then discarded).
CliRun run_cli(const std::string& args, bool capture_stderr = false) {
  const std::string redirect = capture_stderr ? " 2>&1 1>/dev/null" : " 2>/dev/null";
  const std::string command = cli_path() + " " + args + redirect;
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliRun run;
  std::array<char, 4096> buffer{};
  std::size_t n = 0;
  while ((n = std::fread(buffer.data(), 1, buffer.size(), pipe)) > 0) {
    run.output.append(buffer.data(), n);
  }
  const int status = pclose(pipe);
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  run.exit_code = WEXITSTATUS(status);
  return run;
}

ordered_json parse_report(const CliRun& run) {
  REQUIRE_FALSE(run.output.empty());
  return ordered_json::parse(run.output);
}

/// Drops every wall-clock field so two runs of the same command compare equal.
void scrub_timings(ordered_json& j) {
  if (j.is_object()) {
    j.erase("wall_time_s");
    j.erase("runtime_s");
    for (auto& item : j.items()) scrub_timings(item.value());
  } else if (j.is_array()) {
    for (auto& v : j) scrub_timings(v);
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int count_lines(const std::string& text) {
  int lines = 0;
  for (char c : text) {
    if (c == '\n') ++lines;
  }
  return lines;
}

}  // namespace

TEST_CASE("constants: exit 0 and a manifest-led passing report") {
  const CliRun run = run_cli("constants");
  CHECK(run.exit_code == 0);
  const ordered_json report = parse_report(run);
  REQUIRE(report.contains("manifest"));
  CHECK(report.begin().key() == "manifest");
  CHECK(report["manifest"]["subcommand"] == "constants");
  CHECK(report["manifest"].contains("toolkit_version"));
  CHECK(report["pass"] == true);
  CHECK(report["failed_predicates"].empty());
  CHECK(report["constants"].contains("c_star"));
  CHECK(report["constants"].contains("c_prime"));
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(run_cli("frobnicate").exit_code == 2);
  CHECK(run_cli("verify-psd-grid --sep 0.0003").exit_code == 2);
  CHECK(run_cli("verify-psd-grid --sep 0.25 --degrees 0,0 --kernel iid").exit_code == 2);
  CHECK(run_cli("verify-psd-grid --sep 0.25 --kernel banana").exit_code == 2);
  CHECK(run_cli("optimize").exit_code == 2);  // --c is required
  CHECK(run_cli("optimize --c 0.6 --starts 5").exit_code == 2);
  CHECK(run_cli("optimize --c 0.3827 --beta banana --starts 5").exit_code == 2);
  CHECK(run_cli("maxcorr --points 2").exit_code == 2);
}

TEST_CASE("--help exits 0") {
  CHECK(run_cli("--help").exit_code == 0);
  CHECK(run_cli("optimize --help").exit_code == 0);
}

TEST_CASE("a failed numeric predicate exits 1 and names the predicate on stderr") {
  const std::string args = "optimize --c 0.3830 --beta paper --starts 60 --seed 0";
  const CliRun out = run_cli(args);
  CHECK(out.exit_code == 1);
  const ordered_json report = parse_report(out);
  CHECK(report["pass"] == false);
  REQUIRE(report["failed_predicates"].is_array());
  REQUIRE_FALSE(report["failed_predicates"].empty());
  CHECK(report["certification"]["min_ratio"].get<double>() < 1.0);

  const CliRun err = run_cli(args, /*capture_stderr=*/true);
  CHECK(err.exit_code == 1);
  CHECK(err.output.find("FAIL: min_ratio >= 1 - 1e-6") != std::string::npos);
}

TEST_CASE("optimize reports are bit-identical across runs once timings are dropped") {
  const std::string args = "optimize --c 0.3827 --beta paper --starts 25 --seed 7";
  ordered_json first = parse_report(run_cli(args));
  ordered_json second = parse_report(run_cli(args));
  scrub_timings(first);
  scrub_timings(second);
  CHECK(first.dump() == second.dump());
  CHECK(first["certification"]["min_ratio"].get<double>() >= 1.0 - 1e-6);
}

TEST_CASE("verify-psd-grid: desk default and explicit coarse runs certify") {
  const CliRun desk = run_cli("verify-psd-grid --desk");
  CHECK(desk.exit_code == 0);
  const ordered_json desk_report = parse_report(desk);
  CHECK(desk_report["manifest"]["parameters"]["sep"] == "0.004");
  CHECK(desk_report["grid_check"]["certified"] == true);

  const CliRun coarse = run_cli("verify-psd-grid --sep 0.05 --kernel iid --degrees 0,1");
  CHECK(coarse.exit_code == 0);
  const ordered_json coarse_report = parse_report(coarse);
  CHECK(coarse_report["grid_check"]["certified"] == true);
  CHECK(coarse_report["grid_check"]["min_eig"].get<double>() >= -1e-10);
}

TEST_CASE("verify-psd-series: desk runs exact order 20, default runs 29+90") {
  const CliRun desk = run_cli("verify-psd-series --desk");
  CHECK(desk.exit_code == 0);
  const ordered_json desk_report = parse_report(desk);
  REQUIRE(desk_report["runs"].size() == 1);
  CHECK(desk_report["runs"][0]["order"] == 20);
  CHECK(desk_report["runs"][0]["engine"] == "exact");
  CHECK(desk_report["runs"][0]["certified"] == true);
  CHECK(desk_report["closed_form_comparison"]["log_half_agrees"] == true);

  const CliRun full = run_cli("verify-psd-series");
  CHECK(full.exit_code == 0);
  const ordered_json full_report = parse_report(full);
  REQUIRE(full_report["runs"].size() == 2);
  CHECK(full_report["runs"][0]["order"] == 29);
  CHECK(full_report["runs"][0]["engine"] == "exact");
  CHECK(full_report["runs"][1]["order"] == 90);
  CHECK(full_report["runs"][1]["engine"] == "float");
  CHECK(full_report["runs"][1]["certified"] == true);

  const CliRun single = run_cli("verify-psd-series --L 12 --exact");
  CHECK(single.exit_code == 0);
  const ordered_json single_report = parse_report(single);
  REQUIRE(single_report["runs"].size() == 1);
  CHECK(single_report["runs"][0]["order"] == 12);
  CHECK(single_report["runs"][0]["exact"] == true);
}

TEST_CASE("maxcorr: --out writes the report file and --csv writes the scan grid") {
  const std::string out_path = "cli_maxcorr_tmp.json";
  const std::string csv_path = "cli_maxcorr_tmp.csv";
  const CliRun run =
      run_cli("maxcorr --out " + out_path + " --csv " + csv_path);
  CHECK(run.exit_code == 0);
  CHECK(run.output.empty());  // report went to the file, not stdout

  const ordered_json report = ordered_json::parse(read_file(out_path));
  CHECK(report["pass"] == true);
  CHECK(report["manifest"]["outputs"].size() == 2);
  CHECK(report["scan"]["max_lhs_on_open_interval"].get<double>() < 0.0);

  const std::string csv = read_file(csv_path);
  CHECK(csv.rfind("rho,lhs\n", 0) == 0);
  CHECK(count_lines(csv) == 1000);  // header + 999 grid rows

  std::remove(out_path.c_str());
  std::remove(csv_path.c_str());
}

TEST_CASE("beta-sweep: full grid, best point, and CSV export") {
  const std::string csv_path = "cli_sweep_tmp.csv";
  const CliRun run = run_cli("beta-sweep --points 5 --csv " + csv_path);
  CHECK(run.exit_code == 0);
  const ordered_json report = parse_report(run);
  REQUIRE(report["sweep"].size() == 5);
  CHECK(report["sweep"][0]["beta"] == 0.0);
  CHECK(report["sweep"][4]["beta"] == 1.0);
  CHECK(report["best"].contains("beta"));
  CHECK(report["best"].contains("min_ratio"));

  const std::string csv = read_file(csv_path);
  CHECK(csv.rfind("beta,x_min,min_ratio\n", 0) == 0);
  CHECK(count_lines(csv) == 6);
  std::remove(csv_path.c_str());
}

TEST_CASE("prop1-check: random-measure property test passes") {
  const CliRun run = run_cli("prop1-check --samples 500 --seed 0");
  CHECK(run.exit_code == 0);
  const ordered_json report = parse_report(run);
  CHECK(report["pass"] == true);
  CHECK(report["samples"] == 500);
  CHECK(report["max_violation"].get<double>() <= 1e-9);
  CHECK(report["manifest"]["parameters"]["samples"] == 500);
}
