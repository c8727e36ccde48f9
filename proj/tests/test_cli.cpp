#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "smallcell/config.hpp"

using namespace smallcell;

#ifndef SMALLCELL_CLI_PATH
#error "SMALLCELL_CLI_PATH must be defined by the build"
#endif

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

RunResult run_cli(const std::string& args) {
  static int counter = 0;
  const std::string out_path =
      "cli_test_out_" + std::to_string(counter++) + ".txt";
  const std::string command = std::string(SMALLCELL_CLI_PATH) + " " + args +
                              " > " + out_path + " 2>&1";
  const int status = std::system(command.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = slurp(out_path);
  std::remove(out_path.c_str());
  return result;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace

TEST_CASE("sir-cdf produces a monotone analytic column") {
  const auto result = run_cli(
      "sir-cdf --all-active --m-max 1 --n 1 --theta-grid -10 20 16");
  REQUIRE(result.exit_code == 0);
  CHECK(result.out.find("# smallcell-csv v1") != std::string::npos);
  CHECK(result.out.find("theta_db,theta_linear,f_sir_analytic") !=
        std::string::npos);
  const auto rows = parse_csv(result.out);
  REQUIRE(rows.size() == 17);  // header row + 16 data rows
  double previous = -1.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double f = std::stod(rows[i][2]);
    CHECK(f >= previous);
    CHECK(f <= 1.0);
    previous = f;
  }
}

TEST_CASE("sir-cdf saturated baseline hits the closed form at 0 dB") {
  const auto result = run_cli(
      "sir-cdf --all-active --m-max 1 --n 1 --theta-grid 0 1 2");
  REQUIRE(result.exit_code == 0);
  const auto rows = parse_csv(result.out);
  REQUIRE(rows.size() >= 2);
  const double f0 = std::stod(rows[1][2]);
  CHECK(std::abs(f0 - 0.43990) < 1e-4);
}

TEST_CASE("more subchannels lower the SIR outage at 0 dB") {
  const std::string common =
      " --ratio 10 --m-max 1 --scheme scheme1 --pmf-method mc "
      "--pmf-samples 100000 --seed 42 --theta-grid 0 1 2";
  const auto n5 = run_cli("sir-cdf --n 5" + common);
  const auto n50 = run_cli("sir-cdf --n 50" + common);
  REQUIRE(n5.exit_code == 0);
  REQUIRE(n50.exit_code == 0);
  const double f5 = std::stod(parse_csv(n5.out)[1][2]);
  const double f50 = std::stod(parse_csv(n50.out)[1][2]);
  CHECK(f50 < f5);
}

TEST_CASE("invalid configuration exits with code 2") {
  CHECK(run_cli("sir-cdf --alpha 1.5").exit_code == 2);
  CHECK(run_cli("sir-cdf --scheme bogus").exit_code == 2);
  CHECK(run_cli("rate-cdf --ratio -4").exit_code == 2);
  CHECK(run_cli("sir-cdf --config does_not_exist.json").exit_code == 2);
  // exact pmf demanded where enumeration is impossible
  CHECK(run_cli("rate-cdf --ratio 10 --n 50 --pmf-method exact").exit_code ==
        2);
}

TEST_CASE("dump-config round trip reproduces identical output") {
  const std::string flags =
      "--ratio 6 --n 7 --m-max 2 --scheme scheme2 --pmf-method mc "
      "--pmf-samples 20000 --seed 99 --theta-grid -5 5 6";
  const auto dump = run_cli("sir-cdf " + flags + " --dump-config");
  REQUIRE(dump.exit_code == 0);
  const SystemConfig parsed = config_from_json_text(dump.out);
  CHECK(parsed.n == 7);
  CHECK(parsed.scheme == SchemeId::Scheme2);

  const std::string config_path = "cli_roundtrip_config.json";
  {
    std::ofstream out(config_path);
    out << dump.out;
  }
  const auto direct = run_cli("sir-cdf " + flags);
  const auto via_config = run_cli("sir-cdf --config " + config_path);
  std::remove(config_path.c_str());
  REQUIRE(direct.exit_code == 0);
  REQUIRE(via_config.exit_code == 0);
  CHECK(direct.out == via_config.out);
}

TEST_CASE("simulate emits curves, diagnostics and sample dumps") {
  const std::string samples_path = "cli_samples.csv";
  const auto result = run_cli(
      "simulate --ratio 5 --n 4 --m-max 2 --scheme scheme2 --radius 10 "
      "--mc-samples 150 --seed 7 --theta-grid -5 5 3 --rate-grid 0.01 0.3 4 "
      "--dump-samples " +
      samples_path);
  REQUIRE(result.exit_code == 0);
  CHECK(result.out.find("# activity_estimate=") != std::string::npos);
  const auto rows = parse_csv(result.out);
  REQUIRE(rows.size() == 1 + 3 + 4);  // header + sir rows + rate rows
  for (std::size_t i = 1; i < rows.size(); ++i) {
    REQUIRE(rows[i].size() == 5);
    const double value = std::stod(rows[i][2]);
    const double lo = std::stod(rows[i][3]);
    const double hi = std::stod(rows[i][4]);
    CHECK(lo <= value + 1e-12);
    CHECK(value <= hi + 1e-12);
    CHECK(lo >= 0.0);
    CHECK(hi <= 1.0);
  }

  const std::string samples = slurp(samples_path);
  std::remove(samples_path.c_str());
  CHECK(samples.find("seed,sir,k0,m,rate") != std::string::npos);
  int lines = 0;
  for (char ch : samples) lines += ch == '\n';
  CHECK(lines == 151);  // header + one record per realization
}

TEST_CASE("optimize reports the n=1 reference") {
  const auto result = run_cli(
      "optimize --all-active --m-max 1 --r0 1.9 --n-max 5 --seed 3");
  REQUIRE(result.exit_code == 0);
  const auto rows = parse_csv(result.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1][0] == "1.9");
  CHECK(std::stoi(rows[1][1]) == 1);
  CHECK(std::stod(rows[1][2]) <= std::stod(rows[1][3]) + 1e-12);
}

TEST_CASE("activity matches the library closed form") {
  const auto result = run_cli("activity --ratio 10 --n 4 --m-max 2");
  REQUIRE(result.exit_code == 0);
  const auto rows = parse_csv(result.out);
  REQUIRE(rows.size() == 2);
  const LoadPmf load = cell_load_pmf(10.0, 3.5, SystemConfig{}.k_max);
  const double expected =
      subchannel_activity_probability(SchemeId::Scheme1, load, 4, 2);
  CHECK(std::stod(rows[1][4]) == doctest::Approx(expected).epsilon(1e-9));
}
