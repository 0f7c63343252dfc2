// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "config.hpp"

using namespace mlmcmc::cli;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "mlmcmc_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(MLMCMC_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  return std::system(cmd.c_str());
}

}  // namespace

TEST_CASE("defaults match the experiment settings of record") {
  const RunConfig cfg;
  CHECK(cfg.alpha0 == 1.0);
  CHECK(cfg.kappa0 == 0.1);
  CHECK(cfg.lambda == 1000.0);
  CHECK(cfg.m0 == 8);
  CHECK(cfg.epsilon_grid == std::vector<double>{0.04, 0.02, 0.01, 0.005});
  cfg.validate();
}

TEST_CASE("empty config file keeps every default") {
  const fs::path dir = temp_dir("empty_cfg");
  write_file(dir / "cfg.json", "{}");
  RunConfig cfg;
  load_config_file(cfg, (dir / "cfg.json").string());
  CHECK(cfg.alpha0 == 1.0);
  CHECK(cfg.kappa0 == 0.1);
  CHECK(cfg.lambda == 1000.0);
  CHECK(cfg.m0 == 8);
}

TEST_CASE("domain violations name the field") {
  RunConfig cfg;
  cfg.lambda = -1.0;
  try {
    cfg.validate();
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("lambda") != std::string::npos);
  }
}

TEST_CASE("unknown config keys are rejected by name") {
  const fs::path dir = temp_dir("unknown_key");
  write_file(dir / "cfg.json", R"({"lambdaa": 10})");
  RunConfig cfg;
  try {
    load_config_file(cfg, (dir / "cfg.json").string());
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("lambdaa") != std::string::npos);
  }
}

TEST_CASE("flags override file values") {
  const fs::path dir = temp_dir("override");
  write_file(dir / "cfg.json", R"({"seed": 111, "levels": 4})");
  RunConfig cfg;
  load_config_file(cfg, (dir / "cfg.json").string());
  FlagOverrides flags;
  flags.seed = 222;
  apply_overrides(cfg, flags);
  CHECK(cfg.seed == 222);
  CHECK(cfg.levels == 4);  // untouched by flags
}

TEST_CASE("cli: simulate-data is byte-reproducible") {
  const fs::path dir = temp_dir("cli_sim");
  REQUIRE(run_cli("simulate-data --seed 5 --out " + (dir / "a").string()) == 0);
  REQUIRE(run_cli("simulate-data --seed 5 --out " + (dir / "b").string()) == 0);
  CHECK(read_file(dir / "a" / "data.csv") == read_file(dir / "b" / "data.csv"));
  CHECK(!read_file(dir / "a" / "data.csv").empty());
}

TEST_CASE("cli: rates emits one row per studied level plus slopes") {
  const fs::path dir = temp_dir("cli_rates");
  write_file(dir / "cfg.json",
             R"({"levels": 6, "sweeps_per_level": 200, "level0_steps": 400})");
  REQUIRE(run_cli("rates --config " + (dir / "cfg.json").string() + " --seed 3 --out " +
                  (dir / "r").string()) == 0);
  const std::string csv = read_file(dir / "r" / "rates.csv");
  CHECK(csv.rfind("level,h_l,var,var_se,bias,bias_se\n", 0) == 0);
  std::size_t rows = 0;
  for (char c : csv)
    if (c == '\n') ++rows;
  CHECK(rows == 7);  // header + levels 1..6
  const std::string manifest = read_file(dir / "r" / "manifest.json");
  CHECK(manifest.find("variance_slope_beta_hat") != std::string::npos);
  CHECK(manifest.find("bias_slope_rho_hat") != std::string::npos);
}

TEST_CASE("cli: reruns with one seed are byte-identical") {
  const fs::path dir = temp_dir("cli_repro");
  write_file(dir / "cfg.json",
             R"({"levels": 3, "sweeps_per_level": 150, "level0_steps": 300})");
  const std::string base = "rates --config " + (dir / "cfg.json").string() + " --seed 11 --out ";
  REQUIRE(run_cli(base + (dir / "x").string()) == 0);
  REQUIRE(run_cli(base + (dir / "y").string()) == 0);
  CHECK(read_file(dir / "x" / "rates.csv") == read_file(dir / "y" / "rates.csv"));
}

TEST_CASE("cli: invalid config fails with a nonzero exit") {
  const fs::path dir = temp_dir("cli_bad");
  write_file(dir / "cfg.json", R"({"lambda": -1})");
  CHECK(run_cli("rates --config " + (dir / "cfg.json").string() + " --out " +
                (dir / "out").string()) != 0);
}

TEST_CASE("cli: missing output directories are created, unwritable ones fail") {
  const fs::path dir = temp_dir("cli_out");
  const fs::path nested = dir / "a" / "b" / "c";
  REQUIRE(run_cli("simulate-data --seed 1 --out " + nested.string()) == 0);
  CHECK(fs::exists(nested / "data.csv"));

  write_file(dir / "blocker", "");
  CHECK(run_cli("simulate-data --seed 1 --out " + (dir / "blocker" / "sub").string()) != 0);
}

TEST_CASE("cli: reuse mode requires the data file to exist") {
  const fs::path dir = temp_dir("cli_reuse");
  CHECK(run_cli("rates --data " + (dir / "nope.csv").string() + " --out " +
                (dir / "out").string()) != 0);

  // Generate, then reuse: identical results to generating from the seed.
  REQUIRE(run_cli("simulate-data --seed 21 --out " + (dir / "d").string()) == 0);
  write_file(dir / "cfg.json",
             R"({"levels": 3, "sweeps_per_level": 100, "level0_steps": 200})");
  const std::string common = "rates --config " + (dir / "cfg.json").string() + " --seed 21 ";
  REQUIRE(run_cli(common + "--out " + (dir / "gen").string()) == 0);
  REQUIRE(run_cli(common + "--data " + (dir / "d" / "data.csv").string() + " --out " +
                  (dir / "reused").string()) == 0);
  CHECK(read_file(dir / "gen" / "rates.csv") == read_file(dir / "reused" / "rates.csv"));
}
