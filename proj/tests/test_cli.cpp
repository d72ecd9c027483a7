#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#ifndef COGMAB_CLI_PATH
#error "COGMAB_CLI_PATH must point at the built binary"
#endif

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string(COGMAB_CLI_PATH) + " " + args + " 2>&1";
  RunResult result;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 512> buf{};
  while (fgets(buf.data(), buf.size(), pipe) != nullptr) result.output += buf.data();
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::filesystem::path temp_dir() {
  auto dir = std::filesystem::temp_directory_path() / "cogmab_cli_test";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("more users than channels is rejected with a named constraint") {
  const RunResult r = run_cli("simulate --users 10 --channels 9 --slots 100 "
                              "--reps 1 --out /dev/null");
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("U") != std::string::npos);
  CHECK(r.output.find("C") != std::string::npos);
}

TEST_CASE("unknown flags are a usage error") {
  const RunResult r = run_cli("simulate --does-not-exist 1 --out /dev/null");
  CHECK(r.exit_code == 2);
}

TEST_CASE("invalid flag values are a usage error") {
  CHECK(run_cli("simulate --feedback bogus --out /dev/null").exit_code == 2);
  CHECK(run_cli("simulate --statistic bogus --out /dev/null").exit_code == 2);
  CHECK(run_cli("bounds --regime bogus").exit_code == 2);
}

TEST_CASE("unknown figure ids list the valid ones") {
  const RunResult r = run_cli("figure bogus");
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("algocomp") != std::string::npos);
  CHECK(r.output.find("fairness") != std::string::npos);
}

TEST_CASE("simulate writes byte-identical CSV for identical flags") {
  const auto dir = temp_dir();
  const auto a = dir / "run_a.csv";
  const auto b = dir / "run_b.csv";
  const std::string flags =
      "simulate --policy rho-rand --users 2 --channels 3 --mu 0.2,0.5,0.8 "
      "--slots 300 --reps 5 --seed 7 ";
  REQUIRE(run_cli(flags + "--out " + a.string()).exit_code == 0);
  REQUIRE(run_cli(flags + "--out " + b.string()).exit_code == 0);
  const std::string contents = read_file(a);
  CHECK(contents == read_file(b));
  CHECK(contents.rfind("slot,metric,mean,stderr,policy,U,C,seed\n", 0) == 0);
  CHECK(contents.find("\r") == std::string::npos);
  CHECK(contents.find(",regret,") != std::string::npos);
  CHECK(contents.find(",collisions,") != std::string::npos);
}

TEST_CASE("the single-user bounds regime rejects multiple users") {
  const RunResult r = run_cli("bounds --regime single --users 4");
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("--users 1") != std::string::npos);
}

TEST_CASE("bounds emits the compositions row") {
  const RunResult r = run_cli("bounds --users 4 --channels 9 --slots 2500");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("compositions_collision_bound,136") != std::string::npos);
  CHECK(r.output.find("lower_distributed_coeff,") != std::string::npos);
}

TEST_CASE("oracle reports the exact settling time and its cap") {
  const RunResult r = run_cli("oracle --users 2 --channels 2 --mc 20000");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("exact solve): 2 slots") != std::string::npos);
  CHECK(r.output.find("compositions: 2 slots") != std::string::npos);
  CHECK(r.output.find("monte carlo") != std::string::npos);
}

TEST_CASE("oracle reports divergence when users outnumber channels") {
  const RunResult r = run_cli("oracle --users 3 --channels 2");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("diverges") != std::string::npos);
}

TEST_CASE("figure command writes the CSV and plot script, reproducibly") {
  const auto dir = temp_dir() / "fig";
  const std::string flags = "figure fairness --reps 20 --seed 3 --out-dir " +
                            dir.string();
  REQUIRE(run_cli(flags).exit_code == 0);
  const std::string first = read_file(dir / "fairness.csv");
  CHECK(first.rfind("user,frequency,count,policy,U,C,seed\n", 0) == 0);
  CHECK(std::filesystem::exists(dir / "fairness_plot.py"));
  REQUIRE(run_cli(flags).exit_code == 0);
  CHECK(read_file(dir / "fairness.csv") == first);
}

TEST_CASE("flags override a config file") {
  const auto dir = temp_dir();
  const auto cfg = dir / "defaults.ini";
  {
    std::ofstream out(cfg);
    out << "simulate.slots=100\nsimulate.seed=9\n";
  }
  const auto a = dir / "cfg_a.csv";
  // The config file sets the horizon; the flag must win for the seed.
  const RunResult r = run_cli("--config " + cfg.string() +
                              " simulate --users 1 --channels 2 --mu 0.3,0.6 "
                              "--reps 2 --seed 5 --out " + a.string());
  REQUIRE(r.exit_code == 0);
  const std::string contents = read_file(a);
  CHECK(contents.find("\n100,regret,") != std::string::npos);  // horizon from file
  CHECK(contents.find(",5\n") != std::string::npos);           // seed from flag
  CHECK(contents.find(",9\n") == std::string::npos);
}
