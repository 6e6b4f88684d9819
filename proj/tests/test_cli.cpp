// Drives the installed command-line binary end to end; the binary path
// arrives as argv[1].
#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "ivxboot/io.hpp"

namespace {

std::string g_cli;

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run(const std::string& args) {
  const std::string cmd = g_cli + " " + args + " 2>&1";
  std::array<char, 4096> buf{};
  RunResult result;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) { result.exit_code = -1; return result; }
  while (fgets(buf.data(), buf.size(), pipe)) result.output += buf.data();
  const int status = pclose(pipe);
  result.exit_code = WEXITSTATUS(status);
  return result;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("unknown subcommand exits 1 with usage text") {
  const RunResult r = run("frobnicate");
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("Usage") != std::string::npos);
}

TEST_CASE("simulate then estimate round trip") {
  const RunResult sim = run("simulate --n 300 --c -5 --beta 0.1 --seed 4 --out /tmp/ivx_pair.csv");
  CHECK(sim.exit_code == 0);

  const RunResult fit = run("estimate --method ivx --input /tmp/ivx_pair.csv");
  CHECK(fit.exit_code == 0);
  CHECK(fit.output.find("beta_hat") != std::string::npos);
  CHECK(fit.output.find("rho_hat") != std::string::npos);
  std::remove("/tmp/ivx_pair.csv");
}

TEST_CASE("estimate recovers the slope exactly on a noiseless pair") {
  ivxboot::dgp::TimeSeriesPair pair;
  const long n = 200;
  pair.x0 = 0.0;
  pair.x.resize(n);
  pair.y.resize(n);
  ivxboot::rng::Stream s(77);
  double prev = 0.0;
  for (long t = 0; t < n; ++t) {
    pair.y[t] = 0.5 * prev;  // exact slope, no noise
    prev = 0.98 * prev + s.next_gaussian();
    pair.x[t] = prev;
  }
  ivxboot::io::write_pair_csv(pair, "/tmp/ivx_exact.csv");
  const RunResult fit = run("estimate --method ivx --input /tmp/ivx_exact.csv");
  CHECK(fit.exit_code == 0);
  CHECK(fit.output.find("beta_hat 0.5\n") != std::string::npos);
  std::remove("/tmp/ivx_exact.csv");
}

TEST_CASE("boot-test reports a p-value") {
  run("simulate --n 200 --c 0 --beta 0 --seed 5 --out /tmp/ivx_bt.csv");
  const RunResult bt =
      run("boot-test --input /tmp/ivx_bt.csv --stat wald-ivx --scheme wild --B 99 --seed 6");
  CHECK(bt.exit_code == 0);
  CHECK(bt.output.find("pvalue") != std::string::npos);
  std::remove("/tmp/ivx_bt.csv");
}

TEST_CASE("limits writes a quantile table") {
  const RunResult r =
      run("limits --kind dfxi --N 256 --M 2000 --seed 7 --out /tmp/ivx_limits.csv");
  CHECK(r.exit_code == 0);
  const std::string table = slurp("/tmp/ivx_limits.csv");
  CHECK(table.rfind("q,value", 0) == 0);
  std::remove("/tmp/ivx_limits.csv");
}

TEST_CASE("mc runs a config and reruns byte-identically") {
  {
    std::ofstream cfg("/tmp/ivx_cfg.json");
    cfg << R"({"experiment": "size", "n": [120], "c": [0], "beta": [0],
               "stat": "wald-ivx", "R": 40, "seed": 12})";
  }
  const RunResult a = run("mc --config /tmp/ivx_cfg.json --out-prefix /tmp/ivx_a");
  CHECK(a.exit_code == 0);
  const RunResult b = run("mc --config /tmp/ivx_cfg.json --out-prefix /tmp/ivx_b");
  CHECK(b.exit_code == 0);
  CHECK(slurp("/tmp/ivx_a.json") == slurp("/tmp/ivx_b.json"));
  CHECK(slurp("/tmp/ivx_a_rows.csv") == slurp("/tmp/ivx_b_rows.csv"));
  for (const char* f : {"/tmp/ivx_cfg.json", "/tmp/ivx_a.json", "/tmp/ivx_b.json",
                        "/tmp/ivx_a_rows.csv", "/tmp/ivx_b_rows.csv", "/tmp/ivx_a_cells.csv",
                        "/tmp/ivx_b_cells.csv"})
    std::remove(f);
}

TEST_CASE("config errors exit 2") {
  {
    std::ofstream cfg("/tmp/ivx_bad.json");
    cfg << R"({"gamma_z": 1.5})";
  }
  const RunResult r = run("mc --config /tmp/ivx_bad.json --out-prefix /tmp/ivx_bad");
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("gamma_z") != std::string::npos);
  std::remove("/tmp/ivx_bad.json");
}

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: test_cli <path-to-cli-binary>\n");
    return 2;
  }
  g_cli = argv[1];
  doctest::Context context;
  int filtered_argc = 1;
  context.applyCommandLine(filtered_argc, argv);
  return context.run();
}
