#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "ivxboot/io.hpp"

using namespace ivxboot;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempFile {
  std::string path;
  explicit TempFile(std::string p) : path(std::move(p)) {}
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("minimal config fills the documented defaults") {
  const auto cfg = io::parse_config_text(
      R"({"experiment": "size", "n": [250], "c": [0], "beta": [0], "R": 100, "seed": 1})");
  CHECK(cfg.b_count == 399);
  CHECK(cfg.alpha == 0.05);
  CHECK(cfg.ivx.c_z == -1.0);
  CHECK(cfg.ivx.gamma_z == 0.95);
  CHECK(cfg.replications == 100);
  CHECK(cfg.seed == 1);
  CHECK(cfg.config_digest != 0);
  CHECK(!cfg.scheme.has_value());
}

TEST_CASE("schema violations name the offending key") {
  CHECK_THROWS_WITH_AS(io::parse_config_text(R"({"gamma_z": 1.5})"),
                       "gamma_z: must lie in (0,1)", ConfigError);
  CHECK_THROWS_WITH_AS(io::parse_config_text(R"({"c_z": 0.5})"), "c_z: must be negative",
                       ConfigError);
  CHECK_THROWS_AS(io::parse_config_text(R"({"nonsense": 1})"), ConfigError);
  CHECK_THROWS_AS(io::parse_config_text(R"({"alpha": 2.0})"), ConfigError);
  CHECK_THROWS_AS(io::parse_config_text(R"({"n": [0]})"), ConfigError);
  CHECK_THROWS_AS(io::parse_config_text("{"), ConfigError);
}

TEST_CASE("duplicate keys are rejected") {
  CHECK_THROWS_AS(io::parse_config_text(R"({"n": [100], "n": [200]})"), ConfigError);
}

TEST_CASE("missing configuration file is a config error") {
  CHECK_THROWS_AS(io::parse_config("/tmp/ivxboot_no_such_file.json"), ConfigError);
}

TEST_CASE("scheme and reference blocks parse") {
  const auto cfg = io::parse_config_text(R"({
    "experiment": "pvalue-uniformity",
    "n": 250, "c": 0, "beta": 0, "R": 10, "B": 199, "seed": 3,
    "stat": "wald-ivx", "scheme": "wild", "recenter": "null-imposed",
    "reference": {"kind": "dfratio", "N": 500, "M": 1000}
  })");
  REQUIRE(cfg.scheme.has_value());
  CHECK(cfg.scheme->kind == boot::BootstrapScheme::Kind::wild);
  CHECK(cfg.b_count == 199);
  REQUIRE(cfg.reference.has_value());
  CHECK(cfg.reference->grid_steps == 500);
  CHECK_THROWS_AS(
      io::parse_config_text(R"({"reference": {"kind": "dfratio", "bogus": 1}})"),
      ConfigError);
}

TEST_CASE("digest depends on content, not formatting") {
  const auto a = io::parse_config_text(R"({"n": [250], "seed": 1})");
  const auto b = io::parse_config_text(R"({  "seed": 1,   "n": [250]  })");
  const auto c = io::parse_config_text(R"({"n": [251], "seed": 1})");
  CHECK(a.config_digest == b.config_digest);
  CHECK(a.config_digest != c.config_digest);
}

TEST_CASE("report json round trip") {
  mc::ExperimentConfig cfg;
  cfg.experiment = "size";
  cfg.grid.n = {120};
  cfg.grid.c = {0.0, -5.0};
  cfg.grid.beta = {0.0};
  cfg.statistic.kind = stat::StatKind::wald_ivx;
  cfg.replications = 60;
  cfg.seed = 11;
  cfg.config_digest = io::config_digest(cfg);
  const mc::ExperimentReport report = mc::run_size_power(cfg);

  TempFile file("/tmp/ivxboot_report_test.json");
  io::write_report_json(report, file.path);
  const mc::ExperimentReport readback = io::read_report_json(file.path);
  CHECK(io::reports_equal(report, readback));
}

TEST_CASE("csv schema is fixed and the empty report is header-only") {
  mc::ExperimentReport empty;
  empty.experiment = "size";
  TempFile rows("/tmp/ivxboot_rows_test.csv");
  TempFile cells("/tmp/ivxboot_cells_test.csv");
  io::write_report_csv(empty, rows.path, cells.path);
  CHECK(slurp(rows.path) ==
        "experiment,cell_id,n,c,gamma,beta,sigma_uv,rho_u,method,scheme,rep,estimate,"
        "statistic,pvalue,reject\n");
  CHECK(slurp(cells.path) == "cell_id,rejection_rate,se,ks,excluded\n");
}

TEST_CASE("equal config and seed give byte-identical files across thread counts") {
  mc::ExperimentConfig cfg = io::parse_config_text(
      R"({"experiment": "size", "n": [150], "c": [0, -5], "beta": [0], "R": 50,
          "stat": "wald-ivx", "seed": 9})");
  mc::ExperimentConfig serial = cfg;
  serial.threads = 1;
  mc::ExperimentConfig threaded = cfg;
  threaded.threads = 4;

  TempFile ja("/tmp/ivxboot_bytes_a.json"), jb("/tmp/ivxboot_bytes_b.json");
  TempFile ra("/tmp/ivxboot_bytes_a_rows.csv"), rb("/tmp/ivxboot_bytes_b_rows.csv");
  TempFile ca("/tmp/ivxboot_bytes_a_cells.csv"), cb("/tmp/ivxboot_bytes_b_cells.csv");
  const auto report_a = mc::run_size_power(serial);
  const auto report_b = mc::run_size_power(threaded);
  io::write_report_json(report_a, ja.path);
  io::write_report_json(report_b, jb.path);
  io::write_report_csv(report_a, ra.path, ca.path);
  io::write_report_csv(report_b, rb.path, cb.path);
  CHECK(slurp(ja.path) == slurp(jb.path));
  CHECK(slurp(ra.path) == slurp(rb.path));
  CHECK(slurp(ca.path) == slurp(cb.path));
  CHECK(!slurp(ja.path).empty());
}

TEST_CASE("pair csv round trip keeps x0 and the samples") {
  dgp::TimeSeriesPair pair;
  pair.x0 = 0.625;
  pair.y.resize(3);
  pair.y << 0.1, -2.5e-7, 3.0;
  pair.x.resize(3);
  pair.x << 1.0, 2.0, -0.125;
  TempFile file("/tmp/ivxboot_pair_test.csv");
  io::write_pair_csv(pair, file.path);
  const dgp::TimeSeriesPair readback = io::read_pair_csv(file.path);
  CHECK(readback.x0 == pair.x0);
  CHECK((readback.y == pair.y).all());
  CHECK((readback.x == pair.x).all());
}

TEST_CASE("quantile table has the documented shape") {
  const EmpiricalDistribution dist = make_empirical({1.0, 2.0, 3.0, 4.0});
  TempFile file("/tmp/ivxboot_quant_test.csv");
  io::write_quantile_table(dist, file.path);
  const std::string text = slurp(file.path);
  CHECK(text.rfind("q,value\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 20);  // header + 19 levels
}
