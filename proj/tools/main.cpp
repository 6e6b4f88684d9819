// Command-line surface: simulate a predictive system, estimate it, run a
// bootstrap test on a stored pair, drive Monte Carlo experiments from a JSON
// configuration, and export simulated limit-distribution quantile tables.
//
// Exit codes: 0 success, 1 usage, 2 configuration error, 3 numeric degeneracy.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ivxboot/io.hpp"
#include "ivxboot/parallel.hpp"

namespace {

using namespace ivxboot;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct SimulateArgs {
  long n = 250;
  double c = 0.0;
  double gamma = 1.0;
  bool has_rho = false;
  double rho = 1.0;
  double beta = 0.0;
  double sigma_uv = 0.0;
  double rho_u = 0.0;
  double sigma_u = 1.0;
  double sigma_v = 1.0;
  double x0 = 0.0;
  std::uint64_t seed = 1;
  std::string out = "pair.csv";
};

int run_simulate(const SimulateArgs& args) {
  dgp::DgpSpec spec;
  spec.beta = args.beta;
  spec.n = args.n;
  spec.x0 = args.x0;
  spec.persistence = args.has_rho ? dgp::PersistenceSpec::fixed(args.rho)
                                  : dgp::PersistenceSpec::local_to_unity(args.c, args.gamma);
  spec.innovations.sigma << args.sigma_u * args.sigma_u, args.sigma_uv, args.sigma_uv,
      args.sigma_v * args.sigma_v;
  spec.innovations.error_ar = args.rho_u;
  rng::Stream stream = rng::make_stream(args.seed, 0, rng::Channel::innovations);
  const dgp::TimeSeriesPair pair = dgp::simulate_predictive_system(spec, stream);
  io::write_pair_csv(pair, args.out);
  std::cout << "wrote " << args.out << " (n=" << args.n << ")\n";
  return 0;
}

struct EstimateArgs {
  std::string method = "ivx";
  std::string input;
  double c_z = -1.0;
  double gamma_z = 0.95;
};

int run_estimate(const EstimateArgs& args) {
  const dgp::TimeSeriesPair pair = io::read_pair_csv(args.input);
  est::IvxParams params{args.c_z, args.gamma_z};
  const est::FitMethod method = args.method == "ols" ? est::FitMethod::ols : est::FitMethod::ivx;
  const est::FitResult fit = est::fit_predictive(pair.y, pair.x, pair.x0, method, params);
  std::cout << "beta_hat " << fmt(fit.beta_hat) << "\n";
  std::cout << "rho_hat " << fmt(fit.rho_hat) << "\n";
  return 0;
}

struct BootTestArgs {
  std::string input;
  std::string stat = "wald-ivx";
  std::string scheme = "wild";
  std::string recenter = "null-imposed";
  std::string tail = "auto";
  long b_count = 399;
  double null_beta = 0.0;
  double null_rho = 1.0;
  double c_z = -1.0;
  double gamma_z = 0.95;
  long block_b = 25;
  std::uint64_t seed = 1;
};

int run_boot_test(const BootTestArgs& args) {
  // Reuse the config-file vocabulary for names.
  std::string cfg_text = std::string("{\"stat\": \"") + args.stat + "\", \"scheme\": \"" +
                         args.scheme + "\", \"recenter\": \"" + args.recenter +
                         "\", \"B\": " + std::to_string(args.b_count) +
                         ", \"null_beta\": " + fmt(args.null_beta) +
                         ", \"null_rho\": " + fmt(args.null_rho) + ", \"c_z\": " + fmt(args.c_z) +
                         ", \"gamma_z\": " + fmt(args.gamma_z) +
                         ", \"block_b\": " + std::to_string(args.block_b) + "}";
  mc::ExperimentConfig cfg = io::parse_config_text(cfg_text);
  const dgp::TimeSeriesPair pair = io::read_pair_csv(args.input);

  boot::BootstrapScheme scheme = *cfg.scheme;
  scheme.recenter.beta0 = cfg.statistic.null_beta;
  scheme.recenter.y1 = pair.y[0];

  const est::FitMethod method =
      cfg.statistic.needs_ivx() ? est::FitMethod::ivx : est::FitMethod::ols;
  const est::FitResult fit = est::fit_predictive(pair.y, pair.x, pair.x0, method, cfg.ivx);
  const double observed = stat::evaluate_statistic_on_fit(
      cfg.statistic, fit, pair.x, pair.x0, cfg.statistic.null_beta, cfg.statistic.null_rho);

  rng::Stream stream = rng::make_stream(args.seed, 0, rng::Channel::bootstrap);
  const EmpiricalDistribution dist = boot::bootstrap_distribution(
      pair, cfg.statistic, scheme, cfg.b_count, cfg.ivx, stream, default_thread_count());

  boot::Tail tail = boot::Tail::two_sided_abs;
  if (args.tail == "right") tail = boot::Tail::right;
  else if (args.tail == "left") tail = boot::Tail::left;
  else if (args.tail == "two-sided") tail = boot::Tail::two_sided_abs;
  else if (args.tail == "auto")
    tail = cfg.statistic.kind == stat::StatKind::wald_ivx ? boot::Tail::right
                                                          : boot::Tail::two_sided_abs;
  else throw ConfigError("tail: must be right, left, two-sided or auto");

  std::cout << "statistic " << fmt(observed) << "\n";
  std::cout << "pvalue " << fmt(boot::bootstrap_pvalue(dist, observed, tail)) << "\n";
  std::cout << "excluded " << dist.excluded << "\n";
  return 0;
}

struct McArgs {
  std::string config;
  std::string out_prefix = "mc";
};

int run_mc(const McArgs& args) {
  const auto started = std::chrono::system_clock::now();
  mc::ExperimentConfig cfg = io::parse_config(args.config);
  const mc::ExperimentReport report = mc::run_experiment(cfg);
  io::write_report(report, args.out_prefix, io::ReportFormat::csv);
  io::write_report(report, args.out_prefix, io::ReportFormat::json);
  const auto finished = std::chrono::system_clock::now();
  // Timing is log-only: the data files stay byte-identical across reruns.
  std::cout << "experiment " << report.experiment << "\n";
  std::cout << "config_digest " << report.config_digest << "\n";
  std::cout << "wall_seconds " << fmt(report.wall_seconds) << "\n";
  std::cout << "utc_span "
            << std::chrono::duration_cast<std::chrono::milliseconds>(finished - started).count()
            << "ms\n";
  for (const auto& cell : report.aggregates) {
    std::cout << "cell " << cell.cell_id << " rejection_rate " << fmt(cell.rejection_rate)
              << " se " << fmt(cell.se) << " ks " << fmt(cell.ks) << " excluded " << cell.excluded;
    for (const auto& [key, value] : cell.extra) std::cout << ' ' << key << ' ' << fmt(value);
    std::cout << "\n";
  }
  for (const auto& [key, value] : report.summary)
    std::cout << "summary " << key << ' ' << fmt(value) << "\n";
  return 0;
}

struct LimitsArgs {
  std::string kind = "dfratio";
  long grid = 2000;
  long draws = 20000;
  double c = 0.0;
  double gamma = 1.0;
  double c_z = -1.0;
  double omega_xx = 1.0;
  bool unstudentized = false;
  std::uint64_t seed = 1;
  std::string out = "limits.csv";
};

int run_limits(const LimitsArgs& args) {
  const std::string cfg_text = std::string("{\"reference\": {\"kind\": \"") + args.kind +
                               "\", \"N\": " + std::to_string(args.grid) +
                               ", \"M\": " + std::to_string(args.draws) + ", \"c\": " + fmt(args.c) +
                               ", \"gamma\": " + fmt(args.gamma) + ", \"c_z\": " + fmt(args.c_z) +
                               ", \"omega_xx\": " + fmt(args.omega_xx) + ", \"studentized\": " +
                               (args.unstudentized ? "false" : "true") + "}}";
  const mc::ExperimentConfig cfg = io::parse_config_text(cfg_text);
  const EmpiricalDistribution dist =
      limit::reference_distribution(*cfg.reference, args.seed, default_thread_count());
  io::write_quantile_table(dist, args.out);
  std::cout << "wrote " << args.out << " (M=" << args.draws << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonstationary predictive-regression simulation and bootstrap inference"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Simulate a predictive system to CSV");
  simulate->add_option("--n", sim.n, "Sample size");
  simulate->add_option("--c", sim.c, "Local-to-unity c");
  simulate->add_option("--gamma", sim.gamma, "Local-to-unity exponent");
  auto* rho_opt = simulate->add_option("--rho", sim.rho, "Fixed autoregressive root");
  simulate->add_option("--beta", sim.beta, "Predictive slope");
  simulate->add_option("--sigma-uv", sim.sigma_uv, "Innovation covariance");
  simulate->add_option("--rho-u", sim.rho_u, "AR(1) coefficient of u");
  simulate->add_option("--sigma-u", sim.sigma_u, "Std dev of u");
  simulate->add_option("--sigma-v", sim.sigma_v, "Std dev of v");
  simulate->add_option("--x0", sim.x0, "Initial regressor level");
  simulate->add_option("--seed", sim.seed, "Master seed");
  simulate->add_option("--out", sim.out, "Output CSV path");

  EstimateArgs estArgs;
  auto* estimate = app.add_subcommand("estimate", "OLS/IVX estimates from a pair CSV");
  estimate->add_option("--method", estArgs.method, "ols or ivx")
      ->check(CLI::IsMember({"ols", "ivx"}));
  estimate->add_option("--input", estArgs.input, "Input pair CSV")->required();
  estimate->add_option("--c-z", estArgs.c_z, "Instrument c_z");
  estimate->add_option("--gamma-z", estArgs.gamma_z, "Instrument gamma_z");

  BootTestArgs bt;
  auto* boottest = app.add_subcommand("boot-test", "Bootstrap p-value for a pair CSV");
  boottest->add_option("--input", bt.input, "Input pair CSV")->required();
  boottest->add_option("--stat", bt.stat, "Statistic name");
  boottest->add_option("--scheme", bt.scheme, "Bootstrap scheme");
  boottest->add_option("--recenter", bt.recenter, "null-imposed or estimate-centered");
  boottest->add_option("--tail", bt.tail, "right, left, two-sided or auto");
  boottest->add_option("--B", bt.b_count, "Bootstrap replications");
  boottest->add_option("--null-beta", bt.null_beta, "Null slope");
  boottest->add_option("--null-rho", bt.null_rho, "Null autoregressive root");
  boottest->add_option("--c-z", bt.c_z, "Instrument c_z");
  boottest->add_option("--gamma-z", bt.gamma_z, "Instrument gamma_z");
  boottest->add_option("--block-b", bt.block_b, "Block length (residual-block)");
  boottest->add_option("--seed", bt.seed, "Master seed");

  McArgs mcArgs;
  auto* mcCmd = app.add_subcommand("mc", "Run a Monte Carlo experiment from a JSON config");
  mcCmd->add_option("--config", mcArgs.config, "Configuration JSON")->required();
  mcCmd->add_option("--out-prefix", mcArgs.out_prefix, "Output file prefix");

  LimitsArgs lim;
  auto* limits = app.add_subcommand("limits", "Emit a simulated limit-distribution quantile table");
  limits->add_option("--kind", lim.kind, "Functional kind");
  limits->add_option("--N", lim.grid, "Grid steps");
  limits->add_option("--M", lim.draws, "Number of draws");
  limits->add_option("--c", lim.c, "OU drift");
  limits->add_option("--gamma", lim.gamma, "Psi weight parameter");
  limits->add_option("--c-z", lim.c_z, "Instrument c_z");
  limits->add_option("--omega-xx", lim.omega_xx, "Long-run regressor variance");
  limits->add_flag("--unstudentized", lim.unstudentized, "Raw mixed-normal form");
  limits->add_option("--seed", lim.seed, "Master seed");
  limits->add_option("--out", lim.out, "Output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help() << "\n";
    return 1;
  }

  try {
    if (simulate->parsed()) {
      sim.has_rho = rho_opt->count() > 0;
      return run_simulate(sim);
    }
    if (estimate->parsed()) return run_estimate(estArgs);
    if (boottest->parsed()) return run_boot_test(bt);
    if (mcCmd->parsed()) return run_mc(mcArgs);
    if (limits->parsed()) return run_limits(lim);
  } catch (const ivxboot::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ivxboot::DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ivxboot::DegenerateSeriesError& e) {
    std::cerr << "numeric degeneracy: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
