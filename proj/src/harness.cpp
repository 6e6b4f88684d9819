#include "ivxboot/harness.hpp"

#include <chrono>
#include <cmath>

#include "ivxboot/parallel.hpp"
#include "ivxboot/probability.hpp"

namespace ivxboot::mc {

namespace {

class WallClock {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

int resolve_threads(const ExperimentConfig& cfg) {
  return cfg.threads > 0 ? cfg.threads : default_thread_count();
}

boot::Tail tail_for(const stat::StatSpec& spec) {
  switch (spec.kind) {
    case stat::StatKind::wald_ivx:
      return boot::Tail::right;
    case stat::StatKind::tn_unit_root:
      return boot::Tail::left;
    default:
      return boot::Tail::two_sided_abs;
  }
}

std::string scheme_name(const std::optional<boot::BootstrapScheme>& scheme) {
  if (!scheme) return "none";
  switch (scheme->kind) {
    case boot::BootstrapScheme::Kind::wild:
      return "wild";
    case boot::BootstrapScheme::Kind::iid_residual:
      return "iid-residual";
    case boot::BootstrapScheme::Kind::residual_block:
      return "residual-block";
    case boot::BootstrapScheme::Kind::sieve:
      return "sieve";
  }
  return "none";
}

std::function<double(double)> analytic_cdf(AnalyticRef ref) {
  switch (ref) {
    case AnalyticRef::std_normal:
      return [](double x) { return prob::normal_cdf(x); };
    case AnalyticRef::std_cauchy:
      return [](double x) { return prob::cauchy_cdf(x); };
    case AnalyticRef::uniform01:
      return [](double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); };
    case AnalyticRef::none:
      break;
  }
  throw ConfigError("no analytic reference configured");
}

struct RepOutcome {
  RepRow row;
  bool valid = false;
};

// Shared aggregation: drops invalid reps, enforces the 1% exclusion cap.
CellSummary summarize_cell(long cell_id, const std::vector<RepOutcome>& outcomes, long offset,
                           long count, std::vector<RepRow>& rows_out) {
  CellSummary cell;
  cell.cell_id = cell_id;
  long valid = 0;
  long rejected = 0;
  for (long r = 0; r < count; ++r) {
    const RepOutcome& out = outcomes[static_cast<std::size_t>(offset + r)];
    if (!out.valid) continue;
    rows_out.push_back(out.row);
    ++valid;
    rejected += out.row.reject;
  }
  cell.excluded = count - valid;
  if (cell.excluded * 100 >= count && cell.excluded > 0)
    throw DegenerateSeriesError("harness: more than 1% of replications degenerate in a cell");
  if (valid > 0) {
    const double p = static_cast<double>(rejected) / static_cast<double>(valid);
    cell.rejection_rate = p;
    cell.se = std::sqrt(p * (1.0 - p) / static_cast<double>(valid));
  }
  return cell;
}

std::vector<double> column(const std::vector<RepRow>& rows, long cell_id,
                           double RepRow::*field) {
  std::vector<double> out;
  for (const auto& row : rows)
    if (row.cell_id == cell_id) out.push_back(row.*field);
  return out;
}

double sample_variance(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return acc / static_cast<double>(v.size() - 1);
}

double sample_sd(const std::vector<double>& v) { return std::sqrt(sample_variance(v)); }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (replications < 1) throw ConfigError("R must be at least 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
  if (scheme && b_count < 1) throw ConfigError("B must be at least 1 when a scheme is set");
  if (grid.n.empty() || (grid.c.empty() && grid.rho.empty()) || grid.beta.empty() ||
      grid.sigma_uv.empty() || grid.rho_u.empty())
    throw ConfigError("configuration grid is empty");
  ivx.validate();
}

double ks_distance(const EmpiricalDistribution& a, const EmpiricalDistribution& b) {
  const auto& x = a.draws;
  const auto& y = b.draws;
  if (x.empty() || y.empty()) throw DomainError("ks_distance: empty distribution");
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= v) ++i;
    while (j < y.size() && y[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return d;
}

double ks_distance(const EmpiricalDistribution& a, const std::function<double(double)>& cdf) {
  const auto& x = a.draws;
  if (x.empty()) throw DomainError("ks_distance: empty distribution");
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max(d, std::max(f - static_cast<double>(i) / n,
                             static_cast<double>(i + 1) / n - f));
  }
  return d;
}

std::vector<CellInfo> expand_cells(const ExperimentConfig& cfg) {
  std::vector<CellInfo> cells;
  const bool fixed = !cfg.grid.rho.empty();
  const std::vector<double>& roots = fixed ? cfg.grid.rho : cfg.grid.c;
  long id = 0;
  for (long n : cfg.grid.n)
    for (double root : roots)
      for (double beta : cfg.grid.beta)
        for (double sigma_uv : cfg.grid.sigma_uv)
          for (double rho_u : cfg.grid.rho_u) {
            CellInfo cell;
            cell.cell_id = id++;
            cell.n = n;
            cell.c = fixed ? 0.0 : root;
            cell.gamma = cfg.grid.gamma;
            cell.sigma_uv = sigma_uv;
            cell.rho_u = rho_u;
            cell.method = cfg.statistic.needs_ivx() ? "ivx" : "ols";
            cell.scheme = scheme_name(cfg.scheme);
            cell.beta = cfg.grid.local_alternative
                            ? beta / std::pow(static_cast<double>(n),
                                              0.5 * (1.0 + cfg.ivx.gamma_z))
                            : beta;
            dgp::DgpSpec spec;
            spec.beta = cell.beta;
            spec.n = n;
            spec.x0 = cfg.grid.x0;
            spec.persistence = fixed ? dgp::PersistenceSpec::fixed(root)
                                     : dgp::PersistenceSpec::local_to_unity(root, cfg.grid.gamma);
            spec.innovations.sigma << cfg.grid.sigma_u * cfg.grid.sigma_u, sigma_uv, sigma_uv,
                cfg.grid.sigma_v * cfg.grid.sigma_v;
            spec.innovations.ma_weights = cfg.grid.ma_weights;
            spec.innovations.error_ar = rho_u;
            cell.spec = spec;
            cells.push_back(std::move(cell));
          }
  if (cells.empty()) throw ConfigError("configuration grid is empty");
  return cells;
}

TimeSeriesPair simulate_cell(const ExperimentConfig& cfg, const CellInfo& cell, long rep) {
  if (cfg.innovation_override) {
    auto [u, v] = cfg.innovation_override(cell.n, rep);
    return dgp::assemble_predictive_system(cell.spec, std::move(u), std::move(v));
  }
  rng::Stream stream =
      rng::make_stream(cfg.seed, static_cast<std::uint64_t>(rep), rng::Channel::innovations);
  return dgp::simulate_predictive_system(cell.spec, stream);
}

namespace {

// One size/power replication: simulate, test, record.
RepOutcome size_power_rep(const ExperimentConfig& cfg, const CellInfo& cell, long rep) {
  RepOutcome out;
  out.row.cell_id = cell.cell_id;
  out.row.rep = rep;
  const TimeSeriesPair pair = simulate_cell(cfg, cell, rep);
  if (cfg.reject_override) {
    out.row.reject = cfg.reject_override(pair) ? 1 : 0;
    out.row.pvalue = 1.0 - out.row.reject;
    out.valid = true;
    return out;
  }
  try {
    const est::FitMethod method =
        cfg.statistic.needs_ivx() ? est::FitMethod::ivx : est::FitMethod::ols;
    const est::FitResult fit = est::fit_predictive(pair.y, pair.x, pair.x0, method, cfg.ivx);
    out.row.estimate = cfg.statistic.needs_ivx() ? fit.beta_hat : fit.rho_hat;
    out.row.statistic = stat::evaluate_statistic_on_fit(
        cfg.statistic, fit, pair.x, pair.x0, cfg.statistic.null_beta, cfg.statistic.null_rho);
    if (cfg.scheme) {
      boot::BootstrapScheme scheme = *cfg.scheme;
      scheme.recenter.beta0 = cfg.statistic.null_beta;
      scheme.recenter.y1 = pair.y.size() > 0 ? pair.y[0] : 0.0;
      rng::Stream bstream = rng::make_stream(cfg.seed, static_cast<std::uint64_t>(rep),
                                             rng::Channel::bootstrap);
      const EmpiricalDistribution dist =
          boot::bootstrap_distribution(pair, cfg.statistic, scheme, cfg.b_count, cfg.ivx, bstream);
      out.row.pvalue = boot::bootstrap_pvalue(dist, out.row.statistic, tail_for(cfg.statistic));
    } else if (cfg.statistic.kind == stat::StatKind::wald_ivx) {
      out.row.pvalue = 1.0 - prob::chisq1_cdf(out.row.statistic);
    } else if (cfg.statistic.kind == stat::StatKind::t_ivx) {
      out.row.pvalue = 2.0 * (1.0 - prob::normal_cdf(std::abs(out.row.statistic)));
    } else {
      throw ConfigError("no asymptotic reference for this statistic; configure a scheme");
    }
    out.row.reject = out.row.pvalue <= cfg.alpha ? 1 : 0;
    out.valid = true;
  } catch (const DegenerateSeriesError&) {
    out.valid = false;
  }
  return out;
}

}  // namespace

ExperimentReport run_size_power(const ExperimentConfig& cfg) {
  cfg.validate();
  const WallClock clock;
  ExperimentReport report;
  report.experiment = cfg.experiment.empty() ? "size" : cfg.experiment;
  report.seed = cfg.seed;
  report.config_digest = cfg.config_digest;
  report.cells = expand_cells(cfg);

  const long cell_count = static_cast<long>(report.cells.size());
  const long total = cell_count * cfg.replications;
  std::vector<RepOutcome> outcomes(static_cast<std::size_t>(total));
  parallel_for(total, resolve_threads(cfg), [&](std::int64_t i) {
    const long cell_idx = static_cast<long>(i) / cfg.replications;
    const long rep = static_cast<long>(i) % cfg.replications;
    outcomes[static_cast<std::size_t>(i)] =
        size_power_rep(cfg, report.cells[static_cast<std::size_t>(cell_idx)], rep);
  });

  for (long cidx = 0; cidx < cell_count; ++cidx)
    report.aggregates.push_back(summarize_cell(report.cells[static_cast<std::size_t>(cidx)].cell_id,
                                               outcomes, cidx * cfg.replications,
                                               cfg.replications, report.rows));
  report.wall_seconds = clock.seconds();
  return report;
}

ExperimentReport run_pvalue_uniformity(const ExperimentConfig& cfg) {
  cfg.validate();
  if (!cfg.scheme && !cfg.pvalue_override)
    throw ConfigError("p-value uniformity requires a bootstrap scheme");
  const WallClock clock;
  ExperimentReport report;
  report.experiment = "pvalue-uniformity";
  report.seed = cfg.seed;
  report.config_digest = cfg.config_digest;
  report.cells = expand_cells(cfg);

  const long cell_count = static_cast<long>(report.cells.size());
  const long total = cell_count * cfg.replications;
  std::vector<RepOutcome> outcomes(static_cast<std::size_t>(total));
  parallel_for(total, resolve_threads(cfg), [&](std::int64_t i) {
    const long cell_idx = static_cast<long>(i) / cfg.replications;
    const long rep = static_cast<long>(i) % cfg.replications;
    if (cfg.pvalue_override) {
      rng::Stream stream =
          rng::make_stream(cfg.seed, static_cast<std::uint64_t>(rep), rng::Channel::shuffle);
      RepOutcome out;
      out.row.cell_id = report.cells[static_cast<std::size_t>(cell_idx)].cell_id;
      out.row.rep = rep;
      out.row.pvalue = cfg.pvalue_override(stream);
      out.row.reject = out.row.pvalue <= cfg.alpha ? 1 : 0;
      out.valid = true;
      outcomes[static_cast<std::size_t>(i)] = out;
      return;
    }
    outcomes[static_cast<std::size_t>(i)] =
        size_power_rep(cfg, report.cells[static_cast<std::size_t>(cell_idx)], rep);
  });

  for (long cidx = 0; cidx < cell_count; ++cidx) {
    CellSummary cell = summarize_cell(report.cells[static_cast<std::size_t>(cidx)].cell_id,
                                      outcomes, cidx * cfg.replications, cfg.replications,
                                      report.rows);
    const std::vector<double> pvals =
        column(report.rows, cell.cell_id, &RepRow::pvalue);
    cell.ks = ks_distance(make_empirical(pvals), analytic_cdf(AnalyticRef::uniform01));
    report.aggregates.push_back(std::move(cell));
  }
  if (!report.aggregates.empty()) {
    double worst = 0.0;
    for (const auto& cell : report.aggregates) worst = std::max(worst, cell.ks);
    report.summary["max_ks"] = worst;
  }
  report.wall_seconds = clock.seconds();
  return report;
}

namespace {

double match_statistic(const ExperimentConfig& cfg, const CellInfo& cell,
                       const TimeSeriesPair& pair, double* estimate) {
  const double n = static_cast<double>(cell.n);
  switch (cfg.match) {
    case MatchStat::sqrt_n_rho: {
      const double rho_hat = est::ols_ar1(pair.x, pair.x0);
      *estimate = rho_hat;
      return std::sqrt(n) * (rho_hat - cell.spec.persistence.root(cell.n));
    }
    case MatchStat::n_rho: {
      const double rho_hat = est::ols_ar1(pair.x, pair.x0);
      *estimate = rho_hat;
      return n * (rho_hat - cfg.statistic.null_rho);
    }
    case MatchStat::explosive: {
      const double rho_hat = est::ols_ar1(pair.x, pair.x0);
      *estimate = rho_hat;
      return stat::explosive_cauchy_stat(pair.x, pair.x0, cell.spec.persistence.root(cell.n));
    }
    case MatchStat::psi_ivx: {
      const est::FitResult fit = est::ivx_estimator(pair.y, pair.x, pair.x0, cfg.ivx);
      *estimate = fit.beta_hat;
      return stat::psi_stat(fit, cell.n, cfg.statistic.null_beta);
    }
    case MatchStat::t_ivx: {
      const est::FitResult fit = est::ivx_estimator(pair.y, pair.x, pair.x0, cfg.ivx);
      *estimate = fit.beta_hat;
      return stat::ivx_tstat(fit, cfg.statistic.null_beta);
    }
  }
  throw ConfigError("unknown limit-match statistic");
}

}  // namespace

ExperimentReport run_limit_match(const ExperimentConfig& cfg) {
  cfg.validate();
  const WallClock clock;
  ExperimentReport report;
  report.experiment = "limit-match";
  report.seed = cfg.seed;
  report.config_digest = cfg.config_digest;
  report.cells = expand_cells(cfg);

  std::optional<EmpiricalDistribution> reference;
  if (cfg.reference)
    reference = limit::reference_distribution(
        *cfg.reference, rng::derive_key({cfg.seed, 0x72656665726e6365ull}), resolve_threads(cfg));

  const long cell_count = static_cast<long>(report.cells.size());
  const long total = cell_count * cfg.replications;
  std::vector<RepOutcome> outcomes(static_cast<std::size_t>(total));
  parallel_for(total, resolve_threads(cfg), [&](std::int64_t i) {
    const long cell_idx = static_cast<long>(i) / cfg.replications;
    const long rep = static_cast<long>(i) % cfg.replications;
    const CellInfo& cell = report.cells[static_cast<std::size_t>(cell_idx)];
    RepOutcome out;
    out.row.cell_id = cell.cell_id;
    out.row.rep = rep;
    try {
      const TimeSeriesPair pair = simulate_cell(cfg, cell, rep);
      out.row.statistic = match_statistic(cfg, cell, pair, &out.row.estimate);
      out.valid = true;
    } catch (const DegenerateSeriesError&) {
      out.valid = false;
    }
    outcomes[static_cast<std::size_t>(i)] = out;
  });

  for (long cidx = 0; cidx < cell_count; ++cidx) {
    CellSummary cell = summarize_cell(report.cells[static_cast<std::size_t>(cidx)].cell_id,
                                      outcomes, cidx * cfg.replications, cfg.replications,
                                      report.rows);
    const std::vector<double> draws = column(report.rows, cell.cell_id, &RepRow::statistic);
    const EmpiricalDistribution dist = make_empirical(draws);
    if (reference)
      cell.ks = ks_distance(dist, *reference);
    else if (cfg.analytic != AnalyticRef::none)
      cell.ks = ks_distance(dist, analytic_cdf(cfg.analytic));
    double mean = 0.0;
    for (double v : draws) mean += v;
    mean /= static_cast<double>(draws.size());
    cell.extra["mean"] = mean;
    cell.extra["variance"] = sample_variance(draws);
    report.aggregates.push_back(std::move(cell));
  }
  if (!report.aggregates.empty()) {
    double worst = 0.0;
    for (const auto& cell : report.aggregates) worst = std::max(worst, cell.ks);
    report.summary["max_ks"] = worst;
  }
  report.wall_seconds = clock.seconds();
  return report;
}

ExperimentReport run_invalidity_demo(const ExperimentConfig& cfg) {
  cfg.validate();
  const WallClock clock;
  ExperimentReport report;
  report.experiment = "invalidity";
  report.seed = cfg.seed;
  report.config_digest = cfg.config_digest;
  report.cells = expand_cells(cfg);

  // Protocol statistic: OLS runs track the self-normalized autoregression
  // deviation; IVX runs track the studentized IVX deviation. Resamples are
  // recentered at the fitted value.
  stat::StatSpec protocol;
  if (cfg.method == est::FitMethod::ols) {
    protocol.kind = stat::StatKind::selfnorm_ols;
    protocol.power = 0.5;
    protocol.studentize = false;
  } else {
    protocol.kind = stat::StatKind::t_ivx;
  }
  boot::BootstrapScheme scheme;
  if (cfg.scheme) scheme = *cfg.scheme;
  else scheme.kind = boot::BootstrapScheme::Kind::iid_residual;
  scheme.recenter.mode = boot::RecenterPolicy::Mode::estimate_centered;

  const long cell_count = static_cast<long>(report.cells.size());
  const long samples = cfg.replications;
  const long total = cell_count * samples;
  std::vector<RepOutcome> outcomes(static_cast<std::size_t>(total));
  std::vector<std::vector<double>> pooled(static_cast<std::size_t>(cell_count));
  for (auto& p : pooled) p.resize(static_cast<std::size_t>(samples * cfg.b_count), 0.0);
  std::vector<std::vector<long>> pooled_counts(static_cast<std::size_t>(cell_count));
  for (auto& p : pooled_counts) p.assign(static_cast<std::size_t>(samples), 0);

  parallel_for(total, resolve_threads(cfg), [&](std::int64_t i) {
    const long cell_idx = static_cast<long>(i) / samples;
    const long rep = static_cast<long>(i) % samples;
    const CellInfo& cell = report.cells[static_cast<std::size_t>(cell_idx)];
    RepOutcome out;
    out.row.cell_id = cell.cell_id;
    out.row.rep = rep;
    try {
      const TimeSeriesPair pair = simulate_cell(cfg, cell, rep);
      boot::BootstrapScheme local = scheme;
      local.recenter.y1 = pair.y[0];
      rng::Stream bstream =
          cfg.bootstrap_key_override
              ? rng::Stream(cfg.bootstrap_key_override(rep, cell.cell_id))
              : rng::make_stream(cfg.seed, static_cast<std::uint64_t>(rep),
                                 rng::Channel::bootstrap,
                                 static_cast<std::uint64_t>(cell.cell_id));
      const EmpiricalDistribution dist =
          boot::bootstrap_distribution(pair, protocol, local, cfg.b_count, cfg.ivx, bstream);
      out.row.statistic = dist.quantile(0.05);
      const est::FitMethod method = protocol.needs_ivx() ? est::FitMethod::ivx : est::FitMethod::ols;
      const est::FitResult fit = est::fit_predictive(pair.y, pair.x, pair.x0, method, cfg.ivx);
      out.row.estimate = protocol.needs_ivx() ? fit.beta_hat : fit.rho_hat;
      out.valid = true;
      auto& pool = pooled[static_cast<std::size_t>(cell_idx)];
      const std::size_t base = static_cast<std::size_t>(rep * cfg.b_count);
      for (std::size_t k = 0; k < dist.draws.size(); ++k) pool[base + k] = dist.draws[k];
      pooled_counts[static_cast<std::size_t>(cell_idx)][static_cast<std::size_t>(rep)] =
          static_cast<long>(dist.draws.size());
    } catch (const DegenerateSeriesError&) {
      out.valid = false;
    }
    outcomes[static_cast<std::size_t>(i)] = out;
  });

  std::vector<double> sd_by_cell;
  for (long cidx = 0; cidx < cell_count; ++cidx) {
    CellSummary cell = summarize_cell(report.cells[static_cast<std::size_t>(cidx)].cell_id,
                                      outcomes, cidx * samples, samples, report.rows);
    const std::vector<double> quantiles =
        column(report.rows, cell.cell_id, &RepRow::statistic);
    const double sd = sample_sd(quantiles);
    sd_by_cell.push_back(sd);
    cell.extra["q05_sd"] = sd;
    double mean = 0.0;
    for (double v : quantiles) mean += v;
    cell.extra["q05_mean"] = quantiles.empty() ? 0.0 : mean / static_cast<double>(quantiles.size());
    // Mean bootstrap distribution across samples vs the standard normal.
    std::vector<double> merged;
    const auto& pool = pooled[static_cast<std::size_t>(cidx)];
    const auto& counts = pooled_counts[static_cast<std::size_t>(cidx)];
    for (long rep = 0; rep < samples; ++rep) {
      const std::size_t base = static_cast<std::size_t>(rep * cfg.b_count);
      for (long k = 0; k < counts[static_cast<std::size_t>(rep)]; ++k)
        merged.push_back(pool[base + static_cast<std::size_t>(k)]);
    }
    if (!merged.empty())
      cell.extra["pooled_normal_ks"] =
          ks_distance(make_empirical(std::move(merged)), analytic_cdf(AnalyticRef::std_normal));
    report.aggregates.push_back(std::move(cell));
  }
  if (sd_by_cell.size() >= 2) {
    // Cells are ordered by n; the signature compares the largest to the smallest.
    report.summary["sd_ratio"] = sd_by_cell.back() / sd_by_cell.front();
    report.summary["pooled_normal_ks"] = report.aggregates.back().extra.at("pooled_normal_ks");
  }
  report.wall_seconds = clock.seconds();
  return report;
}

ExperimentReport run_rbb_validity(const ExperimentConfig& cfg) {
  cfg.validate();
  const WallClock clock;
  ExperimentReport report;
  report.experiment = "rbb";
  report.seed = cfg.seed;
  report.config_digest = cfg.config_digest;
  report.cells = expand_cells(cfg);

  limit::ReferenceSpec ref_spec;
  if (cfg.reference) ref_spec = *cfg.reference;
  ref_spec.kind = limit::FunctionalKind::df_ratio;
  const EmpiricalDistribution reference = limit::reference_distribution(
      ref_spec, rng::derive_key({cfg.seed, 0x646672617469ull}), resolve_threads(cfg));

  const long b = cfg.scheme ? cfg.scheme->block_len : 25;
  const double mu_hat = cfg.scheme ? cfg.scheme->mu_hat : 0.0;

  const long cell_count = static_cast<long>(report.cells.size());
  const long samples = cfg.replications;
  const long total = cell_count * samples;
  std::vector<RepOutcome> outcomes(static_cast<std::size_t>(total));
  parallel_for(total, resolve_threads(cfg), [&](std::int64_t i) {
    const long cell_idx = static_cast<long>(i) / samples;
    const long rep = static_cast<long>(i) % samples;
    const CellInfo& cell = report.cells[static_cast<std::size_t>(cell_idx)];
    RepOutcome out;
    out.row.cell_id = cell.cell_id;
    out.row.rep = rep;
    try {
      const TimeSeriesPair pair = simulate_cell(cfg, cell, rep);
      const double rho_tilde = est::ols_ar1(pair.x, pair.x0);
      out.row.estimate = rho_tilde;
      const ArrayXd resid = boot::rbb_centered_residuals(pair.x, rho_tilde);
      rng::Stream bstream = rng::make_stream(cfg.seed, static_cast<std::uint64_t>(rep),
                                             rng::Channel::bootstrap,
                                             static_cast<std::uint64_t>(cell.cell_id));
      const std::uint64_t base_key = bstream.next_u64();
      std::vector<double> draws;
      draws.reserve(static_cast<std::size_t>(cfg.b_count));
      long degenerate = 0;
      for (long bi = 0; bi < cfg.b_count; ++bi) {
        rng::Stream sub(rng::derive_key({base_key, static_cast<std::uint64_t>(bi)}));
        try {
          const ArrayXd pseudo = boot::rbb_sample_from_residuals(pair.x[0], resid, b, mu_hat, sub);
          const long len = pseudo.size();
          const double rho_star = est::ols_ar1(pseudo.tail(len - 1), pseudo[0]);
          draws.push_back(static_cast<double>(len) * (rho_star - 1.0));
        } catch (const DegenerateSeriesError&) {
          ++degenerate;
        }
      }
      if (degenerate * 100 >= cfg.b_count && degenerate > 0)
        throw DegenerateSeriesError("rbb: more than 1% of pseudo-series degenerate");
      out.row.statistic = ks_distance(make_empirical(std::move(draws)), reference);
      out.valid = true;
    } catch (const DegenerateSeriesError&) {
      out.valid = false;
    }
    outcomes[static_cast<std::size_t>(i)] = out;
  });

  for (long cidx = 0; cidx < cell_count; ++cidx) {
    CellSummary cell = summarize_cell(report.cells[static_cast<std::size_t>(cidx)].cell_id,
                                      outcomes, cidx * samples, samples, report.rows);
    cell.extra["median_ks"] = median(column(report.rows, cell.cell_id, &RepRow::statistic));
    report.aggregates.push_back(std::move(cell));
  }
  if (!report.aggregates.empty())
    report.summary["median_ks"] = report.aggregates.front().extra.at("median_ks");

  // Bootstrap FCLT endpoint check on a white-noise residual pool: the
  // normalized endpoint of the block-resampled partial sum against the
  // standard normal.
  {
    const long m = cfg.fclt_steps;
    rng::Stream pool_stream = rng::make_stream(cfg.seed, 0x46434c54ull, rng::Channel::innovations);
    ArrayXd noise(m);
    for (long t = 0; t < m; ++t) noise[t] = pool_stream.next_gaussian();
    ArrayXd walk = dgp::simulate_ar1(1.0, noise, 0.0);
    const ArrayXd resid = boot::rbb_centered_residuals(walk, 1.0);  // centered increments
    const double sd = std::sqrt(resid.square().mean());
    std::vector<double> endpoints(static_cast<std::size_t>(cfg.fclt_draws));
    parallel_for(cfg.fclt_draws, resolve_threads(cfg), [&](std::int64_t d) {
      rng::Stream sub = rng::make_stream(cfg.seed, 0x46434c54ull, rng::Channel::bootstrap,
                                         static_cast<std::uint64_t>(d));
      const ArrayXd pseudo =
          boot::rbb_sample_from_residuals(0.0, resid, cfg.fclt_block, 0.0, sub);
      const long len = pseudo.size();
      endpoints[static_cast<std::size_t>(d)] =
          (pseudo[len - 1] - pseudo[0]) / (sd * std::sqrt(static_cast<double>(len - 1)));
    });
    report.summary["fclt_ks"] =
        ks_distance(make_empirical(std::move(endpoints)), analytic_cdf(AnalyticRef::std_normal));
  }
  report.wall_seconds = clock.seconds();
  return report;
}

ExperimentReport run_block_smoothing(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.m_grid.empty()) throw ConfigError("block smoothing requires m_grid");
  if (cfg.grid.c.size() != 1) throw ConfigError("block smoothing uses a single c");
  const double c = cfg.grid.c.front();
  if (!(c < 0.0)) throw ConfigError("block smoothing requires c < 0");
  const WallClock clock;
  ExperimentReport report;
  report.experiment = "block-smoothing";
  report.seed = cfg.seed;
  report.config_digest = cfg.config_digest;

  // Cells indexed by m; n = m * K.
  long id = 0;
  for (long m : cfg.m_grid) {
    CellInfo cell;
    cell.cell_id = id++;
    cell.n = m * cfg.block_len;
    cell.c = c;
    cell.gamma = 1.0;
    cell.method = "ols";
    cell.scheme = "none";
    dgp::DgpSpec spec;
    spec.beta = 0.0;
    spec.n = cell.n;
    spec.persistence = dgp::PersistenceSpec::block_moderate(c, m, cfg.block_len);
    spec.innovations.sigma << cfg.grid.sigma_u * cfg.grid.sigma_u, 0.0, 0.0,
        cfg.grid.sigma_v * cfg.grid.sigma_v;
    cell.spec = spec;
    report.cells.push_back(std::move(cell));
  }

  const long cell_count = static_cast<long>(report.cells.size());
  const long total = cell_count * cfg.replications;
  std::vector<RepOutcome> outcomes(static_cast<std::size_t>(total));
  parallel_for(total, resolve_threads(cfg), [&](std::int64_t i) {
    const long cell_idx = static_cast<long>(i) / cfg.replications;
    const long rep = static_cast<long>(i) % cfg.replications;
    const CellInfo& cell = report.cells[static_cast<std::size_t>(cell_idx)];
    const long m = cfg.m_grid[static_cast<std::size_t>(cell_idx)];
    RepOutcome out;
    out.row.cell_id = cell.cell_id;
    out.row.rep = rep;
    try {
      ArrayXd x;
      const double rho = cell.spec.persistence.root(cell.n);
      if (cfg.innovation_override) {
        auto [u, v] = cfg.innovation_override(cell.n, rep);
        (void)u;
        x = dgp::simulate_ar1(rho, v, cell.spec.x0);
      } else {
        rng::Stream stream = rng::make_stream(cfg.seed, static_cast<std::uint64_t>(rep),
                                              rng::Channel::innovations);
        x = dgp::simulate_block_moderate(c, m, cfg.block_len, cell.spec.innovations, stream);
      }
      const double rho_hat = est::ols_ar1(x, cell.spec.x0);
      out.row.estimate = rho_hat;
      out.row.statistic =
          static_cast<double>(cell.n) / std::sqrt(static_cast<double>(m)) * (rho_hat - rho);
      out.valid = true;
    } catch (const DegenerateSeriesError&) {
      out.valid = false;
    }
    outcomes[static_cast<std::size_t>(i)] = out;
  });

  for (long cidx = 0; cidx < cell_count; ++cidx) {
    CellSummary cell = summarize_cell(report.cells[static_cast<std::size_t>(cidx)].cell_id,
                                      outcomes, cidx * cfg.replications, cfg.replications,
                                      report.rows);
    cell.extra["variance"] = sample_variance(column(report.rows, cell.cell_id, &RepRow::statistic));
    cell.extra["target"] = -2.0 * c;
    report.aggregates.push_back(std::move(cell));
  }
  report.wall_seconds = clock.seconds();
  return report;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  if (cfg.experiment == "size" || cfg.experiment == "power") return run_size_power(cfg);
  if (cfg.experiment == "pvalue-uniformity") return run_pvalue_uniformity(cfg);
  if (cfg.experiment == "limit-match") return run_limit_match(cfg);
  if (cfg.experiment == "invalidity") return run_invalidity_demo(cfg);
  if (cfg.experiment == "rbb") return run_rbb_validity(cfg);
  if (cfg.experiment == "block-smoothing") return run_block_smoothing(cfg);
  throw ConfigError("unknown experiment: " + cfg.experiment);
}

}  // namespace ivxboot::mc
