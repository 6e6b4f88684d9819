#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ivxboot/bootstrap.hpp"
#include "ivxboot/limitdist.hpp"

namespace ivxboot::mc {

using dgp::TimeSeriesPair;
using Eigen::ArrayXd;

// Which analytic CDF a comparison runs against when no simulated reference
// distribution is configured.
enum class AnalyticRef { none, std_normal, std_cauchy, uniform01 };

// Normalized-estimator variants compared against limit references.
enum class MatchStat {
  sqrt_n_rho,  // sqrt(n) (rho_hat - rho_true)
  n_rho,       // n (rho_hat - null_rho)
  explosive,   // (rho_hat^2-1)^{-1} |rho_hat|^n (rho_hat - rho_true)
  psi_ivx,     // n^{(1+gamma_z)/2} (beta_hat - null_beta)
  t_ivx,       // studentized IVX deviation at null_beta
};

struct DgpGrid {
  std::vector<long> n = {250};
  std::vector<double> c = {0.0};      // local-to-unity cells
  std::vector<double> rho;            // fixed-root cells; overrides c when nonempty
  double gamma = 1.0;
  std::vector<double> beta = {0.0};
  std::vector<double> sigma_uv = {0.0};
  std::vector<double> rho_u = {0.0};
  double sigma_u = 1.0;
  double sigma_v = 1.0;
  ArrayXd ma_weights = ArrayXd::Ones(1);
  double x0 = 0.0;
  // Interpret beta entries as deltas on the IVX local-alternative scale
  // beta = delta / n^{(1+gamma_z)/2}.
  bool local_alternative = false;
};

struct ExperimentConfig {
  std::string experiment = "size";
  DgpGrid grid;
  est::FitMethod method = est::FitMethod::ivx;
  stat::StatSpec statistic;
  std::optional<boot::BootstrapScheme> scheme;
  long b_count = 399;
  long replications = 1000;
  double alpha = 0.05;
  std::uint64_t seed = 1;
  est::IvxParams ivx;
  std::optional<limit::ReferenceSpec> reference;
  AnalyticRef analytic = AnalyticRef::none;
  MatchStat match = MatchStat::n_rho;
  // block smoothing
  std::vector<long> m_grid;
  long block_len = 50;
  // rbb validity; the endpoint check uses a short block so b / sqrt(m) stays
  // small, as the resampling FCLT requires
  long fclt_steps = 2000;
  long fclt_draws = 20000;
  long fclt_block = 5;
  int threads = 0;  // 0 = default_thread_count()
  std::uint64_t config_digest = 0;

  // Test-only oracle hooks; never populated from configuration files.
  std::function<bool(const TimeSeriesPair&)> reject_override;
  std::function<double(rng::Stream&)> pvalue_override;
  std::function<std::pair<ArrayXd, ArrayXd>(long, long)> innovation_override;
  std::function<std::uint64_t(long, long)> bootstrap_key_override;  // (rep, cell) -> key

  void validate() const;
};

struct CellInfo {
  long cell_id = 0;
  long n = 0;
  double c = 0.0;
  double gamma = 1.0;
  double beta = 0.0;
  double sigma_uv = 0.0;
  double rho_u = 0.0;
  std::string method;
  std::string scheme;
  dgp::DgpSpec spec;
};

struct RepRow {
  long cell_id = 0;
  long rep = 0;
  double estimate = 0.0;
  double statistic = 0.0;
  double pvalue = 0.0;
  int reject = 0;
};

struct CellSummary {
  long cell_id = 0;
  double rejection_rate = 0.0;
  double se = 0.0;
  double ks = 0.0;
  long excluded = 0;
  std::map<std::string, double> extra;  // experiment-specific metrics
};

struct ExperimentReport {
  std::string experiment;
  std::vector<CellInfo> cells;
  std::vector<RepRow> rows;
  std::vector<CellSummary> aggregates;
  std::map<std::string, double> summary;  // cross-cell metrics
  std::uint64_t seed = 0;
  std::uint64_t config_digest = 0;
  std::string generator = rng::kGeneratorName;
  double wall_seconds = 0.0;  // informational; never serialized into data files
};

// Exact sup distance between two step CDFs, or between a step CDF and an
// analytic CDF, by scanning pooled order statistics.
double ks_distance(const EmpiricalDistribution& a, const EmpiricalDistribution& b);
double ks_distance(const EmpiricalDistribution& a, const std::function<double(double)>& cdf);

// Grid expansion shared by the runners.
std::vector<CellInfo> expand_cells(const ExperimentConfig& cfg);

TimeSeriesPair simulate_cell(const ExperimentConfig& cfg, const CellInfo& cell, long rep);

ExperimentReport run_size_power(const ExperimentConfig& cfg);
ExperimentReport run_pvalue_uniformity(const ExperimentConfig& cfg);
ExperimentReport run_limit_match(const ExperimentConfig& cfg);
ExperimentReport run_invalidity_demo(const ExperimentConfig& cfg);
ExperimentReport run_rbb_validity(const ExperimentConfig& cfg);
ExperimentReport run_block_smoothing(const ExperimentConfig& cfg);

// Dispatch on cfg.experiment.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

}  // namespace ivxboot::mc
