#pragma once

#include <optional>
#include <vector>

#include "ivxboot/dgp.hpp"
#include "ivxboot/empirical.hpp"
#include "ivxboot/statistics.hpp"

namespace ivxboot::boot {

using dgp::TimeSeriesPair;
using Eigen::ArrayXd;
using Eigen::MatrixXd;
using est::FitResult;

// How the bootstrap data are centered: null_imposed rebuilds y* under beta0
// (the hypothesis-test default); estimate_centered rebuilds y* under the
// fitted beta and pastes the original first observation back in.
struct RecenterPolicy {
  enum class Mode { null_imposed, estimate_centered };
  Mode mode = Mode::null_imposed;
  double beta0 = 0.0;
  double y1 = 0.0;  // original Y_1, consumed only by estimate_centered
};

struct BootstrapScheme {
  enum class Kind { wild, iid_residual, residual_block, sieve };
  Kind kind = Kind::wild;
  RecenterPolicy recenter;
  // residual_block
  long block_len = 25;
  double mu_hat = 0.0;
  // sieve: fixed order, or automatic AIC selection when unset
  std::optional<long> sieve_order;
  long sieve_burn_in = 50;
};

enum class Tail { right, left, two_sided_abs };

// Deterministic cores (multipliers / resampling indices supplied by the
// caller) with stream-driven wrappers on top.
TimeSeriesPair wild_bootstrap_from_multipliers(const FitResult& fit, const RecenterPolicy& rc,
                                               const Eigen::Ref<const ArrayXd>& multipliers);
TimeSeriesPair wild_bootstrap_sample(const FitResult& fit, const RecenterPolicy& rc,
                                     rng::Stream& stream);

TimeSeriesPair iid_residual_bootstrap_from_indices(const FitResult& fit, const RecenterPolicy& rc,
                                                   const std::vector<long>& indices);
TimeSeriesPair iid_residual_bootstrap_sample(const FitResult& fit, const RecenterPolicy& rc,
                                             rng::Stream& stream);

// Residual-based block bootstrap pseudo-series of length k*b + 1 with
// k = floor((n-1)/b): X*_1 = X_1, then unit-root accumulation of uniformly
// drawn residual blocks plus drift mu_hat. Residuals are formed from t = 2
// onward, so x0 enters only through rho_tilde.
ArrayXd rbb_centered_residuals(const Eigen::Ref<const ArrayXd>& x, double rho_tilde);
ArrayXd rbb_sample_from_residuals(double x1, const Eigen::Ref<const ArrayXd>& resid, long b,
                                  double mu_hat, rng::Stream& stream);
ArrayXd rbb_sample(const Eigen::Ref<const ArrayXd>& x, double x0, double rho_tilde, long b,
                   double mu_hat, rng::Stream& stream);

struct SieveFit {
  long order = 0;
  std::vector<MatrixXd> phi;   // VAR coefficient matrices
  MatrixXd resid_centered;     // (n - order) x d
};

// Yule-Walker VAR(p) fit of the rows of eta; order < 1 selects by AIC over
// 1..floor(n^{1/3}).
SieveFit sieve_fit(const Eigen::Ref<const MatrixXd>& eta, long order);

// Companion-form spectral radius of the fitted VAR.
double companion_spectral_radius(const SieveFit& fit, long dim);

struct SievePair {
  ArrayXd y;
  MatrixXd x;
};

// eta columns are (u, v_1..v_d); bootstrap noise is rebuilt through the
// fitted recursion from zero initial conditions, burn_in steps discarded,
// x* integrates the v-block and y*_t = beta0' x*_t + u*_t.
SievePair sieve_bootstrap_sample(const Eigen::Ref<const MatrixXd>& eta, long order, long burn_in,
                                 const Eigen::VectorXd& beta0, rng::Stream& stream);
SievePair sieve_bootstrap_from_fit(const SieveFit& fit, long burn_in,
                                   const Eigen::VectorXd& beta0, rng::Stream& stream);

// Fits once, then generates, re-estimates and evaluates the statistic B times
// with the null pinned at the recentering value. Degenerate replications are
// excluded and counted; more than 1% of B degenerate is an error. Draw b uses
// a substream derived from (stream draw, b), so the result does not depend on
// the thread count.
EmpiricalDistribution bootstrap_distribution(const TimeSeriesPair& data,
                                             const stat::StatSpec& statistic,
                                             const BootstrapScheme& scheme, long b_count,
                                             const est::IvxParams& params, rng::Stream& stream,
                                             int threads = 1);

double bootstrap_pvalue(const EmpiricalDistribution& dist, double observed, Tail tail);

}  // namespace ivxboot::boot
