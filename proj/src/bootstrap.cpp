#include "ivxboot/bootstrap.hpp"

#include <atomic>
#include <cmath>

#include "ivxboot/parallel.hpp"

namespace ivxboot::boot {

namespace {

TimeSeriesPair rebuild_pair(const FitResult& fit, const RecenterPolicy& rc, const ArrayXd& u_star,
                            const ArrayXd& v_star) {
  const long n = u_star.size();
  TimeSeriesPair pair;
  pair.x0 = 0.0;
  pair.x = dgp::simulate_ar1(fit.rho_hat, v_star, 0.0);
  const double beta = rc.mode == RecenterPolicy::Mode::null_imposed ? rc.beta0 : fit.beta_hat;
  pair.y.resize(n);
  for (long t = 0; t < n; ++t) {
    const double x_lag = t == 0 ? 0.0 : pair.x[t - 1];
    pair.y[t] = beta * x_lag + u_star[t];
  }
  if (rc.mode == RecenterPolicy::Mode::estimate_centered && n > 0) pair.y[0] = rc.y1;
  pair.u = u_star;
  pair.v = v_star;
  return pair;
}

}  // namespace

TimeSeriesPair wild_bootstrap_from_multipliers(const FitResult& fit, const RecenterPolicy& rc,
                                               const Eigen::Ref<const ArrayXd>& multipliers) {
  if (multipliers.size() != fit.u_resid.size())
    throw DomainError("wild bootstrap: multiplier length mismatch");
  // One multiplier per time index, shared by both residuals, preserving the
  // contemporaneous dependence of the pair.
  const ArrayXd u_star = multipliers * fit.u_resid;
  const ArrayXd v_star = multipliers * fit.v_resid;
  return rebuild_pair(fit, rc, u_star, v_star);
}

TimeSeriesPair wild_bootstrap_sample(const FitResult& fit, const RecenterPolicy& rc,
                                     rng::Stream& stream) {
  ArrayXd mult(fit.u_resid.size());
  for (long t = 0; t < mult.size(); ++t) mult[t] = stream.next_gaussian();
  return wild_bootstrap_from_multipliers(fit, rc, mult);
}

TimeSeriesPair iid_residual_bootstrap_from_indices(const FitResult& fit, const RecenterPolicy& rc,
                                                   const std::vector<long>& indices) {
  const long n = fit.u_resid.size();
  ArrayXd u_star(static_cast<long>(indices.size()));
  ArrayXd v_star(static_cast<long>(indices.size()));
  for (std::size_t t = 0; t < indices.size(); ++t) {
    if (indices[t] < 0 || indices[t] >= n) throw DomainError("iid bootstrap: index out of range");
    u_star[static_cast<long>(t)] = fit.u_resid[indices[t]];
    v_star[static_cast<long>(t)] = fit.v_resid[indices[t]];
  }
  return rebuild_pair(fit, rc, u_star, v_star);
}

TimeSeriesPair iid_residual_bootstrap_sample(const FitResult& fit, const RecenterPolicy& rc,
                                             rng::Stream& stream) {
  const long n = fit.u_resid.size();
  std::vector<long> idx(static_cast<std::size_t>(n));
  for (auto& i : idx) i = static_cast<long>(stream.next_below(static_cast<std::uint64_t>(n)));
  return iid_residual_bootstrap_from_indices(fit, rc, idx);
}

ArrayXd rbb_centered_residuals(const Eigen::Ref<const ArrayXd>& x, double rho_tilde) {
  const long n = x.size();
  if (n < 2) throw DomainError("rbb: need at least two observations");
  ArrayXd raw(n - 1);
  for (long t = 1; t < n; ++t) raw[t - 1] = x[t] - rho_tilde * x[t - 1];
  return raw - raw.mean();
}

ArrayXd rbb_sample_from_residuals(double x1, const Eigen::Ref<const ArrayXd>& resid, long b,
                                  double mu_hat, rng::Stream& stream) {
  const long n = resid.size() + 1;  // residuals cover t = 2..n
  if (b < 1 || b >= n) throw DomainError("rbb: block length must satisfy 1 <= b < n");
  const long k = (n - 1) / b;
  const long len = k * b + 1;
  // Block starts are 1-based positions in {1, ..., n-b}; residual t = i_m + s
  // maps to resid[i_m + s - 2].
  std::vector<long> starts(static_cast<std::size_t>(k));
  for (auto& s : starts)
    s = 1 + static_cast<long>(stream.next_below(static_cast<std::uint64_t>(n - b)));
  ArrayXd out(len);
  out[0] = x1;
  for (long t = 2; t <= len; ++t) {
    const long m = (t - 2) / b;
    const long s = t - m * b - 1;
    out[t - 1] = mu_hat + out[t - 2] + resid[starts[static_cast<std::size_t>(m)] + s - 2];
  }
  return out;
}

ArrayXd rbb_sample(const Eigen::Ref<const ArrayXd>& x, double x0, double rho_tilde, long b,
                   double mu_hat, rng::Stream& stream) {
  (void)x0;  // residuals start at t = 2 by the indexation above
  const ArrayXd resid = rbb_centered_residuals(x, rho_tilde);
  return rbb_sample_from_residuals(x[0], resid, b, mu_hat, stream);
}

namespace {

MatrixXd lag_cross_moment(const Eigen::Ref<const MatrixXd>& eta, long k) {
  const long n = eta.rows();
  const long d = eta.cols();
  MatrixXd acc = MatrixXd::Zero(d, d);
  for (long t = k; t < n; ++t) acc.noalias() += eta.row(t).transpose() * eta.row(t - k);
  return acc / static_cast<double>(n);
}

SieveFit sieve_fit_fixed(const Eigen::Ref<const MatrixXd>& eta, long p) {
  const long n = eta.rows();
  const long d = eta.cols();
  if (n <= p * d + 1) throw DomainError("sieve: sample too short for requested order");

  std::vector<MatrixXd> gamma(static_cast<std::size_t>(p) + 1);
  for (long k = 0; k <= p; ++k) gamma[static_cast<std::size_t>(k)] = lag_cross_moment(eta, k);

  // Yule-Walker block system: sum_j Phi_j Gamma(k - j) = Gamma(k), k = 1..p.
  MatrixXd big(p * d, p * d);
  MatrixXd rhs(d, p * d);
  for (long j = 1; j <= p; ++j) {
    rhs.block(0, (j - 1) * d, d, d) = gamma[static_cast<std::size_t>(j)];
    for (long k = 1; k <= p; ++k) {
      const long diff = k - j;
      big.block((j - 1) * d, (k - 1) * d, d, d) =
          diff >= 0 ? gamma[static_cast<std::size_t>(diff)]
                    : MatrixXd(gamma[static_cast<std::size_t>(-diff)].transpose());
    }
  }
  Eigen::FullPivLU<MatrixXd> lu(big);
  if (!lu.isInvertible()) throw DegenerateSeriesError("sieve: Yule-Walker system is singular");
  const MatrixXd phi_stack = lu.solve(rhs.transpose()).transpose();  // d x pd

  SieveFit fit;
  fit.order = p;
  fit.phi.reserve(static_cast<std::size_t>(p));
  for (long j = 0; j < p; ++j) fit.phi.push_back(phi_stack.block(0, j * d, d, d));

  MatrixXd resid(n - p, d);
  for (long t = p; t < n; ++t) {
    Eigen::RowVectorXd pred = Eigen::RowVectorXd::Zero(d);
    for (long j = 1; j <= p; ++j)
      pred.noalias() += eta.row(t - j) * fit.phi[static_cast<std::size_t>(j - 1)].transpose();
    resid.row(t - p) = eta.row(t) - pred;
  }
  const Eigen::RowVectorXd mean = resid.colwise().mean();
  fit.resid_centered = resid.rowwise() - mean;
  return fit;
}

}  // namespace

SieveFit sieve_fit(const Eigen::Ref<const MatrixXd>& eta, long order) {
  if (order >= 1) return sieve_fit_fixed(eta, order);
  const long n = eta.rows();
  const long d = eta.cols();
  const long pmax = std::max<long>(1, static_cast<long>(std::floor(std::cbrt(n))));
  double best_aic = 0.0;
  SieveFit best;
  for (long p = 1; p <= pmax; ++p) {
    if (n <= p * d + 1) break;
    SieveFit candidate = sieve_fit_fixed(eta, p);
    const MatrixXd cov = candidate.resid_centered.transpose() * candidate.resid_centered /
                         static_cast<double>(n - p);
    const double aic = std::log(cov.determinant()) +
                       2.0 * static_cast<double>(p * d * d) / static_cast<double>(n);
    if (best.order == 0 || aic < best_aic) {
      best_aic = aic;
      best = std::move(candidate);
    }
  }
  if (best.order == 0) throw DomainError("sieve: no admissible order");
  return best;
}

double companion_spectral_radius(const SieveFit& fit, long dim) {
  const long p = fit.order;
  MatrixXd companion = MatrixXd::Zero(p * dim, p * dim);
  for (long j = 0; j < p; ++j)
    companion.block(0, j * dim, dim, dim) = fit.phi[static_cast<std::size_t>(j)];
  if (p > 1)
    companion.block(dim, 0, (p - 1) * dim, (p - 1) * dim) =
        MatrixXd::Identity((p - 1) * dim, (p - 1) * dim);
  return companion.eigenvalues().cwiseAbs().maxCoeff();
}

SievePair sieve_bootstrap_from_fit(const SieveFit& fit, long burn_in,
                                   const Eigen::VectorXd& beta0, rng::Stream& stream) {
  if (burn_in < 0) throw DomainError("sieve: burn-in must be nonnegative");
  const long d = fit.resid_centered.cols();
  const long pool = fit.resid_centered.rows();
  const long p = fit.order;
  if (beta0.size() != d - 1) throw DomainError("sieve: beta0 dimension mismatch");
  const long n = pool + p;

  MatrixXd lags = MatrixXd::Zero(p, d);  // row 0 = most recent
  MatrixXd eta_star(n, d);
  long kept = 0;
  for (long step = 0; step < burn_in + n; ++step) {
    const long pick = static_cast<long>(stream.next_below(static_cast<std::uint64_t>(pool)));
    Eigen::RowVectorXd value = fit.resid_centered.row(pick);
    for (long j = 0; j < p; ++j)
      value.noalias() += lags.row(j) * fit.phi[static_cast<std::size_t>(j)].transpose();
    for (long j = p - 1; j > 0; --j) lags.row(j) = lags.row(j - 1);
    if (p > 0) lags.row(0) = value;
    if (step >= burn_in) eta_star.row(kept++) = value;
  }

  SievePair out;
  out.x.resize(n, d - 1);
  out.y.resize(n);
  Eigen::RowVectorXd level = Eigen::RowVectorXd::Zero(d - 1);
  for (long t = 0; t < n; ++t) {
    level += eta_star.row(t).tail(d - 1);
    out.x.row(t) = level;
    out.y[t] = level * beta0 + eta_star(t, 0);
  }
  return out;
}

SievePair sieve_bootstrap_sample(const Eigen::Ref<const MatrixXd>& eta, long order, long burn_in,
                                 const Eigen::VectorXd& beta0, rng::Stream& stream) {
  return sieve_bootstrap_from_fit(sieve_fit(eta, order), burn_in, beta0, stream);
}

namespace {

// One bootstrap replication: resample, re-estimate (with a fresh instrument
// for IVX statistics), evaluate at the recentering null.
double bootstrap_draw(const TimeSeriesPair& data, const FitResult& fit,
                      const stat::StatSpec& statistic, const BootstrapScheme& scheme,
                      const est::IvxParams& params, const ArrayXd& rbb_resid,
                      const SieveFit* sieve, rng::Stream& stream) {
  const est::FitMethod method =
      statistic.needs_ivx() ? est::FitMethod::ivx : est::FitMethod::ols;
  const bool null_imposed = scheme.recenter.mode == RecenterPolicy::Mode::null_imposed;
  const double null_beta = null_imposed ? scheme.recenter.beta0 : fit.beta_hat;

  switch (scheme.kind) {
    case BootstrapScheme::Kind::wild:
    case BootstrapScheme::Kind::iid_residual: {
      const TimeSeriesPair sample = scheme.kind == BootstrapScheme::Kind::wild
                                        ? wild_bootstrap_sample(fit, scheme.recenter, stream)
                                        : iid_residual_bootstrap_sample(fit, scheme.recenter, stream);
      const FitResult refit = est::fit_predictive(sample.y, sample.x, sample.x0, method, params);
      // x* is always generated at rho_hat, so AR statistics recenter there.
      return stat::evaluate_statistic_on_fit(statistic, refit, sample.x, sample.x0, null_beta,
                                             fit.rho_hat);
    }
    case BootstrapScheme::Kind::residual_block: {
      if (statistic.needs_ivx())
        throw ContractError("residual-block bootstrap supports autoregression statistics only");
      const ArrayXd pseudo =
          rbb_sample_from_residuals(data.x[0], rbb_resid, scheme.block_len, scheme.mu_hat, stream);
      // Pseudo-series carries an imposed unit root.
      return stat::selfnorm_ols_stat(pseudo.tail(pseudo.size() - 1), pseudo[0], 1.0,
                                     statistic.kind == stat::StatKind::selfnorm_ols
                                         ? statistic.power
                                         : 0.5,
                                     statistic.kind == stat::StatKind::tn_unit_root ||
                                         statistic.studentize);
    }
    case BootstrapScheme::Kind::sieve: {
      const Eigen::VectorXd beta0 = Eigen::VectorXd::Constant(1, null_beta);
      const SievePair sample = sieve_bootstrap_from_fit(*sieve, scheme.sieve_burn_in, beta0, stream);
      const ArrayXd x_col = sample.x.col(0).array();
      const FitResult refit = est::fit_predictive(sample.y, x_col, 0.0, method, params);
      return stat::evaluate_statistic_on_fit(statistic, refit, x_col, 0.0, null_beta, 1.0);
    }
  }
  throw ContractError("unknown bootstrap scheme");
}

}  // namespace

EmpiricalDistribution bootstrap_distribution(const TimeSeriesPair& data,
                                             const stat::StatSpec& statistic,
                                             const BootstrapScheme& scheme, long b_count,
                                             const est::IvxParams& params, rng::Stream& stream,
                                             int threads) {
  if (b_count < 1) throw DomainError("bootstrap_distribution: B must be positive");
  const est::FitMethod method =
      statistic.needs_ivx() ? est::FitMethod::ivx : est::FitMethod::ols;
  const FitResult fit = est::fit_predictive(data.y, data.x, data.x0, method, params);

  ArrayXd rbb_resid;
  if (scheme.kind == BootstrapScheme::Kind::residual_block)
    rbb_resid = rbb_centered_residuals(data.x, fit.rho_hat);

  SieveFit sieve;
  if (scheme.kind == BootstrapScheme::Kind::sieve) {
    const double null_beta = scheme.recenter.mode == RecenterPolicy::Mode::null_imposed
                                 ? scheme.recenter.beta0
                                 : fit.beta_hat;
    const long n = data.x.size();
    MatrixXd eta(n, 2);
    for (long t = 0; t < n; ++t) {
      const double x_lag = t == 0 ? data.x0 : data.x[t - 1];
      eta(t, 0) = data.y[t] - null_beta * x_lag;
      eta(t, 1) = data.x[t] - x_lag;
    }
    sieve = sieve_fit(eta, scheme.sieve_order.value_or(0));
  }

  const std::uint64_t base_key = stream.next_u64();
  std::vector<double> values(static_cast<std::size_t>(b_count));
  std::vector<char> ok(static_cast<std::size_t>(b_count), 0);
  parallel_for(b_count, threads, [&](std::int64_t b) {
    rng::Stream sub(rng::derive_key({base_key, static_cast<std::uint64_t>(b)}));
    try {
      values[static_cast<std::size_t>(b)] =
          bootstrap_draw(data, fit, statistic, scheme, params, rbb_resid,
                         scheme.kind == BootstrapScheme::Kind::sieve ? &sieve : nullptr, sub);
      ok[static_cast<std::size_t>(b)] = 1;
    } catch (const DegenerateSeriesError&) {
      ok[static_cast<std::size_t>(b)] = 0;
    }
  });

  std::vector<double> kept;
  kept.reserve(values.size());
  for (std::size_t b = 0; b < values.size(); ++b)
    if (ok[b]) kept.push_back(values[b]);
  const long excluded = b_count - static_cast<long>(kept.size());
  if (excluded * 100 >= b_count)
    throw DegenerateSeriesError("bootstrap_distribution: more than 1% of replications degenerate");
  if (kept.empty()) throw DegenerateSeriesError("bootstrap_distribution: all replications degenerate");

  const std::uint64_t digest =
      rng::derive_key({base_key, static_cast<std::uint64_t>(scheme.kind),
                       static_cast<std::uint64_t>(statistic.kind),
                       static_cast<std::uint64_t>(b_count)});
  return make_empirical(std::move(kept), digest, excluded);
}

double bootstrap_pvalue(const EmpiricalDistribution& dist, double observed, Tail tail) {
  if (dist.draws.empty()) throw DomainError("bootstrap_pvalue: empty distribution");
  const double b = static_cast<double>(dist.draws.size());
  long count = 0;
  switch (tail) {
    case Tail::right:
      for (double v : dist.draws) count += v >= observed;
      break;
    case Tail::left:
      for (double v : dist.draws) count += v <= observed;
      break;
    case Tail::two_sided_abs:
      for (double v : dist.draws) count += std::abs(v) >= std::abs(observed);
      break;
  }
  return static_cast<double>(count) / b;
}

}  // namespace ivxboot::boot
