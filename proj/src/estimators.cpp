#include "ivxboot/estimators.hpp"

#include <cmath>

#include "ivxboot/errors.hpp"

namespace ivxboot::est {

namespace {

// Lagged series [x0, x_1, ..., x_{n-1}].
ArrayXd lagged(const Eigen::Ref<const ArrayXd>& x, double x0) {
  ArrayXd xl(x.size());
  if (x.size() == 0) return xl;
  xl[0] = x0;
  xl.tail(x.size() - 1) = x.head(x.size() - 1);
  return xl;
}

}  // namespace

void IvxParams::validate() const {
  if (!(c_z < 0.0)) throw DomainError("ivx c_z must be negative");
  if (!(gamma_z > 0.0 && gamma_z < 1.0)) throw DomainError("ivx gamma_z must lie in (0,1)");
}

double IvxParams::rho_z(long n) const {
  validate();
  return 1.0 + c_z / std::pow(static_cast<double>(n), gamma_z);
}

double ols_ar1(const Eigen::Ref<const ArrayXd>& x, double x0) {
  if (x.size() < 1) throw DegenerateSeriesError("ols_ar1: empty series");
  const ArrayXd xl = lagged(x, x0);
  const double den = (xl * xl).sum();
  if (den <= 0.0) throw DegenerateSeriesError("ols_ar1: zero lagged sum of squares");
  return (xl * x).sum() / den;
}

double ols_beta(const Eigen::Ref<const ArrayXd>& y, const Eigen::Ref<const ArrayXd>& x,
                double x0) {
  if (y.size() != x.size()) throw DomainError("ols_beta: y and x lengths differ");
  if (x.size() < 1) throw DegenerateSeriesError("ols_beta: empty series");
  const ArrayXd xl = lagged(x, x0);
  const double den = (xl * xl).sum();
  if (den <= 0.0) throw DegenerateSeriesError("ols_beta: zero lagged sum of squares");
  return (xl * y).sum() / den;
}

ArrayXd ivx_instrument_with_root(const Eigen::Ref<const ArrayXd>& x, double x0, double rho_z) {
  ArrayXd z(x.size());
  double prev_z = 0.0;
  double prev_x = x0;
  for (long t = 0; t < x.size(); ++t) {
    prev_z = rho_z * prev_z + (x[t] - prev_x);
    prev_x = x[t];
    z[t] = prev_z;
  }
  return z;
}

ArrayXd ivx_instrument(const Eigen::Ref<const ArrayXd>& x, double x0, const IvxParams& params) {
  return ivx_instrument_with_root(x, x0, params.rho_z(x.size()));
}

FitResult ols_fit(const Eigen::Ref<const ArrayXd>& y, const Eigen::Ref<const ArrayXd>& x,
                  double x0) {
  FitResult fit;
  fit.method = FitMethod::ols;
  fit.n = x.size();
  const ArrayXd xl = lagged(x, x0);
  fit.sxx = (xl * xl).sum();
  fit.beta_hat = ols_beta(y, x, x0);
  fit.rho_hat = ols_ar1(x, x0);
  ArrayXd u = y - fit.beta_hat * xl;
  ArrayXd v = x - fit.rho_hat * xl;
  fit.u_resid = u - u.mean();
  fit.v_resid = v - v.mean();
  return fit;
}

FitResult ivx_estimator(const Eigen::Ref<const ArrayXd>& y, const Eigen::Ref<const ArrayXd>& x,
                        double x0, const IvxParams& params) {
  if (y.size() != x.size()) throw DomainError("ivx_estimator: y and x lengths differ");
  FitResult fit;
  fit.method = FitMethod::ivx;
  fit.ivx = params;
  fit.n = x.size();
  ArrayXd z = ivx_instrument(x, x0, params);
  const ArrayXd xl = lagged(x, x0);
  const ArrayXd zl = lagged(z, 0.0);
  fit.sxx = (xl * xl).sum();
  fit.szx = (zl * xl).sum();
  fit.szz = (zl * zl).sum();
  if (fit.szx == 0.0)
    throw DegenerateSeriesError("ivx_estimator: instrument/regressor cross-moment is zero");
  fit.beta_hat = (zl * y).sum() / fit.szx;
  fit.rho_hat = ols_ar1(x, x0);
  ArrayXd u = y - fit.beta_hat * xl;
  ArrayXd v = x - fit.rho_hat * xl;
  fit.u_resid = u - u.mean();
  fit.v_resid = v - v.mean();
  fit.z = std::move(z);
  return fit;
}

FitResult fit_predictive(const Eigen::Ref<const ArrayXd>& y, const Eigen::Ref<const ArrayXd>& x,
                         double x0, FitMethod method, const IvxParams& params) {
  return method == FitMethod::ivx ? ivx_estimator(y, x, x0, params) : ols_fit(y, x, x0);
}

double parzen_weight(double x) {
  x = std::abs(x);
  if (x <= 0.5) return 1.0 - 6.0 * x * x + 6.0 * x * x * x;
  if (x <= 1.0) {
    const double d = 1.0 - x;
    return 2.0 * d * d * d;
  }
  return 0.0;
}

long auto_bandwidth(long n) {
  const long m = static_cast<long>(std::floor(4.0 * std::pow(n / 100.0, 2.0 / 9.0)));
  return m < 1 ? 1 : m;
}

namespace {

// Unweighted lag-j cross moment n^{-1} sum_t eta_t eta_{t+j}'.
MatrixXd lag_moment(const Eigen::Ref<const MatrixXd>& eta, long j) {
  const long n = eta.rows();
  const long d = eta.cols();
  MatrixXd acc = MatrixXd::Zero(d, d);
  for (long t = 0; t + j < n; ++t) acc.noalias() += eta.row(t).transpose() * eta.row(t + j);
  return acc / static_cast<double>(n);
}

LongRunCov assemble_lrcov(MatrixXd sigma, MatrixXd lambda, long bandwidth) {
  LongRunCov out;
  out.delta = lambda + sigma;
  out.omega = lambda.transpose() + out.delta;
  out.sigma = std::move(sigma);
  out.lambda = std::move(lambda);
  out.bandwidth = bandwidth;
  return out;
}

}  // namespace

LongRunCov longrun_covariance(const Eigen::Ref<const MatrixXd>& eta, long bandwidth,
                              bool prewhiten) {
  const long n = eta.rows();
  if (n < 2) throw DomainError("longrun_covariance: need at least two rows");
  if (bandwidth < 0) bandwidth = auto_bandwidth(n);
  if (bandwidth >= n) throw DomainError("longrun_covariance: bandwidth must be below n");

  if (prewhiten) {
    // First-order autoregression, then recolor every component by (I - A)^{-1}.
    const long d = eta.cols();
    MatrixXd g0 = MatrixXd::Zero(d, d);
    MatrixXd g1 = MatrixXd::Zero(d, d);
    for (long t = 1; t < n; ++t) {
      g0.noalias() += eta.row(t - 1).transpose() * eta.row(t - 1);
      g1.noalias() += eta.row(t).transpose() * eta.row(t - 1);
    }
    const MatrixXd a = g1 * g0.inverse();
    MatrixXd resid(n - 1, d);
    for (long t = 1; t < n; ++t) resid.row(t - 1) = eta.row(t) - eta.row(t - 1) * a.transpose();
    const LongRunCov inner = longrun_covariance(resid, bandwidth, false);
    const MatrixXd recolor = (MatrixXd::Identity(d, d) - a).inverse();
    return assemble_lrcov(recolor * inner.sigma * recolor.transpose(),
                          recolor * inner.lambda * recolor.transpose(), bandwidth);
  }

  MatrixXd sigma = lag_moment(eta, 0);
  MatrixXd lambda = MatrixXd::Zero(eta.cols(), eta.cols());
  for (long j = 1; j <= bandwidth; ++j) {
    const double w = parzen_weight(static_cast<double>(j) / static_cast<double>(bandwidth));
    if (w == 0.0) continue;
    lambda.noalias() += w * lag_moment(eta, j);
  }
  return assemble_lrcov(std::move(sigma), std::move(lambda), bandwidth);
}

FmOlsResult fm_ols(const Eigen::Ref<const ArrayXd>& y, const Eigen::Ref<const MatrixXd>& x,
                   const LongRunCov& lrcov, const VectorXd& x0) {
  const long n = x.rows();
  const long d = x.cols();
  if (y.size() != n) throw DomainError("fm_ols: y and x lengths differ");
  if (lrcov.omega.rows() != d + 1) throw DomainError("fm_ols: covariance dimension mismatch");

  const double omega11 = lrcov.omega(0, 0);
  const VectorXd omega21 = lrcov.omega.block(1, 0, d, 1);
  const MatrixXd omega22 = lrcov.omega.block(1, 1, d, d);
  const VectorXd delta12 = lrcov.delta.block(0, 1, 1, d).transpose();
  const MatrixXd delta22 = lrcov.delta.block(1, 1, d, d);

  Eigen::FullPivLU<MatrixXd> omega22_lu(omega22);
  if (!omega22_lu.isInvertible())
    throw DegenerateSeriesError("fm_ols: regressor long-run covariance block is singular");
  const VectorXd correction = omega22_lu.solve(omega21);  // Omega_22^{-1} omega_21

  MatrixXd sxx = MatrixXd::Zero(d, d);
  VectorXd sxy = VectorXd::Zero(d);
  VectorXd prev = x0.size() == d ? x0 : VectorXd::Zero(d);
  for (long t = 0; t < n; ++t) {
    const VectorXd xt = x.row(t).transpose();
    const VectorXd dx = xt - prev;
    prev = xt;
    const double y_tilde = y[t] - correction.dot(dx);
    sxx.noalias() += xt * xt.transpose();
    sxy.noalias() += xt * y_tilde;
  }
  const VectorXd delta_tilde = delta12 - delta22.transpose() * correction;

  Eigen::FullPivLU<MatrixXd> sxx_lu(sxx);
  if (!sxx_lu.isInvertible())
    throw DegenerateSeriesError("fm_ols: regressor moment matrix is singular");

  FmOlsResult out;
  out.beta_tilde = sxx_lu.solve(sxy - static_cast<double>(n) * delta_tilde);
  const double omega11_2 = omega11 - omega21.dot(correction);
  out.v_tilde = omega11_2 * sxx_lu.inverse();
  return out;
}

}  // namespace ivxboot::est
