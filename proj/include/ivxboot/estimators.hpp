#pragma once

#include <Eigen/Dense>
#include <optional>

#include "ivxboot/dgp.hpp"

namespace ivxboot::est {

using Eigen::ArrayXd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Instrument tuning: rho_z = 1 + c_z / n^gamma_z with c_z < 0, gamma_z in (0,1).
struct IvxParams {
  double c_z = -1.0;
  double gamma_z = 0.95;

  void validate() const;
  double rho_z(long n) const;
};

enum class FitMethod { ols, ivx };

struct FitResult {
  double beta_hat = 0.0;
  double rho_hat = 0.0;
  ArrayXd u_resid;  // centered predictive residuals
  ArrayXd v_resid;  // centered autoregression residuals
  FitMethod method = FitMethod::ols;
  std::optional<IvxParams> ivx;
  std::optional<ArrayXd> z;  // instrument (IVX fits)
  // Moments retained for the statistics built on top of the fit.
  long n = 0;
  double sxx = 0.0;  // sum X_{t-1}^2
  double szx = 0.0;  // sum Z_{t-1} X_{t-1}
  double szz = 0.0;  // sum Z_{t-1}^2
};

// Long-run covariance decomposition: omega = lambda' + delta, delta = lambda + sigma.
struct LongRunCov {
  MatrixXd omega;
  MatrixXd lambda;
  MatrixXd sigma;
  MatrixXd delta;
  long bandwidth = 0;
};

// rho_hat = (sum X_{t-1}^2)^{-1} (sum X_{t-1} X_t), with X_0 = x0.
double ols_ar1(const Eigen::Ref<const ArrayXd>& x, double x0);

// beta_hat = (sum X_{t-1}^2)^{-1} (sum X_{t-1} Y_t).
double ols_beta(const Eigen::Ref<const ArrayXd>& y, const Eigen::Ref<const ArrayXd>& x,
                double x0);

// Z_t = rho_z Z_{t-1} + (X_t - X_{t-1}), Z_0 = 0; O(n) form of the geometric
// difference sum. The rho overload is the test hook bypassing the c_z < 0 check.
ArrayXd ivx_instrument_with_root(const Eigen::Ref<const ArrayXd>& x, double x0, double rho_z);
ArrayXd ivx_instrument(const Eigen::Ref<const ArrayXd>& x, double x0, const IvxParams& params);

FitResult ols_fit(const Eigen::Ref<const ArrayXd>& y, const Eigen::Ref<const ArrayXd>& x,
                  double x0);

FitResult ivx_estimator(const Eigen::Ref<const ArrayXd>& y, const Eigen::Ref<const ArrayXd>& x,
                        double x0, const IvxParams& params);

FitResult fit_predictive(const Eigen::Ref<const ArrayXd>& y, const Eigen::Ref<const ArrayXd>& x,
                         double x0, FitMethod method, const IvxParams& params);

// Parzen lag-window weight on [0, 1].
double parzen_weight(double x);

// Plug-in-free bandwidth rule: floor(4 (n/100)^{2/9}), at least 1.
long auto_bandwidth(long n);

// Kernel long-run covariance of the rows of eta. bandwidth < 0 selects the
// automatic rule. prewhiten fits a first-order autoregression and recolors.
LongRunCov longrun_covariance(const Eigen::Ref<const MatrixXd>& eta, long bandwidth,
                              bool prewhiten = false);

struct FmOlsResult {
  VectorXd beta_tilde;
  MatrixXd v_tilde;
};

// Fully modified OLS for y_t = beta' x_t + u_t with integrated x.
// x0 is the pre-sample level used for the first difference (default zero).
FmOlsResult fm_ols(const Eigen::Ref<const ArrayXd>& y, const Eigen::Ref<const MatrixXd>& x,
                   const LongRunCov& lrcov, const VectorXd& x0 = VectorXd());

}  // namespace ivxboot::est
