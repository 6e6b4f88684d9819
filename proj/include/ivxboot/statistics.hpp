#pragma once

#include "ivxboot/estimators.hpp"

namespace ivxboot::stat {

using Eigen::ArrayXd;
using est::FitResult;

enum class StatKind {
  selfnorm_ols,  // (sum X_{t-1}^2)^a (rho_hat - rho0), optionally studentized
  psi_ivx,       // n^{(1+gamma_z)/2} (beta_hat - beta0)
  jn_ivx,        // (sum Z_{t-1} X_{t-1})^a (beta_hat - beta0)
  wald_ivx,      // squared self-normalized IVX deviation
  t_ivx,         // signed root of the IVX Wald statistic
  tn_unit_root,  // studentized selfnorm with a = 1/2 at rho0
};

struct StatSpec {
  StatKind kind = StatKind::wald_ivx;
  double power = 1.0;       // a in {1/2, 1, 2} for selfnorm_ols / jn_ivx
  bool studentize = false;  // selfnorm_ols only
  double null_beta = 0.0;
  double null_rho = 1.0;

  bool needs_ivx() const {
    return kind == StatKind::psi_ivx || kind == StatKind::jn_ivx ||
           kind == StatKind::wald_ivx || kind == StatKind::t_ivx;
  }
};

double selfnorm_ols_stat(const Eigen::Ref<const ArrayXd>& x, double x0, double rho0, double power,
                         bool studentize);

double psi_stat(const FitResult& fit, long n, double beta0);

double jn_stat(const FitResult& fit, double beta0, double power);

double ivx_wald(const FitResult& fit, double beta0);

// Signed root of the Wald statistic; the studentized IVX t-ratio.
double ivx_tstat(const FitResult& fit, double beta0);

// (rho_hat^2 - 1)^{-1} |rho_hat|^n (rho_hat - theta0), evaluated in log space
// so |rho_hat|^n cannot overflow.
double explosive_cauchy_stat(const Eigen::Ref<const ArrayXd>& x, double x0, double theta0);

// Fits the required estimator and evaluates the statistic with the spec's
// null values. For bootstrap use, null overrides are applied by the caller.
double evaluate_statistic(const StatSpec& spec, const Eigen::Ref<const ArrayXd>& y,
                          const Eigen::Ref<const ArrayXd>& x, double x0,
                          const est::IvxParams& params);

// Same, on an already-computed fit, with explicit null values.
double evaluate_statistic_on_fit(const StatSpec& spec, const FitResult& fit,
                                 const Eigen::Ref<const ArrayXd>& x, double x0, double null_beta,
                                 double null_rho);

}  // namespace ivxboot::stat
