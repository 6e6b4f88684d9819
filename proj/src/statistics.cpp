#include "ivxboot/statistics.hpp"

#include <cmath>

#include "ivxboot/errors.hpp"

namespace ivxboot::stat {

namespace {

void check_power(double a) {
  if (a != 0.5 && a != 1.0 && a != 2.0) throw DomainError("statistic power must be 1/2, 1 or 2");
}

const est::IvxParams& require_ivx(const FitResult& fit) {
  if (fit.method != est::FitMethod::ivx || !fit.ivx)
    throw ContractError("statistic requires an IVX fit");
  return *fit.ivx;
}

}  // namespace

double selfnorm_ols_stat(const Eigen::Ref<const ArrayXd>& x, double x0, double rho0, double power,
                         bool studentize) {
  check_power(power);
  if (x.size() < 1) throw DegenerateSeriesError("selfnorm_ols_stat: empty series");
  ArrayXd xl(x.size());
  xl[0] = x0;
  xl.tail(x.size() - 1) = x.head(x.size() - 1);
  const double sxx = (xl * xl).sum();
  if (sxx <= 0.0) throw DegenerateSeriesError("selfnorm_ols_stat: zero lagged sum of squares");
  const double rho_hat = (xl * x).sum() / sxx;
  double value = std::pow(sxx, power) * (rho_hat - rho0);
  if (studentize) {
    const double s2 = ((x - rho_hat * xl).square()).sum() / static_cast<double>(x.size());
    if (!(s2 > 0.0)) throw DegenerateSeriesError("selfnorm_ols_stat: zero residual variance");
    value /= std::sqrt(s2);
  }
  return value;
}

double psi_stat(const FitResult& fit, long n, double beta0) {
  const auto& params = require_ivx(fit);
  return std::pow(static_cast<double>(n), 0.5 * (1.0 + params.gamma_z)) * (fit.beta_hat - beta0);
}

double jn_stat(const FitResult& fit, double beta0, double power) {
  check_power(power);
  require_ivx(fit);
  return std::pow(fit.szx, power) * (fit.beta_hat - beta0);
}

double ivx_wald(const FitResult& fit, double beta0) {
  require_ivx(fit);
  if (!(fit.szz > 0.0)) throw DegenerateSeriesError("ivx_wald: zero instrument energy");
  const double sigma2_u = fit.u_resid.square().mean();
  if (!(sigma2_u > 0.0)) throw DegenerateSeriesError("ivx_wald: zero residual variance");
  const double dev = fit.beta_hat - beta0;
  return dev * dev * fit.szx * fit.szx / (sigma2_u * fit.szz);
}

double ivx_tstat(const FitResult& fit, double beta0) {
  const double w = ivx_wald(fit, beta0);
  return std::copysign(std::sqrt(w), fit.beta_hat - beta0);
}

double explosive_cauchy_stat(const Eigen::Ref<const ArrayXd>& x, double x0, double theta0) {
  const double rho_hat = est::ols_ar1(x, x0);
  const double dev = rho_hat - theta0;
  const double edge = rho_hat * rho_hat - 1.0;
  if (edge == 0.0) throw DegenerateSeriesError("explosive_cauchy_stat: estimate on unit circle");
  if (dev == 0.0) return 0.0;
  const double log_mag = static_cast<double>(x.size()) * std::log(std::abs(rho_hat)) +
                         std::log(std::abs(dev)) - std::log(std::abs(edge));
  const double sign = (dev > 0 ? 1.0 : -1.0) * (edge > 0 ? 1.0 : -1.0);
  return sign * std::exp(log_mag);
}

double evaluate_statistic_on_fit(const StatSpec& spec, const FitResult& fit,
                                 const Eigen::Ref<const ArrayXd>& x, double x0, double null_beta,
                                 double null_rho) {
  switch (spec.kind) {
    case StatKind::selfnorm_ols:
      return selfnorm_ols_stat(x, x0, null_rho, spec.power, spec.studentize);
    case StatKind::tn_unit_root:
      return selfnorm_ols_stat(x, x0, null_rho, 0.5, true);
    case StatKind::psi_ivx:
      return psi_stat(fit, fit.n, null_beta);
    case StatKind::jn_ivx:
      return jn_stat(fit, null_beta, spec.power);
    case StatKind::wald_ivx:
      return ivx_wald(fit, null_beta);
    case StatKind::t_ivx:
      return ivx_tstat(fit, null_beta);
  }
  throw ContractError("unknown statistic kind");
}

double evaluate_statistic(const StatSpec& spec, const Eigen::Ref<const ArrayXd>& y,
                          const Eigen::Ref<const ArrayXd>& x, double x0,
                          const est::IvxParams& params) {
  const est::FitMethod method = spec.needs_ivx() ? est::FitMethod::ivx : est::FitMethod::ols;
  const FitResult fit = est::fit_predictive(y, x, x0, method, params);
  return evaluate_statistic_on_fit(spec, fit, x, x0, spec.null_beta, spec.null_rho);
}

}  // namespace ivxboot::stat
