#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>

#include "ivxboot/bootstrap.hpp"
#include "ivxboot/errors.hpp"

using namespace ivxboot;
using Eigen::ArrayXd;
using Eigen::MatrixXd;

namespace {

dgp::TimeSeriesPair make_pair(long n, double beta, double c, std::uint64_t seed,
                              double sigma_uv = 0.0) {
  dgp::DgpSpec spec;
  spec.beta = beta;
  spec.n = n;
  spec.persistence = dgp::PersistenceSpec::local_to_unity(c, 1.0);
  spec.innovations.sigma << 1.0, sigma_uv, sigma_uv, 1.0;
  rng::Stream stream = rng::make_stream(seed, 0, rng::Channel::innovations);
  return dgp::simulate_predictive_system(spec, stream);
}

est::FitResult fit_ivx(const dgp::TimeSeriesPair& pair) {
  return est::ivx_estimator(pair.y, pair.x, pair.x0, est::IvxParams{});
}

}  // namespace

TEST_CASE("wild bootstrap multiplier hooks") {
  const auto pair = make_pair(100, 0.1, -5.0, 301);
  const est::FitResult fit = fit_ivx(pair);
  boot::RecenterPolicy null0;
  null0.mode = boot::RecenterPolicy::Mode::null_imposed;
  null0.beta0 = 0.0;

  const auto zeroed = boot::wild_bootstrap_from_multipliers(fit, null0, ArrayXd::Zero(100));
  CHECK((zeroed.x == 0.0).all());
  CHECK((zeroed.y == 0.0).all());

  const auto identity = boot::wild_bootstrap_from_multipliers(fit, null0, ArrayXd::Ones(100));
  CHECK((*identity.u == fit.u_resid).all());
  CHECK((*identity.v == fit.v_resid).all());

  // Odd symmetry: flipping every multiplier flips the sample.
  ArrayXd mult(100);
  rng::Stream s(302);
  for (long t = 0; t < 100; ++t) mult[t] = s.next_gaussian();
  const auto plus = boot::wild_bootstrap_from_multipliers(fit, null0, mult);
  const auto minus = boot::wild_bootstrap_from_multipliers(fit, null0, (-mult).eval());
  CHECK((*plus.u + *minus.u).abs().maxCoeff() == 0.0);
  CHECK((plus.x + minus.x).abs().maxCoeff() < 1e-12);
  CHECK((plus.y + minus.y).abs().maxCoeff() < 1e-12);
}

TEST_CASE("wild bootstrap conditional moments") {
  const auto pair = make_pair(50, 0.0, -2.0, 303);
  const est::FitResult fit = fit_ivx(pair);
  boot::RecenterPolicy rc;
  const long reps = 20000;
  const long t_probe = 17;
  double sum = 0.0;
  double sumsq = 0.0;
  rng::Stream stream = rng::make_stream(304, 0, rng::Channel::bootstrap);
  for (long b = 0; b < reps; ++b) {
    const auto sample = boot::wild_bootstrap_sample(fit, rc, stream);
    const double u = (*sample.u)[t_probe];
    sum += u;
    sumsq += u * u;
  }
  const double target = fit.u_resid[t_probe] * fit.u_resid[t_probe];
  const double se_mean = std::sqrt(target / reps);
  CHECK(std::abs(sum / reps) < 3.0 * se_mean);
  const double se_second = std::sqrt(2.0) * target / std::sqrt(static_cast<double>(reps));
  CHECK(std::abs(sumsq / reps - target) < 3.0 * se_second);
}

TEST_CASE("iid residual bootstrap support and moments") {
  const auto pair = make_pair(60, 0.05, -1.0, 305);
  const est::FitResult fit = fit_ivx(pair);
  boot::RecenterPolicy rc;

  std::set<double> u_support(fit.u_resid.data(), fit.u_resid.data() + fit.u_resid.size());
  rng::Stream stream = rng::make_stream(306, 0, rng::Channel::bootstrap);
  const auto sample = boot::iid_residual_bootstrap_sample(fit, rc, stream);
  for (long t = 0; t < 60; ++t) CHECK(u_support.count((*sample.u)[t]) == 1);

  // Pairs are drawn jointly: each (u*, v*) must be an observed pair.
  for (long t = 0; t < 60; ++t) {
    bool found = false;
    for (long j = 0; j < 60; ++j)
      if ((*sample.u)[t] == fit.u_resid[j] && (*sample.v)[t] == fit.v_resid[j]) {
        found = true;
        break;
      }
    CHECK(found);
  }

  // Single-observation edge: the one pair is drawn with probability one.
  est::FitResult tiny = fit;
  tiny.u_resid = ArrayXd::Constant(1, 0.4);
  tiny.v_resid = ArrayXd::Constant(1, -0.2);
  rng::Stream tiny_stream = rng::make_stream(307, 0, rng::Channel::bootstrap);
  const auto one = boot::iid_residual_bootstrap_sample(tiny, rc, tiny_stream);
  CHECK((*one.u)[0] == 0.4);
  CHECK((*one.v)[0] == -0.2);

  // Resampling from a mean-zero multiset: the time-t mean over many draws
  // sits within 3 s.e. of zero.
  const long reps = 20000;
  double acc = 0.0;
  rng::Stream mstream = rng::make_stream(308, 0, rng::Channel::bootstrap);
  for (long b = 0; b < reps; ++b) {
    const auto draw = boot::iid_residual_bootstrap_sample(fit, rc, mstream);
    acc += (*draw.u)[11];
  }
  const double sd = std::sqrt(fit.u_resid.square().mean());
  CHECK(std::abs(acc / reps) < 3.0 * sd / std::sqrt(static_cast<double>(reps)));
}

TEST_CASE("null-imposed resamples ignore the fitted slope") {
  const auto pair = make_pair(80, 0.3, -4.0, 309);
  dgp::TimeSeriesPair shifted = pair;
  for (long t = 0; t < 80; ++t) {
    const double x_lag = t == 0 ? pair.x0 : pair.x[t - 1];
    shifted.y[t] += 0.7 * x_lag;
  }
  const est::FitResult fit_a = fit_ivx(pair);
  const est::FitResult fit_b = fit_ivx(shifted);
  CHECK(fit_b.beta_hat - fit_a.beta_hat == doctest::Approx(0.7).epsilon(1e-10));
  CHECK((fit_a.u_resid - fit_b.u_resid).abs().maxCoeff() < 1e-10);

  boot::RecenterPolicy rc;
  rc.beta0 = 0.0;
  rng::Stream sa = rng::make_stream(310, 0, rng::Channel::bootstrap);
  rng::Stream sb = rng::make_stream(310, 0, rng::Channel::bootstrap);
  const auto draw_a = boot::wild_bootstrap_sample(fit_a, rc, sa);
  const auto draw_b = boot::wild_bootstrap_sample(fit_b, rc, sb);
  CHECK((draw_a.y - draw_b.y).abs().maxCoeff() < 1e-10);
  CHECK((draw_a.x - draw_b.x).abs().maxCoeff() < 1e-10);
}

TEST_CASE("rbb pseudo-series shape and degenerate hooks") {
  const auto pair = make_pair(137, 0.0, 0.0, 311);
  const ArrayXd& x = pair.x;

  for (long b : {1L, 7L, 25L, 136L}) {
    rng::Stream s = rng::make_stream(312, static_cast<std::uint64_t>(b), rng::Channel::bootstrap);
    const ArrayXd pseudo = boot::rbb_sample(x, 0.0, 1.0, b, 0.0, s);
    CHECK(pseudo.size() == ((137 - 1) / b) * b + 1);
    CHECK(pseudo[0] == x[0]);
  }

  rng::Stream s = rng::make_stream(313, 0, rng::Channel::bootstrap);
  const ArrayXd flat = boot::rbb_sample_from_residuals(2.5, ArrayXd::Zero(99), 10, 0.0, s);
  CHECK((flat == 2.5).all());

  rng::Stream sd = rng::make_stream(313, 1, rng::Channel::bootstrap);
  const ArrayXd drift = boot::rbb_sample_from_residuals(0.0, ArrayXd::Zero(99), 10, 0.5, sd);
  CHECK(drift[90] == doctest::Approx(45.0));

  CHECK_THROWS_AS(boot::rbb_sample(x, 0.0, 1.0, 137, 0.0, s), DomainError);
}

TEST_CASE("rbb increments are resampled centered increments at the unit root") {
  const auto pair = make_pair(200, 0.0, 0.0, 314);
  const ArrayXd centered = boot::rbb_centered_residuals(pair.x, 1.0);
  std::vector<double> support(centered.data(), centered.data() + centered.size());
  std::sort(support.begin(), support.end());
  rng::Stream s = rng::make_stream(315, 0, rng::Channel::bootstrap);
  const ArrayXd pseudo = boot::rbb_sample(pair.x, 0.0, 1.0, 16, 0.0, s);
  const double scale = pair.x.abs().maxCoeff();
  for (long t = 1; t < pseudo.size(); ++t) {
    const double inc = pseudo[t] - pseudo[t - 1];
    auto it = std::lower_bound(support.begin(), support.end(), inc);
    double best = std::numeric_limits<double>::infinity();
    if (it != support.end()) best = std::min(best, std::abs(*it - inc));
    if (it != support.begin()) best = std::min(best, std::abs(*(it - 1) - inc));
    CHECK(best <= 1e-12 * scale);  // member of the multiset up to accumulation rounding
  }
}

TEST_CASE("sieve fit is stationary and centered") {
  const long n = 400;
  MatrixXd eta(n, 2);
  rng::Stream s(316);
  for (long t = 0; t < n; ++t) {
    eta(t, 0) = s.next_gaussian();
    eta(t, 1) = s.next_gaussian();
  }
  const boot::SieveFit fit = boot::sieve_fit(eta, 3);
  CHECK(fit.order == 3);
  CHECK(boot::companion_spectral_radius(fit, 2) < 1.0);
  for (long col = 0; col < 2; ++col)
    CHECK(std::abs(fit.resid_centered.col(col).mean()) < 1e-10);

  const boot::SieveFit auto_fit = boot::sieve_fit(eta, 0);
  CHECK(auto_fit.order >= 1);
  CHECK(auto_fit.order <= static_cast<long>(std::floor(std::cbrt(n))));
}

TEST_CASE("sieve zero-shock hook gives zero paths") {
  boot::SieveFit fit;
  fit.order = 1;
  fit.phi = {MatrixXd::Zero(2, 2)};
  fit.phi[0] << 0.5, 0.0, 0.0, 0.3;
  fit.resid_centered = MatrixXd::Zero(50, 2);
  rng::Stream s = rng::make_stream(317, 0, rng::Channel::bootstrap);
  const boot::SievePair sample =
      boot::sieve_bootstrap_from_fit(fit, 10, Eigen::VectorXd::Zero(1), s);
  CHECK((sample.y == 0.0).all());
  CHECK((sample.x.array() == 0.0).all());
}

TEST_CASE("bootstrap distribution basics") {
  const auto pair = make_pair(150, 0.0, -5.0, 318);
  stat::StatSpec spec;
  spec.kind = stat::StatKind::wald_ivx;
  boot::BootstrapScheme scheme;
  scheme.kind = boot::BootstrapScheme::Kind::wild;

  rng::Stream one_stream = rng::make_stream(319, 0, rng::Channel::bootstrap);
  const EmpiricalDistribution one =
      boot::bootstrap_distribution(pair, spec, scheme, 1, est::IvxParams{}, one_stream);
  CHECK(one.size() == 1);
  for (double q : {0.0, 0.3, 0.9, 1.0}) CHECK(one.quantile(q) == one.draws[0]);

  rng::Stream sa = rng::make_stream(320, 0, rng::Channel::bootstrap);
  rng::Stream sb = rng::make_stream(320, 0, rng::Channel::bootstrap);
  const EmpiricalDistribution serial =
      boot::bootstrap_distribution(pair, spec, scheme, 200, est::IvxParams{}, sa, 1);
  const EmpiricalDistribution threaded =
      boot::bootstrap_distribution(pair, spec, scheme, 200, est::IvxParams{}, sb, 4);
  CHECK(serial.draws == threaded.draws);
  CHECK(serial.excluded == 0);
}

TEST_CASE("bootstrap distribution across schemes produces sane draws") {
  const auto pair = make_pair(120, 0.0, -3.0, 321, -0.5);
  stat::StatSpec spec;
  spec.kind = stat::StatKind::t_ivx;
  est::IvxParams params;

  for (auto kind : {boot::BootstrapScheme::Kind::wild, boot::BootstrapScheme::Kind::iid_residual,
                    boot::BootstrapScheme::Kind::sieve}) {
    boot::BootstrapScheme scheme;
    scheme.kind = kind;
    scheme.sieve_order = 1;
    rng::Stream stream = rng::make_stream(322, static_cast<std::uint64_t>(kind),
                                          rng::Channel::bootstrap);
    const EmpiricalDistribution dist =
        boot::bootstrap_distribution(pair, spec, scheme, 150, params, stream);
    CHECK(dist.size() + dist.excluded == 150);
    for (double v : dist.draws) CHECK(std::isfinite(v));
  }

  stat::StatSpec ar;
  ar.kind = stat::StatKind::tn_unit_root;
  boot::BootstrapScheme rbb;
  rbb.kind = boot::BootstrapScheme::Kind::residual_block;
  rbb.block_len = 10;
  rng::Stream stream = rng::make_stream(323, 0, rng::Channel::bootstrap);
  const EmpiricalDistribution dist =
      boot::bootstrap_distribution(pair, ar, rbb, 150, params, stream);
  CHECK(dist.size() == 150);

  stat::StatSpec bad;
  bad.kind = stat::StatKind::wald_ivx;
  rng::Stream bstream = rng::make_stream(324, 0, rng::Channel::bootstrap);
  CHECK_THROWS_AS(boot::bootstrap_distribution(pair, bad, rbb, 10, params, bstream),
                  ContractError);
}

TEST_CASE("bootstrap p-values") {
  EmpiricalDistribution dist = make_empirical({-1.5, -0.5, 0.25, 1.0, 2.0});
  CHECK(boot::bootstrap_pvalue(dist, 3.0, boot::Tail::right) == 0.0);
  CHECK(boot::bootstrap_pvalue(dist, -1.5, boot::Tail::left) == doctest::Approx(0.2));

  EmpiricalDistribution sym = make_empirical({-1.0, 1.0});
  CHECK(boot::bootstrap_pvalue(sym, 0.0, boot::Tail::two_sided_abs) == 1.0);

  // Right + left = 1 + ties/B.
  EmpiricalDistribution ties = make_empirical({0.0, 0.0, 1.0, 2.0});
  const double right = boot::bootstrap_pvalue(ties, 0.0, boot::Tail::right);
  const double left = boot::bootstrap_pvalue(ties, 0.0, boot::Tail::left);
  CHECK(right + left == doctest::Approx(1.0 + 2.0 / 4.0));
}

TEST_CASE("empirical distribution quantile and cdf coherence") {
  rng::Stream s(325);
  std::vector<double> draws(401);
  for (auto& d : draws) d = s.next_gaussian();
  const EmpiricalDistribution dist = make_empirical(std::move(draws));
  CHECK(dist.quantile(0.0) == dist.draws.front());
  CHECK(dist.quantile(1.0) == dist.draws.back());
  for (double q = 0.0; q <= 1.0; q += 0.01) CHECK(dist.cdf(dist.quantile(q)) >= q);
}
