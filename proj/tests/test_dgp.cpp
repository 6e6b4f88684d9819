#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ivxboot/dgp.hpp"
#include "ivxboot/errors.hpp"
#include "ivxboot/estimators.hpp"

using namespace ivxboot;
using Eigen::ArrayXd;

namespace {

dgp::DgpSpec basic_spec(long n, double c, double beta = 0.0) {
  dgp::DgpSpec spec;
  spec.beta = beta;
  spec.n = n;
  spec.persistence = dgp::PersistenceSpec::local_to_unity(c, 1.0);
  return spec;
}

}  // namespace

TEST_CASE("lur coefficient") {
  CHECK(dgp::lur_coefficient(0.0, 1.0, 100) == 1.0);
  CHECK(dgp::lur_coefficient(-20.0, 1.0, 100) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(dgp::lur_coefficient(-1.0, 0.5, 100) == doctest::Approx(0.9).epsilon(1e-15));
  CHECK_THROWS_AS(dgp::lur_coefficient(0.0, 1.5, 100), DomainError);
  CHECK_THROWS_AS(dgp::lur_coefficient(0.0, 0.0, 100), DomainError);
}

TEST_CASE("simulate_ar1 hand recursions") {
  ArrayXd zeros = ArrayXd::Zero(5);
  CHECK((dgp::simulate_ar1(0.9, zeros, 0.0) == 0.0).all());

  ArrayXd ones = ArrayXd::Ones(3);
  const ArrayXd walk = dgp::simulate_ar1(1.0, ones, 0.0);
  CHECK(walk[0] == 1.0);
  CHECK(walk[1] == 2.0);
  CHECK(walk[2] == 3.0);

  const ArrayXd expl = dgp::simulate_ar1(2.0, zeros.head(3), 1.0);
  CHECK(expl[0] == 2.0);
  CHECK(expl[1] == 4.0);
  CHECK(expl[2] == 8.0);
}

TEST_CASE("innovation pair: white noise decorrelates") {
  dgp::InnovationSpec spec;
  rng::Stream stream = rng::make_stream(11, 0, rng::Channel::innovations);
  const long n = 10000;
  auto [u, v] = dgp::simulate_innovation_pair(spec, n, stream);
  const double un = (u - u.mean()).matrix().norm();
  const double vn = (v - v.mean()).matrix().norm();
  const double r = ((u - u.mean()) * (v - v.mean())).sum() / (un * vn);
  CHECK(std::abs(r) < 0.05);
}

TEST_CASE("innovation pair: rank-one covariance couples the channels") {
  dgp::InnovationSpec spec;
  const double su = 2.0;
  const double sv = 0.5;
  spec.sigma << su * su, su * sv, su * sv, sv * sv;
  rng::Stream stream = rng::make_stream(5, 0, rng::Channel::innovations);
  auto [u, v] = dgp::simulate_innovation_pair(spec, 500, stream);
  CHECK(((u / su) - (v / sv)).abs().maxCoeff() < 1e-12);
}

TEST_CASE("innovation pair: moving-average hook sums the weights") {
  dgp::InnovationSpec spec;
  spec.ma_weights = ArrayXd::Ones(2);
  const long n = 50;
  Eigen::MatrixX2d base = Eigen::MatrixX2d::Ones(n + 2, 2);  // eps forced to one
  auto [u, v] = dgp::filter_innovation_pair(spec, base, n);
  CHECK((v == 2.0).all());
  CHECK((u == 1.0).all());
}

TEST_CASE("predictive system hand recursion") {
  dgp::DgpSpec spec = basic_spec(2, 0.0, 1.0);
  ArrayXd u = ArrayXd::Zero(2);
  ArrayXd v = ArrayXd::Ones(2);
  const dgp::TimeSeriesPair pair = dgp::assemble_predictive_system(spec, u, v);
  CHECK(pair.x[0] == 1.0);
  CHECK(pair.x[1] == 2.0);
  CHECK(pair.y[0] == 0.0);
  CHECK(pair.y[1] == 1.0);

  dgp::DgpSpec degenerate = basic_spec(4, -3.0, 0.0);
  const dgp::TimeSeriesPair zero_y =
      dgp::assemble_predictive_system(degenerate, ArrayXd::Zero(4), ArrayXd::Ones(4));
  CHECK((zero_y.y == 0.0).all());
}

TEST_CASE("ols recovers the slope across replications") {
  // Monte Carlo oracle: with exogenous innovations the estimator is
  // conditionally unbiased, so the replication mean sits within 3 s.e.
  const long n = 500;
  const long reps = 2000;
  const double beta = 0.05;
  double sum = 0.0;
  double sumsq = 0.0;
  for (long r = 0; r < reps; ++r) {
    dgp::DgpSpec spec = basic_spec(n, -5.0, beta);
    rng::Stream stream = rng::make_stream(17, static_cast<std::uint64_t>(r),
                                          rng::Channel::innovations);
    const dgp::TimeSeriesPair pair = dgp::simulate_predictive_system(spec, stream);
    const double est = est::ols_beta(pair.y, pair.x, pair.x0);
    sum += est;
    sumsq += est * est;
  }
  const double mean = sum / reps;
  const double sd = std::sqrt((sumsq / reps - mean * mean) * reps / (reps - 1.0));
  const double se = sd / std::sqrt(static_cast<double>(reps));
  CHECK(std::abs(mean - beta) < 3.0 * se);
}

TEST_CASE("block moderate root and bitwise coincidence with local-to-unity") {
  const auto pm = dgp::PersistenceSpec::block_moderate(-1.0, 100, 100);
  CHECK(pm.root(10000) == doctest::Approx(0.99).epsilon(1e-15));
  CHECK_THROWS_AS(dgp::PersistenceSpec::block_moderate(1.0, 2, 2).root(4), DomainError);

  // m = 1 is definitionally the local-to-unity model: same stream, same path.
  dgp::InnovationSpec innov;
  rng::Stream s1 = rng::make_stream(23, 0, rng::Channel::innovations);
  const ArrayXd block = dgp::simulate_block_moderate(-1.0, 1, 100, innov, s1);

  dgp::DgpSpec spec = basic_spec(100, -1.0, 0.0);
  rng::Stream s2 = rng::make_stream(23, 0, rng::Channel::innovations);
  const dgp::TimeSeriesPair pair = dgp::simulate_predictive_system(spec, s2);
  CHECK((block == pair.x).all());
}

TEST_CASE("block moderate variance approaches the moderate-deviation level") {
  // Monte Carlo oracle for the sequential normal limit with variance -2c.
  const double c = -1.0;
  const long m = 64;
  const long k = 50;
  const long n = m * k;
  const double rho = 1.0 + c * static_cast<double>(m) / static_cast<double>(n);
  const long reps = 2000;
  double sum = 0.0;
  double sumsq = 0.0;
  dgp::InnovationSpec innov;
  for (long r = 0; r < reps; ++r) {
    rng::Stream stream = rng::make_stream(29, static_cast<std::uint64_t>(r),
                                          rng::Channel::innovations);
    const ArrayXd x = dgp::simulate_block_moderate(c, m, k, innov, stream);
    const double stat = static_cast<double>(n) / std::sqrt(static_cast<double>(m)) *
                        (est::ols_ar1(x, 0.0) - rho);
    sum += stat;
    sumsq += stat * stat;
  }
  const double mean = sum / reps;
  const double var = (sumsq / reps - mean * mean) * reps / (reps - 1.0);
  CHECK(var > 0.8 * (-2.0 * c));
  CHECK(var < 1.2 * (-2.0 * c));
}

TEST_CASE("same spec and seed reproduce bitwise") {
  dgp::DgpSpec spec = basic_spec(200, -2.0, 0.1);
  rng::Stream a = rng::make_stream(3, 5, rng::Channel::innovations);
  rng::Stream b = rng::make_stream(3, 5, rng::Channel::innovations);
  const auto pa = dgp::simulate_predictive_system(spec, a);
  const auto pb = dgp::simulate_predictive_system(spec, b);
  CHECK((pa.x == pb.x).all());
  CHECK((pa.y == pb.y).all());
}

TEST_CASE("fixed-rho autocorrelation converges to rho") {
  dgp::DgpSpec spec;
  spec.n = 50000;
  spec.persistence = dgp::PersistenceSpec::fixed(0.6);
  rng::Stream stream = rng::make_stream(31, 0, rng::Channel::innovations);
  const auto pair = dgp::simulate_predictive_system(spec, stream);
  const ArrayXd x = pair.x;
  const long n = x.size();
  const ArrayXd head = x.head(n - 1) - x.mean();
  const ArrayXd tail = x.tail(n - 1) - x.mean();
  const double acf = (head * tail).sum() / (x - x.mean()).square().sum();
  CHECK(std::abs(acf - 0.6) < 0.03);
}

TEST_CASE("u channel is untouched by the moving-average filter of v") {
  dgp::InnovationSpec plain;
  dgp::InnovationSpec filtered;
  filtered.ma_weights.resize(3);
  filtered.ma_weights << 1.0, 0.5, 0.25;
  rng::Stream a = rng::make_stream(43, 2, rng::Channel::innovations);
  rng::Stream b = rng::make_stream(43, 2, rng::Channel::innovations);
  const auto pa = dgp::simulate_innovation_pair(plain, 200, a);
  const auto pb = dgp::simulate_innovation_pair(filtered, 200, b);
  CHECK((pa.first == pb.first).all());
  CHECK(!(pa.second == pb.second).all());
}

TEST_CASE("innovations do not depend on persistence") {
  dgp::DgpSpec near = basic_spec(300, -1.0, 0.2);
  dgp::DgpSpec far = basic_spec(300, -30.0, 0.2);
  rng::Stream a = rng::make_stream(41, 9, rng::Channel::innovations);
  rng::Stream b = rng::make_stream(41, 9, rng::Channel::innovations);
  const auto pa = dgp::simulate_predictive_system(near, a);
  const auto pb = dgp::simulate_predictive_system(far, b);
  CHECK((*pa.u == *pb.u).all());
  CHECK((*pa.v == *pb.v).all());
  CHECK(!(pa.x == pb.x).all());
}

TEST_CASE("invalid specs are rejected") {
  dgp::InnovationSpec bad;
  bad.sigma << 1.0, 2.0, 2.0, 1.0;  // not PSD
  CHECK_THROWS_AS(bad.validate(), DomainError);

  dgp::DgpSpec tiny = basic_spec(3, 0.0);
  CHECK_THROWS_AS(tiny.validate(), DomainError);
}
