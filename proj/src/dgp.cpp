#include "ivxboot/dgp.hpp"

#include <cmath>
#include <utility>

#include "ivxboot/errors.hpp"

namespace ivxboot::dgp {

double lur_coefficient(double c, double gamma, long n) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw DomainError("lur_coefficient: gamma must lie in (0,1]");
  if (n < 1) throw DomainError("lur_coefficient: n must be positive");
  return 1.0 + c / std::pow(static_cast<double>(n), gamma);
}

PersistenceSpec PersistenceSpec::local_to_unity(double c, double gamma) {
  PersistenceSpec s;
  s.kind = Kind::local_to_unity;
  s.c = c;
  s.gamma = gamma;
  return s;
}

PersistenceSpec PersistenceSpec::fixed(double rho) {
  PersistenceSpec s;
  s.kind = Kind::fixed;
  s.rho = rho;
  return s;
}

PersistenceSpec PersistenceSpec::block_moderate(double c, long m, long block_len) {
  PersistenceSpec s;
  s.kind = Kind::block_moderate;
  s.c = c;
  s.m = m;
  s.block_len = block_len;
  return s;
}

double PersistenceSpec::root(long n) const {
  switch (kind) {
    case Kind::local_to_unity:
      return lur_coefficient(c, gamma, n);
    case Kind::fixed:
      return rho;
    case Kind::block_moderate: {
      if (c >= 0.0) throw DomainError("block_moderate requires c < 0");
      if (m < 1 || block_len < 1 || n != m * block_len)
        throw DomainError("block_moderate requires n = m * block_len");
      return 1.0 + c * static_cast<double>(m) / static_cast<double>(n);
    }
  }
  throw DomainError("unknown persistence kind");
}

void InnovationSpec::validate() const {
  if (sigma(0, 1) != sigma(1, 0)) throw DomainError("innovation sigma must be symmetric");
  if (!(sigma(0, 0) > 0.0) || !(sigma(1, 1) > 0.0))
    throw DomainError("innovation variances must be positive");
  const double det = sigma(0, 0) * sigma(1, 1) - sigma(0, 1) * sigma(1, 0);
  if (det < -1e-12 * sigma.trace() * sigma.trace())
    throw DomainError("innovation sigma must be positive semi-definite");
  if (ma_weights.size() < 1) throw DomainError("ma_weights must be nonempty");
  if (ma_weights.size() > 1 && ma_weights.sum() == 0.0)
    throw DomainError("ma_weights must not sum to zero");
  if (!(error_ar > -1.0 && error_ar < 1.0)) throw DomainError("error_ar must lie in (-1,1)");
}

Eigen::Matrix2d InnovationSpec::chol() const {
  // Hand-rolled 2x2 lower Cholesky, tolerant of the rank-1 boundary.
  Eigen::Matrix2d l = Eigen::Matrix2d::Zero();
  l(0, 0) = std::sqrt(sigma(0, 0));
  l(1, 0) = sigma(1, 0) / l(0, 0);
  const double rem = sigma(1, 1) - l(1, 0) * l(1, 0);
  l(1, 1) = rem > 0.0 ? std::sqrt(rem) : 0.0;
  return l;
}

void DgpSpec::validate() const {
  innovations.validate();
  if (n < 4) throw DomainError("sample size must be at least 4");
  persistence.root(n);  // validates persistence constraints
}

Eigen::MatrixX2d base_normal_pairs(const InnovationSpec& spec, long n, rng::Stream& stream) {
  spec.validate();
  // Each channel draws from its own substream and the u channel consumes
  // exactly n + 1 draws, so the u innovations are identical no matter how
  // long the moving-average filter of v is. Pre-sample rows exist only for
  // the v filter; their cross-correlation never reaches the sample.
  rng::Stream u_stream(rng::derive_key({stream.next_u64(), 1}));
  rng::Stream v_stream(rng::derive_key({stream.next_u64(), 2}));
  const long burn = spec.ma_weights.size() - 1;
  const long total = n + burn + 1;  // row r holds time r - burn; row `burn` is time 0
  const Eigen::Matrix2d l = spec.chol();
  const double sv = std::sqrt(spec.sigma(1, 1));
  Eigen::MatrixX2d base(total, 2);
  for (long r = 0; r < burn; ++r) {
    base(r, 0) = 0.0;  // pre-sample u draws are never read
    base(r, 1) = sv * v_stream.next_gaussian();
  }
  base(burn, 0) = l(0, 0) * u_stream.next_gaussian();  // stationary-start draw
  base(burn, 1) = sv * v_stream.next_gaussian();
  for (long r = burn + 1; r < total; ++r) {
    const double z0 = u_stream.next_gaussian();
    const double z1 = v_stream.next_gaussian();
    base(r, 0) = l(0, 0) * z0;
    base(r, 1) = l(1, 0) * z0 + l(1, 1) * z1;
  }
  return base;
}

std::pair<ArrayXd, ArrayXd> filter_innovation_pair(const InnovationSpec& spec,
                                                   const Eigen::MatrixX2d& base, long n) {
  const long burn = spec.ma_weights.size() - 1;
  if (base.rows() != n + burn + 1)
    throw DomainError("filter_innovation_pair: base draws have wrong length");
  const long lag = spec.ma_weights.size();

  ArrayXd v(n);
  for (long t = 0; t < n; ++t) {
    // row index of time t+1 in base is t + burn + 1
    double acc = 0.0;
    for (long j = 0; j < lag; ++j) acc += spec.ma_weights[j] * base(t + burn + 1 - j, 1);
    v[t] = acc;
  }

  ArrayXd u(n);
  if (spec.error_ar == 0.0) {
    for (long t = 0; t < n; ++t) u[t] = base(t + burn + 1, 0);
  } else {
    const double rho_u = spec.error_ar;
    double prev = base(burn, 0) / std::sqrt(1.0 - rho_u * rho_u);  // stationary start
    for (long t = 0; t < n; ++t) {
      prev = rho_u * prev + base(t + burn + 1, 0);
      u[t] = prev;
    }
  }
  return {std::move(u), std::move(v)};
}

std::pair<ArrayXd, ArrayXd> simulate_innovation_pair(const InnovationSpec& spec, long n,
                                                     rng::Stream& stream) {
  return filter_innovation_pair(spec, base_normal_pairs(spec, n, stream), n);
}

ArrayXd simulate_ar1(double rho, const Eigen::Ref<const ArrayXd>& v, double x0) {
  ArrayXd x(v.size());
  double prev = x0;
  for (long t = 0; t < v.size(); ++t) {
    prev = rho * prev + v[t];
    x[t] = prev;
  }
  return x;
}

TimeSeriesPair assemble_predictive_system(const DgpSpec& spec, ArrayXd u, ArrayXd v) {
  const double rho = spec.persistence.root(spec.n);
  TimeSeriesPair pair;
  pair.x0 = spec.x0;
  pair.x = simulate_ar1(rho, v, spec.x0);
  pair.y.resize(spec.n);
  for (long t = 0; t < spec.n; ++t) {
    const double x_lag = t == 0 ? spec.x0 : pair.x[t - 1];
    pair.y[t] = spec.beta * x_lag + u[t];
  }
  pair.u = std::move(u);
  pair.v = std::move(v);
  return pair;
}

TimeSeriesPair simulate_predictive_system(const DgpSpec& spec, rng::Stream& stream) {
  spec.validate();
  auto [u, v] = simulate_innovation_pair(spec.innovations, spec.n, stream);
  return assemble_predictive_system(spec, std::move(u), std::move(v));
}

ArrayXd simulate_block_moderate(double c, long m, long block_len, const InnovationSpec& innov,
                                rng::Stream& stream) {
  const auto spec = PersistenceSpec::block_moderate(c, m, block_len);
  const long n = m * block_len;
  const double rho = spec.root(n);
  auto [u, v] = simulate_innovation_pair(innov, n, stream);
  (void)u;
  return simulate_ar1(rho, v, 0.0);
}

}  // namespace ivxboot::dgp
