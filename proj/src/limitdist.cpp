#include "ivxboot/limitdist.hpp"

#include <cmath>
#include <limits>

#include "ivxboot/parallel.hpp"

namespace ivxboot::limit {

PathGrid path_from_increments(ArrayXd increments) {
  PathGrid path;
  path.steps = increments.size();
  if (path.steps < 1) throw DomainError("path grid needs at least one step");
  path.levels.resize(path.steps + 1);
  path.levels[0] = 0.0;
  for (long i = 0; i < path.steps; ++i) path.levels[i + 1] = path.levels[i] + increments[i];
  path.increments = std::move(increments);
  return path;
}

PathGrid simulate_brownian(long steps, rng::Stream& stream) {
  if (steps < 1) throw DomainError("simulate_brownian: steps must be positive");
  const double scale = std::sqrt(1.0 / static_cast<double>(steps));
  ArrayXd increments(steps);
  for (long i = 0; i < steps; ++i) increments[i] = scale * stream.next_gaussian();
  return path_from_increments(std::move(increments));
}

double ou_step_variance(double c, double dt) {
  if (c == 0.0) return dt;
  // expm1 keeps (e^{2c dt} - 1)/(2c) fully accurate through the c -> 0 crossover.
  return std::expm1(2.0 * c * dt) / (2.0 * c);
}

ArrayXd simulate_ou(double c, const PathGrid& path) {
  if (c == 0.0) return path.levels;  // the SDE degenerates to dW
  const double dt = path.dt();
  const double decay = std::exp(c * dt);
  const double noise_sd = std::sqrt(ou_step_variance(c, dt));
  const double inv_sqrt_dt = 1.0 / std::sqrt(dt);
  ArrayXd levels(path.steps + 1);
  levels[0] = 0.0;
  for (long i = 0; i < path.steps; ++i) {
    const double z = path.increments[i] * inv_sqrt_dt;  // standardized driving draw
    levels[i + 1] = decay * levels[i] + noise_sd * z;
  }
  return levels;
}

double ito_left_sum(const PathGrid& path, const Eigen::Ref<const ArrayXd>& integrand) {
  if (integrand.size() != path.steps + 1) throw DomainError("ito_left_sum: grid mismatch");
  double acc = 0.0;
  for (long i = 0; i < path.steps; ++i) acc += integrand[i] * path.increments[i];
  return acc;
}

double left_riemann(const PathGrid& path, const Eigen::Ref<const ArrayXd>& values) {
  if (values.size() != path.steps + 1) throw DomainError("left_riemann: grid mismatch");
  return values.head(path.steps).sum() * path.dt();
}

void ReferenceSpec::validate() const {
  if (draws < 1) throw DomainError("reference spec: draws must be positive");
  if (grid_steps < 16) throw DomainError("reference spec: grid must have at least 16 steps");
}

double functional_draw(const ReferenceSpec& spec, rng::Stream& stream) {
  switch (spec.kind) {
    case FunctionalKind::df_xi: {
      const PathGrid path = simulate_brownian(spec.grid_steps, stream);
      const double w1 = path.levels[path.steps];
      const double integral = left_riemann(path, path.levels.square());
      return 0.5 * (w1 * w1 - 1.0) / std::sqrt(integral);
    }
    case FunctionalKind::df_ratio: {
      const PathGrid path = simulate_brownian(spec.grid_steps, stream);
      return ito_left_sum(path, path.levels) / left_riemann(path, path.levels.square());
    }
    case FunctionalKind::ou_ratio: {
      const PathGrid path = simulate_brownian(spec.grid_steps, stream);
      const ArrayXd j = simulate_ou(spec.c, path);
      return ito_left_sum(path, j) / left_riemann(path, j.square());
    }
    case FunctionalKind::psi_gamma: {
      const PathGrid path = simulate_brownian(spec.grid_steps, stream);
      const long n = path.steps;
      const double dt = path.dt();
      double num = 0.0;
      double den = 0.0;
      for (long i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * dt;
        const double weight = std::isinf(spec.gamma)
                                  ? 1.0 / (1.0 - t)
                                  : 1.0 / (1.0 - t + t * std::exp(-2.0 * spec.gamma));
        const double w = path.levels[i];
        num += weight * w * path.increments[i];
        den += weight * weight * w * w * dt;
      }
      return num / std::sqrt(den);
    }
    case FunctionalKind::mixed_gaussian_ivx: {
      if (spec.studentized) return stream.next_gaussian();
      // Raw mixed normal: the cross-moment mixture from the instrument lemma
      // scaled by the stationary instrument variance omega_xx / (-2 c_z)
      // (unit predictive error variance).
      const PathGrid path = simulate_brownian(spec.grid_steps, stream);
      const ArrayXd j = simulate_ou(spec.c, path);
      double j_dj = 0.0;
      for (long i = 0; i < path.steps; ++i) j_dj += j[i] * (j[i + 1] - j[i]);
      const double cross = -(spec.omega_xx + j_dj) / spec.c_z;
      const double vzz = spec.omega_xx / (-2.0 * spec.c_z);
      return std::sqrt(vzz) * stream.next_gaussian() / cross;
    }
    case FunctionalKind::explosive_cauchy:
      return std::tan(3.141592653589793 * (stream.next_double() - 0.5));
    case FunctionalKind::v_over_u: {
      const double v = stream.next_gaussian();
      const double u = stream.next_gaussian();
      return v / u;
    }
  }
  throw DomainError("unknown functional kind");
}

EmpiricalDistribution reference_distribution(const ReferenceSpec& spec, std::uint64_t seed,
                                             int threads) {
  spec.validate();
  std::vector<double> draws(static_cast<std::size_t>(spec.draws));
  parallel_for(spec.draws, threads, [&](std::int64_t m) {
    rng::Stream sub = rng::make_stream(seed, static_cast<std::uint64_t>(m), rng::Channel::path);
    draws[static_cast<std::size_t>(m)] = functional_draw(spec, sub);
  });
  const std::uint64_t digest = rng::derive_key(
      {seed, static_cast<std::uint64_t>(spec.kind), static_cast<std::uint64_t>(spec.grid_steps),
       static_cast<std::uint64_t>(spec.draws)});
  return make_empirical(std::move(draws), digest);
}

}  // namespace ivxboot::limit
