#pragma once

#include <Eigen/Dense>

#include "ivxboot/empirical.hpp"
#include "ivxboot/rng.hpp"

namespace ivxboot::limit {

using Eigen::ArrayXd;

// Brownian path on the grid {0, 1/N, ..., 1}: increments of variance 1/N and
// cumulated levels (levels has N+1 entries, levels[0] = 0).
struct PathGrid {
  long steps = 0;
  ArrayXd increments;  // N entries
  ArrayXd levels;      // N+1 entries
  double dt() const { return 1.0 / static_cast<double>(steps); }
};

PathGrid simulate_brownian(long steps, rng::Stream& stream);
PathGrid path_from_increments(ArrayXd increments);

// Ornstein-Uhlenbeck levels J_c on the same grid by exact one-step transition,
// coupled to the path through its standardized increments (c = 0 reproduces
// the Brownian levels bitwise).
ArrayXd simulate_ou(double c, const PathGrid& path);

// Exact OU one-step noise variance (e^{2c dt} - 1) / (2c), continuous at c=0.
double ou_step_variance(double c, double dt);

// Left Ito sum: sum f(t_i) (w_{i+1} - w_i); integrand holds grid levels.
double ito_left_sum(const PathGrid& path, const Eigen::Ref<const ArrayXd>& integrand);

// Left Riemann time integral of the squared (or weighted) levels.
double left_riemann(const PathGrid& path, const Eigen::Ref<const ArrayXd>& values);

enum class FunctionalKind {
  df_xi,              // (W(1)^2 - 1) / (2 sqrt(int W^2))
  df_ratio,           // int W dW / int W^2
  ou_ratio,           // int J_c dW / int J_c^2
  psi_gamma,          // weighted unit-root functional with weight (1-t+te^{-2g})^{-1}
  mixed_gaussian_ivx, // studentized: standard normal; set studentized=false for the raw form
  explosive_cauchy,   // standard Cauchy via inverse CDF
  v_over_u,           // ratio of two independent standard normals
};

struct ReferenceSpec {
  FunctionalKind kind = FunctionalKind::df_ratio;
  long grid_steps = 2000;   // N
  long draws = 20000;       // M
  double c = 0.0;           // ou_ratio, mixed_gaussian_ivx
  double gamma = 1.0;       // psi_gamma; +infinity selects the (1-t)^{-1} weight
  double c_z = -1.0;        // mixed_gaussian_ivx
  double omega_xx = 1.0;    // mixed_gaussian_ivx, unstudentized form
  bool studentized = true;  // mixed_gaussian_ivx

  void validate() const;
};

double functional_draw(const ReferenceSpec& spec, rng::Stream& stream);

// M independent draws on per-draw substreams, assembled by draw index.
EmpiricalDistribution reference_distribution(const ReferenceSpec& spec, std::uint64_t seed,
                                             int threads = 1);

}  // namespace ivxboot::limit
