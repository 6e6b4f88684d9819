#pragma once

#include <Eigen/Dense>
#include <optional>

#include "ivxboot/rng.hpp"

namespace ivxboot::dgp {

using Eigen::ArrayXd;

// Autoregressive root rho_n = 1 + c / n^gamma, gamma in (0, 1].
double lur_coefficient(double c, double gamma, long n);

struct PersistenceSpec {
  enum class Kind { local_to_unity, fixed, block_moderate };
  Kind kind = Kind::local_to_unity;
  double c = 0.0;       // local_to_unity, block_moderate
  double gamma = 1.0;   // local_to_unity
  double rho = 0.0;     // fixed
  long m = 1;           // block_moderate: number of blocks
  long block_len = 1;   // block_moderate: observations per block (n = m * block_len)

  static PersistenceSpec local_to_unity(double c, double gamma = 1.0);
  static PersistenceSpec fixed(double rho);
  static PersistenceSpec block_moderate(double c, long m, long block_len);

  // Root implied for a sample of size n; validates domain constraints.
  double root(long n) const;
};

// Innovation pair (u_t, v_t): base draws are bivariate Gaussian with
// covariance sigma; v is the moving average sum c_j eps_{t-j} over ma_weights,
// u is AR(1) with coefficient error_ar (stationary initialization).
struct InnovationSpec {
  Eigen::Matrix2d sigma = Eigen::Matrix2d::Identity();
  ArrayXd ma_weights = ArrayXd::Ones(1);
  double error_ar = 0.0;

  void validate() const;
  // Lower-triangular factor of sigma (PSD-tolerant).
  Eigen::Matrix2d chol() const;
};

struct DgpSpec {
  double beta = 0.0;
  PersistenceSpec persistence;
  InnovationSpec innovations;
  long n = 0;
  double x0 = 0.0;

  void validate() const;
};

struct TimeSeriesPair {
  ArrayXd y;
  ArrayXd x;
  double x0 = 0.0;
  std::optional<ArrayXd> u;  // true innovations, retained when simulated
  std::optional<ArrayXd> v;
};

// Correlated base normals for (u, v), pre-sample rows included: row t of the
// returned (n + L + 1) x 2 matrix is the pair at time t - L - 1 + 1 = t - L,
// i.e. rows 0..L are burn-in/initialization draws, rows L+1.. are t = 1..n.
Eigen::MatrixX2d base_normal_pairs(const InnovationSpec& spec, long n, rng::Stream& stream);

// Deterministic core of simulate_innovation_pair: applies the MA filter to the
// v channel and the AR(1) filter to the u channel of caller-supplied base
// draws (the degenerate test hook).
std::pair<ArrayXd, ArrayXd> filter_innovation_pair(const InnovationSpec& spec,
                                                   const Eigen::MatrixX2d& base, long n);

std::pair<ArrayXd, ArrayXd> simulate_innovation_pair(const InnovationSpec& spec, long n,
                                                     rng::Stream& stream);

// x_t = rho x_{t-1} + v_t with x_0 given; output has length(v).
ArrayXd simulate_ar1(double rho, const Eigen::Ref<const ArrayXd>& v, double x0);

// Deterministic core of simulate_predictive_system for caller-supplied (u, v).
TimeSeriesPair assemble_predictive_system(const DgpSpec& spec, ArrayXd u, ArrayXd v);

TimeSeriesPair simulate_predictive_system(const DgpSpec& spec, rng::Stream& stream);

// AR(1) with root 1 + c*m/n over n = m*block_len observations, X_0 = 0.
// Requires c < 0.
ArrayXd simulate_block_moderate(double c, long m, long block_len, const InnovationSpec& innov,
                                rng::Stream& stream);

}  // namespace ivxboot::dgp
