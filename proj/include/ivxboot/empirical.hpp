#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "ivxboot/errors.hpp"

namespace ivxboot {

// Sorted draws of a scalar statistic; the common currency of bootstrap and
// limit-simulation output.
struct EmpiricalDistribution {
  std::vector<double> draws;  // ascending
  std::uint64_t meta = 0;     // generating-config digest
  long excluded = 0;          // degenerate replications dropped by the producer

  long size() const { return static_cast<long>(draws.size()); }

  // Order-statistic quantile: quantile(0) = min, quantile(1) = max.
  double quantile(double q) const {
    if (draws.empty()) throw DomainError("quantile of empty distribution");
    if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile level outside [0,1]");
    const auto b = static_cast<double>(draws.size());
    auto idx = static_cast<long>(std::ceil(q * b)) - 1;
    if (idx < 0) idx = 0;
    if (idx >= size()) idx = size() - 1;
    return draws[static_cast<std::size_t>(idx)];
  }

  // Right-continuous step CDF: fraction of draws <= x.
  double cdf(double x) const {
    if (draws.empty()) throw DomainError("cdf of empty distribution");
    const auto it = std::upper_bound(draws.begin(), draws.end(), x);
    return static_cast<double>(it - draws.begin()) / static_cast<double>(draws.size());
  }
};

inline EmpiricalDistribution make_empirical(std::vector<double> draws, std::uint64_t meta = 0,
                                            long excluded = 0) {
  if (draws.empty()) throw DomainError("empirical distribution needs at least one draw");
  std::sort(draws.begin(), draws.end());
  return EmpiricalDistribution{std::move(draws), meta, excluded};
}

}  // namespace ivxboot
