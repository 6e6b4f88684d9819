#pragma once

#include <stdexcept>
#include <string>

namespace ivxboot {

// Invalid parameter values (out-of-domain tuning constants, bad dimensions).
class DomainError : public std::invalid_argument {
 public:
  explicit DomainError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Data-dependent numeric degeneracy: zero denominators, singular moment
// matrices, degenerate instruments. CLI maps these to exit code 3.
class DegenerateSeriesError : public std::runtime_error {
 public:
  explicit DegenerateSeriesError(const std::string& msg) : std::runtime_error(msg) {}
};

// Misuse of an API contract (e.g. passing an OLS fit where IVX is required).
class ContractError : public std::logic_error {
 public:
  explicit ContractError(const std::string& msg) : std::logic_error(msg) {}
};

// Configuration file problems. CLI maps these to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace ivxboot
