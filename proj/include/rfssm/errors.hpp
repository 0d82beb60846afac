#pragma once

#include <stdexcept>
#include <string>

namespace rfssm {

// Invalid configuration or model specification (bad dimensions, non-positive
// lengthscales, priors violating a0 > 2J, ...). CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// File / parse problems. CLI exit code 3.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical degeneracy: collapsed weights, non-SPD factors, degenerate
// predictive scales. Carries whatever context the thrower has (stream id,
// layer index). CLI exit code 4.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rfssm
