#pragma once

#include <stdexcept>
#include <string>

namespace skewgof {

// Numerical failure (non-convergence, loss of positive definiteness, ...).
// The CLI maps this to exit code 4.
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or unusable input data (CSV, JSON specs, config files).
// The CLI maps this to exit code 3.
class data_error : public std::runtime_error {
 public:
  explicit data_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace skewgof
