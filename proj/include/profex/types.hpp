#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace profex {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Eigen::Index;

// Thrown when a linear-algebra step fails beyond recovery (e.g. Cholesky
// after the jitter ladder is exhausted).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown when a requested point/fiber is outside the reachable set.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown when model construction violates a fit-time contract
// (rank-deficient trend, duplicate design points, ...).
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown when an optimizer hits a non-finite objective; carries the last
// valid iterate so callers can annotate and continue.
class OptimizerError : public std::runtime_error {
 public:
  OptimizerError(const std::string& what, Vector last_iterate, double last_value)
      : std::runtime_error(what),
        last_iterate(std::move(last_iterate)),
        last_value(last_value) {}
  Vector last_iterate;
  double last_value;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace profex
