#pragma once

#include "profex/optimize.hpp"
#include "profex/projection.hpp"
#include "profex/types.hpp"

#include <cstdint>
#include <vector>

namespace profex {

struct ConstrainedConfig {
  int n_starts = 5;
  // Hard log-barrier weights, decreasing; the last stage doubles as a polish
  // so boundary optima land within 1e-8 of the face.
  std::vector<double> barrier_weights = {1e-2, 1e-4, 1e-6, 1e-8};
  LbfgsConfig stage;  // per-stage quasi-Newton settings
  std::uint64_t seed = 1234;
  std::vector<Vector> extra_starts;  // warm starts, in x-space

  ConstrainedConfig() {
    stage.max_iter = 100;
    stage.pg_tol = 1e-6;
  }
};

struct ConstrainedResult {
  Vector x;
  double f = 0.0;
  bool degenerate = false;  // fiber was a single point
};

// maximize objective(x) subject to Psi^T x = eta (the fiber), x in box.
// Null-space reduction + log barrier on the box, LP-derived interior starts.
ConstrainedResult constrained_maximize(const Objective& objective, const GradientFn* gradient,
                                       const EqualityFiber& fiber, const BoxDomain& box,
                                       const ConstrainedConfig& cfg = {});

ConstrainedResult constrained_minimize(const Objective& objective, const GradientFn* gradient,
                                       const EqualityFiber& fiber, const BoxDomain& box,
                                       const ConstrainedConfig& cfg = {});

}  // namespace profex
