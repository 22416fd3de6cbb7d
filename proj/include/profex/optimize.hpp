#pragma once

#include "profex/types.hpp"

#include <functional>
#include <optional>

namespace profex {

struct BoxDomain {
  Vector lower;
  Vector upper;

  BoxDomain() = default;
  BoxDomain(Vector lo, Vector hi) : lower(std::move(lo)), upper(std::move(hi)) { validate(); }
  static BoxDomain unit(Index d) {
    return BoxDomain(Vector::Zero(d), Vector::Ones(d));
  }

  Index dim() const { return lower.size(); }
  void validate() const;
  bool contains(const Vector& x, double tol = 0.0) const;
  Vector clamp(const Vector& x) const;
};

using Objective = std::function<double(const Vector&)>;
using GradientFn = std::function<Vector(const Vector&)>;

struct LbfgsConfig {
  int memory = 5;
  int max_iter = 200;
  double pg_tol = 1e-8;   // stop when ||proj grad||_inf <= pg_tol * max(1,|f|)
  double fd_step = 1e-6;  // central-difference step scale for numeric gradients
};

struct OptResult {
  Vector x;
  double f = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

// Central differences, step 1e-6*max(1,|x_i|); switches to one-sided at the
// box boundary when a box is given.
Vector numerical_gradient(const Objective& f, const Vector& x, double step_scale,
                          const BoxDomain* box = nullptr);

// Projected limited-memory BFGS with a strong-Wolfe line search on the ray,
// capped at the first bound crossing. `gradient` may be null (numeric fallback).
OptResult lbfgsb_minimize(const Objective& f, const GradientFn* gradient, const BoxDomain& box,
                          const Vector& start, const LbfgsConfig& cfg = {});
OptResult lbfgsb_maximize(const Objective& f, const GradientFn* gradient, const BoxDomain& box,
                          const Vector& start, const LbfgsConfig& cfg = {});

}  // namespace profex
