#pragma once

#include "profex/types.hpp"

namespace profex {

// Dense two-phase primal simplex with Bland's rule, for the tiny auxiliary
// programs (feasible fiber points, max-slack starts). Standard form:
//   min c'x  s.t.  A x = b,  x >= 0.
struct LpResult {
  enum class Status { optimal, infeasible, unbounded };
  Status status = Status::infeasible;
  Vector x;
  double objective = 0.0;
};

LpResult simplex_solve(const Matrix& A, const Vector& b, const Vector& c, double tol = 1e-10);

}  // namespace profex
