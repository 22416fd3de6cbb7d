#include "profex/linprog.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace profex {

namespace {

// Tableau rows: m constraint rows plus the objective row. Basis tracked per
// constraint row. Bland's rule: entering = lowest-index eligible column,
// leaving = lowest-index basic among the ratio-test ties.
struct Tableau {
  Matrix T;               // (m+1) x (n+1); last column is rhs / -objective
  std::vector<Index> basis;
  Index m, n;
  Index n_enter;  // columns eligible to enter (phase 2 bars the artificials)
  double tol;

  void pivot(Index row, Index col) {
    T.row(row) /= T(row, col);
    for (Index r = 0; r < T.rows(); ++r) {
      if (r == row) continue;
      const double factor = T(r, col);
      if (factor != 0.0) T.row(r) -= factor * T.row(row);
    }
    basis[static_cast<size_t>(row)] = col;
  }

  // Returns false when unbounded.
  bool run() {
    for (int iter = 0; iter < 20000; ++iter) {
      Index enter = -1;
      for (Index j = 0; j < n_enter; ++j) {
        if (T(m, j) < -tol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;  // optimal
      Index leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (Index r = 0; r < m; ++r) {
        if (T(r, enter) > tol) {
          const double ratio = T(r, n) / T(r, enter);
          if (ratio < best_ratio - tol ||
              (ratio < best_ratio + tol &&
               (leave < 0 || basis[static_cast<size_t>(r)] < basis[static_cast<size_t>(leave)]))) {
            best_ratio = ratio;
            leave = r;
          }
        }
      }
      if (leave < 0) return false;  // unbounded
      pivot(leave, enter);
    }
    throw NumericError("simplex: iteration limit reached");
  }
};

}  // namespace

LpResult simplex_solve(const Matrix& A, const Vector& b, const Vector& c, double tol) {
  const Index m = A.rows();
  const Index n = A.cols();
  require(b.size() == m && c.size() == n, "simplex_solve: dimension mismatch");

  // Phase 1: artificial basis, rhs made nonnegative.
  Tableau tab;
  tab.m = m;
  tab.n = n + m;
  tab.n_enter = tab.n;
  tab.tol = tol;
  tab.T = Matrix::Zero(m + 1, tab.n + 1);
  for (Index r = 0; r < m; ++r) {
    const double sgn = b[r] < 0.0 ? -1.0 : 1.0;
    tab.T.block(r, 0, 1, n) = sgn * A.row(r);
    tab.T(r, n + r) = 1.0;
    tab.T(r, tab.n) = sgn * b[r];
    tab.basis.push_back(n + r);
  }
  // Phase-1 objective: sum of artificials, expressed over the current basis.
  for (Index j = 0; j <= tab.n; ++j) {
    double s = 0.0;
    for (Index r = 0; r < m; ++r) s += tab.T(r, j);
    tab.T(m, j) = (j >= n && j < tab.n) ? 1.0 - s : -s;
  }

  LpResult res;
  if (!tab.run()) throw NumericError("simplex: phase 1 unbounded (internal)");
  const double phase1 = -tab.T(m, tab.n);
  if (phase1 > tol * std::max(1.0, b.cwiseAbs().maxCoeff())) {
    res.status = LpResult::Status::infeasible;
    return res;
  }

  // Drive leftover artificials out of the basis (degenerate rows).
  for (Index r = 0; r < m; ++r) {
    if (tab.basis[static_cast<size_t>(r)] >= n) {
      Index col = -1;
      for (Index j = 0; j < n; ++j) {
        if (std::abs(tab.T(r, j)) > tol) {
          col = j;
          break;
        }
      }
      if (col >= 0) tab.pivot(r, col);
      // else: redundant constraint row; keep it, the artificial stays at 0
    }
  }

  // Phase 2: rebuild the objective row for c over the current basis; the
  // artificial columns stay in the tableau but may not enter. Any artificial
  // still basic sits on a redundant (all-zero) row and never moves.
  tab.n_enter = n;
  for (Index j = 0; j < tab.n; ++j) tab.T(m, j) = (j < n) ? c[j] : 0.0;
  tab.T(m, tab.n) = 0.0;
  for (Index r = 0; r < m; ++r) {
    const Index bcol = tab.basis[static_cast<size_t>(r)];
    if (bcol < n && c[bcol] != 0.0) tab.T.row(m) -= c[bcol] * tab.T.row(r);
  }
  if (!tab.run()) {
    res.status = LpResult::Status::unbounded;
    return res;
  }

  res.status = LpResult::Status::optimal;
  res.x = Vector::Zero(n);
  for (Index r = 0; r < m; ++r) {
    const Index bcol = tab.basis[static_cast<size_t>(r)];
    if (bcol < n) res.x[bcol] = tab.T(r, tab.n);
  }
  res.objective = c.dot(res.x);
  return res;
}

}  // namespace profex
