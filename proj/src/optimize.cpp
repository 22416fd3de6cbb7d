#include "profex/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace profex {

void BoxDomain::validate() const {
  require(lower.size() == upper.size() && lower.size() >= 1, "BoxDomain: bad bounds");
  require((lower.array() < upper.array()).all(), "BoxDomain: lower must be < upper");
}

bool BoxDomain::contains(const Vector& x, double tol) const {
  return (x.array() >= lower.array() - tol).all() && (x.array() <= upper.array() + tol).all();
}

Vector BoxDomain::clamp(const Vector& x) const {
  return x.cwiseMax(lower).cwiseMin(upper);
}

Vector numerical_gradient(const Objective& f, const Vector& x, double step_scale,
                          const BoxDomain* box) {
  const Index d = x.size();
  Vector g(d);
  Vector xp = x, xm = x;
  for (Index i = 0; i < d; ++i) {
    const double h = step_scale * std::max(1.0, std::abs(x[i]));
    double hi_room = std::numeric_limits<double>::infinity();
    double lo_room = hi_room;
    if (box) {
      hi_room = box->upper[i] - x[i];
      lo_room = x[i] - box->lower[i];
    }
    if (hi_room >= h && lo_room >= h) {
      xp[i] = x[i] + h;
      xm[i] = x[i] - h;
      g[i] = (f(xp) - f(xm)) / (2.0 * h);
    } else if (hi_room >= h) {
      xp[i] = x[i] + h;
      g[i] = (f(xp) - f(x)) / h;
    } else {
      xm[i] = x[i] - h;
      g[i] = (f(x) - f(xm)) / h;
    }
    xp[i] = x[i];
    xm[i] = x[i];
  }
  return g;
}

namespace {

constexpr double kArmijoC1 = 1e-4;
constexpr double kWolfeC2 = 0.9;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Pair {
  Vector s, y;
  double rho;
};

// Two-loop recursion; gradient components of the active set are zeroed by
// the caller.
Vector lbfgs_direction(const std::deque<Pair>& mem, const Vector& g) {
  Vector q = -g;
  if (mem.empty()) return q;
  std::vector<double> alpha(mem.size());
  for (size_t i = mem.size(); i-- > 0;) {
    alpha[i] = mem[i].rho * mem[i].s.dot(q);
    q -= alpha[i] * mem[i].y;
  }
  const Pair& last = mem.back();
  const double gamma = last.s.dot(last.y) / last.y.squaredNorm();
  q *= gamma;
  for (size_t i = 0; i < mem.size(); ++i) {
    const double beta = mem[i].rho * mem[i].y.dot(q);
    q += (alpha[i] - beta) * mem[i].s;
  }
  return q;
}

struct LineSearchOut {
  double alpha = 0.0;
  double f = kInf;
  bool ok = false;
  bool all_nonfinite = false;
  int evals = 0;
};

// Strong Wolfe on phi(a) = f(x + a*dir), a in (0, cap]. phi0/dphi0 at a=0.
// Non-finite trial values are treated as +inf (forces the bracket down).
LineSearchOut wolfe_search(const std::function<double(double)>& phi,
                           const std::function<double(double)>& dphi, double phi0,
                           double dphi0, double cap) {
  LineSearchOut out;
  double a_prev = 0.0, f_prev = phi0;
  double a = std::min(1.0, cap);
  double a_lo = -1.0, a_hi = -1.0, f_lo = 0.0;
  bool saw_finite = false;

  for (int it = 0; it < 25 && out.alpha == 0.0; ++it) {
    double fa = phi(a);
    ++out.evals;
    if (std::isfinite(fa)) saw_finite = true;
    const bool armijo_fail = !std::isfinite(fa) || fa > phi0 + kArmijoC1 * a * dphi0 ||
                             (it > 0 && fa >= f_prev);
    if (armijo_fail) {
      a_lo = a_prev;
      f_lo = f_prev;
      a_hi = a;
      break;
    }
    const double da = dphi(a);
    ++out.evals;
    if (std::abs(da) <= -kWolfeC2 * dphi0) {
      out.alpha = a;
      out.f = fa;
      out.ok = true;
      return out;
    }
    if (da >= 0.0) {
      a_lo = a;
      f_lo = fa;
      a_hi = a_prev;
      break;
    }
    if (a >= cap * (1.0 - 1e-14)) {
      // Ran into the box; Armijo holds, curvature unreachable.
      out.alpha = a;
      out.f = fa;
      out.ok = true;
      return out;
    }
    a_prev = a;
    f_prev = fa;
    a = std::min(2.0 * a, cap);
  }

  if (a_lo < 0.0) {
    out.all_nonfinite = !saw_finite;
    return out;  // bracketing failed
  }

  // zoom
  for (int it = 0; it < 40; ++it) {
    const double mid = 0.5 * (a_lo + a_hi);
    if (std::abs(a_hi - a_lo) < 1e-16 * std::max(1.0, std::abs(a_lo))) break;
    double fm = phi(mid);
    ++out.evals;
    if (std::isfinite(fm)) saw_finite = true;
    if (!std::isfinite(fm) || fm > phi0 + kArmijoC1 * mid * dphi0 || fm >= f_lo) {
      a_hi = mid;
      continue;
    }
    const double dm = dphi(mid);
    ++out.evals;
    if (std::abs(dm) <= -kWolfeC2 * dphi0) {
      out.alpha = mid;
      out.f = fm;
      out.ok = true;
      return out;
    }
    if (dm * (a_hi - a_lo) >= 0.0) a_hi = a_lo;
    a_lo = mid;
    f_lo = fm;
  }
  if (a_lo > 0.0 && f_lo < phi0) {
    out.alpha = a_lo;
    out.f = f_lo;
    out.ok = true;
    return out;
  }
  out.all_nonfinite = !saw_finite;
  return out;
}

}  // namespace

OptResult lbfgsb_minimize(const Objective& f, const GradientFn* gradient, const BoxDomain& box,
                          const Vector& start, const LbfgsConfig& cfg) {
  box.validate();
  require(start.size() == box.dim(), "lbfgsb: start dimension mismatch");
  const Index d = box.dim();
  const Vector span = box.upper - box.lower;

  OptResult res;
  Vector x = box.clamp(start);
  int evals = 0;
  auto eval_f = [&](const Vector& p) {
    ++evals;
    return f(p);
  };
  auto eval_g = [&](const Vector& p) -> Vector {
    if (gradient) return (*gradient)(p);
    evals += 2 * static_cast<int>(d);
    return numerical_gradient(f, p, cfg.fd_step, &box);
  };

  double fx = eval_f(x);
  if (!std::isfinite(fx))
    throw OptimizerError("objective is non-finite at the start point", x, fx);
  Vector g = eval_g(x);

  std::deque<Pair> mem;
  auto projected_grad = [&](const Vector& xx, const Vector& gg) {
    Vector pg = gg;
    for (Index i = 0; i < d; ++i) {
      if (xx[i] <= box.lower[i] && gg[i] > 0.0) pg[i] = 0.0;
      if (xx[i] >= box.upper[i] && gg[i] < 0.0) pg[i] = 0.0;
    }
    return pg;
  };

  for (res.iterations = 0; res.iterations < cfg.max_iter; ++res.iterations) {
    Vector pg = projected_grad(x, g);
    if (pg.lpNorm<Eigen::Infinity>() <= cfg.pg_tol * std::max(1.0, std::abs(fx))) {
      res.converged = true;
      break;
    }

    Vector dir = lbfgs_direction(mem, pg);
    for (Index i = 0; i < d; ++i) {
      if (pg[i] == 0.0) dir[i] = 0.0;  // keep active bounds active
    }
    if (dir.dot(pg) > -1e-14 * dir.norm() * pg.norm() || !dir.allFinite()) {
      mem.clear();
      dir = -pg;
    }

    // step cap at the first bound crossing
    double cap = kInf;
    for (Index i = 0; i < d; ++i) {
      if (dir[i] > 0.0) cap = std::min(cap, (box.upper[i] - x[i]) / dir[i]);
      if (dir[i] < 0.0) cap = std::min(cap, (box.lower[i] - x[i]) / dir[i]);
    }
    if (!(cap > 0.0)) {
      mem.clear();
      dir = -pg;
      cap = kInf;
      for (Index i = 0; i < d; ++i) {
        if (dir[i] > 0.0) cap = std::min(cap, (box.upper[i] - x[i]) / dir[i]);
        if (dir[i] < 0.0) cap = std::min(cap, (box.lower[i] - x[i]) / dir[i]);
      }
      if (!(cap > 0.0)) break;  // fully blocked corner
    }

    Vector g_trial;
    double g_trial_alpha = -1.0;
    auto phi = [&](double a) { return eval_f(x + a * dir); };
    auto dphi = [&](double a) {
      g_trial = eval_g(x + a * dir);
      g_trial_alpha = a;
      return g_trial.dot(dir);
    };
    const double dphi0 = g.dot(dir);
    if (dphi0 >= 0.0) {
      mem.clear();
      continue;
    }
    LineSearchOut ls = wolfe_search(phi, dphi, fx, dphi0, std::isfinite(cap) ? cap : 1e16);
    if (!ls.ok) {
      if (ls.all_nonfinite)
        throw OptimizerError("objective became non-finite along the search ray", x, fx);
      if (!mem.empty()) {
        mem.clear();
        continue;  // retry with steepest descent
      }
      break;  // no progress possible
    }

    Vector x_new = x + ls.alpha * dir;
    // snap onto bounds reached up to roundoff
    for (Index i = 0; i < d; ++i) {
      if (std::abs(x_new[i] - box.lower[i]) <= 1e-12 * span[i]) x_new[i] = box.lower[i];
      if (std::abs(x_new[i] - box.upper[i]) <= 1e-12 * span[i]) x_new[i] = box.upper[i];
    }
    x_new = box.clamp(x_new);
    Vector g_new = (g_trial_alpha == ls.alpha) ? g_trial : eval_g(x_new);

    Vector s = x_new - x;
    Vector yv = g_new - g;
    const double sy = s.dot(yv);
    if (sy > 1e-10 * s.norm() * yv.norm()) {
      mem.push_back({std::move(s), std::move(yv), 1.0 / sy});
      if (static_cast<int>(mem.size()) > cfg.memory) mem.pop_front();
    }
    const double f_new = ls.f;
    const bool stalled = std::abs(fx - f_new) <= 1e-15 * std::max(1.0, std::abs(fx)) &&
                         (x_new - x).lpNorm<Eigen::Infinity>() <= 1e-14;
    x = std::move(x_new);
    g = std::move(g_new);
    fx = f_new;
    if (stalled) break;
  }

  res.x = x;
  res.f = fx;
  res.evaluations = evals;
  return res;
}

OptResult lbfgsb_maximize(const Objective& f, const GradientFn* gradient, const BoxDomain& box,
                          const Vector& start, const LbfgsConfig& cfg) {
  Objective nf = [&f](const Vector& x) { return -f(x); };
  GradientFn ng;
  OptResult r;
  if (gradient) {
    ng = [gradient](const Vector& x) { return Vector(-(*gradient)(x)); };
    r = lbfgsb_minimize(nf, &ng, box, start, cfg);
  } else {
    r = lbfgsb_minimize(nf, nullptr, box, start, cfg);
  }
  r.f = -r.f;
  return r;
}

}  // namespace profex
