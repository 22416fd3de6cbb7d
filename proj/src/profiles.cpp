#include "profex/profiles.hpp"

#include "profex/rng.hpp"
#include "profex/threading.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

namespace profex {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::uint64_t kNodeTag = 0x9e0de;
}  // namespace

ProfileGrid grid_1d_range(double lo, double hi, int n) {
  require(n >= 2, "grid_1d: need at least 2 nodes");
  require(lo < hi, "grid_1d: empty range");
  ProfileGrid g;
  g.etas.resize(n, 1);
  for (int j = 0; j < n; ++j)
    g.etas(j, 0) = lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(n - 1);
  g.feasible.assign(static_cast<size_t>(n), true);
  g.shape = {n};
  return g;
}

ProfileGrid grid_1d(const Projection& proj, const BoxDomain& box, int n) {
  const auto [lo, hi] = eta_interval(proj, box);
  return grid_1d_range(lo, hi, n);
}

ProfileGrid grid_2d(const Projection& proj, const BoxDomain& box, int n1, int n2) {
  require(proj.p() == 2, "grid_2d: projection must have p = 2");
  require(n1 >= 2 && n2 >= 2, "grid_2d: need at least 2 nodes per axis");
  const Matrix bb = eta_bounding_box(proj, box);
  ProfileGrid g;
  g.etas.resize(static_cast<Index>(n1) * n2, 2);
  g.feasible.assign(static_cast<size_t>(n1) * n2, false);
  g.shape = {n1, n2};
  for (int i = 0; i < n1; ++i) {
    for (int j = 0; j < n2; ++j) {
      const Index r = static_cast<Index>(i) * n2 + j;
      g.etas(r, 0) = bb(0, 0) + (bb(0, 1) - bb(0, 0)) * i / static_cast<double>(n1 - 1);
      g.etas(r, 1) = bb(1, 0) + (bb(1, 1) - bb(1, 0)) * j / static_cast<double>(n2 - 1);
      try {
        lp_feasible_point(proj, g.etas.row(r).transpose(), box);
        g.feasible[static_cast<size_t>(r)] = true;
      } catch (const InfeasibleError&) {
        // masked node
      }
    }
  }
  return g;
}

namespace {

// ---------------- coordinate path ----------------

struct CoordReduced {
  Index coord;
  const BoxDomain* box;
  BoxDomain red;  // d-1 dims

  Vector embed(const Vector& z, double eta) const {
    const Index d = box->dim();
    Vector x(d);
    for (Index i = 0, k = 0; i < d; ++i) x[i] = (i == coord) ? eta : z[k++];
    return x;
  }
  Vector drop(const Vector& x) const {
    const Index d = box->dim();
    Vector z(d - 1);
    for (Index i = 0, k = 0; i < d; ++i)
      if (i != coord) z[k++] = x[i];
    return z;
  }
};

struct NodeBest {
  double value = -std::numeric_limits<double>::infinity();
  Vector x;
};

// One multi-start box solve of the reduced problem at a fixed eta.
NodeBest coord_solve(const CoordReduced& cr, const Objective& objective,
                     const GradientFn* gradient, double eta, bool maximize,
                     const std::vector<Vector>& starts, const LbfgsConfig& lcfg) {
  Objective red = [&](const Vector& z) { return objective(cr.embed(z, eta)); };
  GradientFn red_grad;
  if (gradient) {
    red_grad = [&](const Vector& z) {
      return Vector(cr.drop((*gradient)(cr.embed(z, eta))));
    };
  }
  NodeBest best;
  for (const Vector& s : starts) {
    OptResult r = maximize ? lbfgsb_maximize(red, gradient ? &red_grad : nullptr, cr.red, s, lcfg)
                           : lbfgsb_minimize(red, gradient ? &red_grad : nullptr, cr.red, s, lcfg);
    const double v = maximize ? r.f : -r.f;
    if (v > best.value + 1e-10 || best.x.size() == 0) {
      best.value = v;
      best.x = cr.embed(r.x, eta);
    }
  }
  if (!maximize) best.value = -best.value;  // stored as the true objective value
  return best;
}

std::vector<Vector> coord_starts(const CoordReduced& cr, int n_starts, std::uint64_t seed,
                                 Index node) {
  std::vector<Vector> starts;
  starts.push_back(0.5 * (cr.red.lower + cr.red.upper));
  if (cr.red.dim() == 1) {
    // near-bound starts so boundary basins are always probed
    starts.push_back(cr.red.lower + 0.02 * (cr.red.upper - cr.red.lower));
    starts.push_back(cr.red.lower + 0.98 * (cr.red.upper - cr.red.lower));
  }
  CounterRng rng(seed, derive_stream(kNodeTag, static_cast<std::uint64_t>(node)));
  for (int k = static_cast<int>(starts.size()); k < n_starts; ++k) {
    Vector s(cr.red.dim());
    for (Index i = 0; i < cr.red.dim(); ++i)
      s[i] = cr.red.lower[i] + (cr.red.upper[i] - cr.red.lower[i]) * rng.uniform();
    starts.push_back(std::move(s));
  }
  return starts;
}

}  // namespace

ProfileCurve coordinate_profiles(const Objective& objective, const GradientFn* gradient,
                                 Index coord, const BoxDomain& box, const ProfileGrid& grid,
                                 const ProfileConfig& cfg) {
  box.validate();
  require(coord >= 0 && coord < box.dim(), "coordinate_profiles: bad coordinate");
  require(grid.p() == 1, "coordinate_profiles: need a 1-d grid");
  const Index g = grid.size();
  const Index d = box.dim();
  for (Index j = 0; j < g; ++j)
    require(grid.etas(j, 0) >= box.lower[coord] - 1e-12 &&
                grid.etas(j, 0) <= box.upper[coord] + 1e-12,
            "coordinate_profiles: grid node outside the box");

  ProfileCurve curve;
  curve.etas = grid.etas.col(0);
  curve.sup.resize(g);
  curve.inf.resize(g);
  curve.argmax.resize(g, d);
  curve.argmin.resize(g, d);

  if (d == 1) {  // the fiber is a single point
    for (Index j = 0; j < g; ++j) {
      Vector x(1);
      x[0] = grid.etas(j, 0);
      curve.sup[j] = curve.inf[j] = objective(x);
      curve.argmax.row(j) = x.transpose();
      curve.argmin.row(j) = x.transpose();
    }
    return curve;
  }

  CoordReduced cr;
  cr.coord = coord;
  cr.box = &box;
  {
    Vector lo(d - 1), hi(d - 1);
    for (Index i = 0, k = 0; i < d; ++i) {
      if (i == coord) continue;
      lo[k] = box.lower[i];
      hi[k] = box.upper[i];
      ++k;
    }
    cr.red = BoxDomain(std::move(lo), std::move(hi));
  }

  const int n_starts = cfg.starts_for(1);
  // pass 1: independent multi-start per node
  parallel_for(g, cfg.threads, [&](Index j) {
    const double eta = grid.etas(j, 0);
    const auto starts = coord_starts(cr, n_starts, cfg.seed, j);
    NodeBest up = coord_solve(cr, objective, gradient, eta, true, starts, cfg.lbfgs);
    NodeBest dn = coord_solve(cr, objective, gradient, eta, false, starts, cfg.lbfgs);
    curve.sup[j] = up.value;
    curve.argmax.row(j) = up.x.transpose();
    curve.inf[j] = dn.value;
    curve.argmin.row(j) = dn.x.transpose();
  });

  // pass 2: ascending warm-start chain (always sequential)
  for (Index j = 1; j < g; ++j) {
    const double eta = grid.etas(j, 0);
    {
      std::vector<Vector> warm = {cr.red.clamp(cr.drop(curve.argmax.row(j - 1).transpose()))};
      NodeBest up = coord_solve(cr, objective, gradient, eta, true, warm, cfg.lbfgs);
      if (up.value > curve.sup[j] + 1e-10) {
        curve.sup[j] = up.value;
        curve.argmax.row(j) = up.x.transpose();
      }
    }
    {
      std::vector<Vector> warm = {cr.red.clamp(cr.drop(curve.argmin.row(j - 1).transpose()))};
      NodeBest dn = coord_solve(cr, objective, gradient, eta, false, warm, cfg.lbfgs);
      if (dn.value < curve.inf[j] - 1e-10) {
        curve.inf[j] = dn.value;
        curve.argmin.row(j) = dn.x.transpose();
      }
    }
  }
  return curve;
}

namespace {

// ---------------- general projection path ----------------

ConstrainedConfig make_ccfg(const ProfileConfig& cfg, Index p, Index node,
                            std::vector<Vector> extra) {
  ConstrainedConfig c;
  c.n_starts = cfg.starts_for(p);
  c.barrier_weights = cfg.barrier_weights;
  c.stage = cfg.lbfgs;
  c.stage.max_iter = std::min(cfg.lbfgs.max_iter, 100);
  c.stage.pg_tol = std::max(cfg.lbfgs.pg_tol, 1e-6);
  c.seed = derive_stream(cfg.seed, derive_stream(kNodeTag, static_cast<std::uint64_t>(node)));
  c.extra_starts = std::move(extra);
  return c;
}

}  // namespace

ProfileCurve oblique_profiles(const Objective& objective, const GradientFn* gradient,
                              const Projection& proj, const BoxDomain& box,
                              const ProfileGrid& grid, const ProfileConfig& cfg) {
  box.validate();
  proj.validate();
  require(proj.p() == 1, "oblique_profiles: projection must have p = 1");
  require(grid.p() == 1, "oblique_profiles: need a 1-d grid");

  // normalize the direction; eta values are interpreted in the caller's units
  const double nrm = proj.psi.col(0).norm();
  Projection unit = proj;
  unit.psi = proj.psi / nrm;

  const Index g = grid.size();
  const Index d = box.dim();
  ProfileCurve curve;
  curve.etas = grid.etas.col(0);
  curve.sup.resize(g);
  curve.inf.resize(g);
  curve.argmax.resize(g, d);
  curve.argmin.resize(g, d);

  const Matrix N = null_space(unit);

  auto fiber_at = [&](Index j) {
    EqualityFiber f;
    f.projection = unit;
    f.eta = Vector::Constant(1, grid.etas(j, 0) / nrm);
    f.xi = lp_feasible_point(unit, f.eta, box);
    f.nullbasis = N;
    return f;
  };

  parallel_for(g, cfg.threads, [&](Index j) {
    EqualityFiber f = fiber_at(j);
    auto up = constrained_maximize(objective, gradient, f, box, make_ccfg(cfg, 1, j, {}));
    auto dn = constrained_minimize(objective, gradient, f, box, make_ccfg(cfg, 1, j, {}));
    curve.sup[j] = up.f;
    curve.argmax.row(j) = up.x.transpose();
    curve.inf[j] = dn.f;
    curve.argmin.row(j) = dn.x.transpose();
  });

  for (Index j = 1; j < g; ++j) {
    EqualityFiber f = fiber_at(j);
    {
      auto up = constrained_maximize(objective, gradient, f, box,
                                     make_ccfg(cfg, 1, j, {curve.argmax.row(j - 1).transpose()}));
      if (up.f > curve.sup[j] + 1e-10) {
        curve.sup[j] = up.f;
        curve.argmax.row(j) = up.x.transpose();
      }
    }
    {
      auto dn = constrained_minimize(objective, gradient, f, box,
                                     make_ccfg(cfg, 1, j, {curve.argmin.row(j - 1).transpose()}));
      if (dn.f < curve.inf[j] - 1e-10) {
        curve.inf[j] = dn.f;
        curve.argmin.row(j) = dn.x.transpose();
      }
    }
  }
  return curve;
}

ProfileMap bivariate_profiles(const Objective& objective, const GradientFn* gradient,
                              const Projection& proj, const BoxDomain& box,
                              const ProfileGrid& lattice, const ProfileConfig& cfg) {
  box.validate();
  proj.validate();
  require(proj.p() == 2, "bivariate_profiles: projection must have p = 2");
  require(lattice.p() == 2, "bivariate_profiles: need a 2-d lattice");
  require(box.dim() - 2 >= 1, "bivariate_profiles: need d - p >= 1");

  const Index g = lattice.size();
  const Index d = box.dim();
  ProfileMap map;
  map.grid = lattice;
  map.sup = Vector::Constant(g, kNaN);
  map.inf = Vector::Constant(g, kNaN);
  map.argmax = Matrix::Constant(g, d, kNaN);
  map.argmin = Matrix::Constant(g, d, kNaN);

  const Matrix N = null_space(proj);
  auto fiber_at = [&](Index j) {
    EqualityFiber f;
    f.projection = proj;
    f.eta = lattice.etas.row(j).transpose();
    f.xi = lp_feasible_point(proj, f.eta, box);
    f.nullbasis = N;
    return f;
  };

  parallel_for(g, cfg.threads, [&](Index j) {
    if (!lattice.feasible[static_cast<size_t>(j)]) return;
    EqualityFiber f = fiber_at(j);
    auto up = constrained_maximize(objective, gradient, f, box, make_ccfg(cfg, 2, j, {}));
    auto dn = constrained_minimize(objective, gradient, f, box, make_ccfg(cfg, 2, j, {}));
    map.sup[j] = up.f;
    map.argmax.row(j) = up.x.transpose();
    map.inf[j] = dn.f;
    map.argmin.row(j) = dn.x.transpose();
  });

  // warm chain along each lattice row (fast axis)
  const int n2 = lattice.shape[1];
  for (Index j = 0; j < g; ++j) {
    if (j % n2 == 0) continue;  // row start
    const Index prev = j - 1;
    if (!lattice.feasible[static_cast<size_t>(j)] || !lattice.feasible[static_cast<size_t>(prev)])
      continue;
    EqualityFiber f = fiber_at(j);
    {
      auto up = constrained_maximize(objective, gradient, f, box,
                                     make_ccfg(cfg, 2, j, {map.argmax.row(prev).transpose()}));
      if (up.f > map.sup[j] + 1e-10) {
        map.sup[j] = up.f;
        map.argmax.row(j) = up.x.transpose();
      }
    }
    {
      auto dn = constrained_minimize(objective, gradient, f, box,
                                     make_ccfg(cfg, 2, j, {map.argmin.row(prev).transpose()}));
      if (dn.f < map.inf[j] - 1e-10) {
        map.inf[j] = dn.f;
        map.argmin.row(j) = dn.x.transpose();
      }
    }
  }
  return map;
}

namespace {

enum class NodeState { non, und, exc };

NodeState state_of(const ProfileCurve& c, Index j, double tau) {
  if (c.sup[j] < tau) return NodeState::non;
  if (c.inf[j] >= tau) return NodeState::exc;
  return NodeState::und;
}

double linear_crossing(double e0, double v0, double e1, double v1, double tau) {
  if (v1 == v0) return 0.5 * (e0 + e1);
  double t = (tau - v0) / (v1 - v0);
  t = std::clamp(t, 0.0, 1.0);
  return e0 + t * (e1 - e0);
}

// Boolean bisection on "profile < tau" inside one grid cell; the endpoint
// states come from the already-computed curve, so a re-solve that lands in a
// different local basin only shifts the estimate inside the cell.
double refine_crossing(const std::function<double(double)>& eval, double a, double b, double tau,
                       bool below_on_left, int max_iter) {
  for (int it = 0; it < max_iter; ++it) {
    const double m = 0.5 * (a + b);
    const bool below = eval(m) < tau;
    if (below == below_on_left) {
      a = m;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

ExcursionIntervals excursion_intervals(const ProfileCurve& curve, double tau,
                                       const CrossingRefiner* refiner) {
  const Index g = curve.etas.size();
  require(g >= 2, "excursion_intervals: need at least 2 grid points");

  ExcursionIntervals out;
  out.tau = tau;
  double cell = std::numeric_limits<double>::infinity();
  for (Index j = 1; j < g; ++j) cell = std::min(cell, curve.etas[j] - curve.etas[j - 1]);

  auto crossing = [&](Index j, bool on_sup) {
    const double e0 = curve.etas[j], e1 = curve.etas[j + 1];
    const double v0 = on_sup ? curve.sup[j] : curve.inf[j];
    const double v1 = on_sup ? curve.sup[j + 1] : curve.inf[j + 1];
    if (refiner) {
      const auto& ev = on_sup ? refiner->sup_eval : refiner->inf_eval;
      if (ev) return refine_crossing(ev, e0, e1, tau, v0 < tau, refiner->max_iter);
    }
    return linear_crossing(e0, v0, e1, v1, tau);
  };

  auto push = [&](NodeState s, double lo, double hi) {
    if (hi <= lo) return;
    Interval iv{lo, hi, (hi - lo) < cell};
    switch (s) {
      case NodeState::non: out.non_excursion.push_back(iv); break;
      case NodeState::exc: out.excursion.push_back(iv); break;
      case NodeState::und: out.undetermined.push_back(iv); break;
    }
  };

  double pos = curve.etas[0];
  NodeState cur = state_of(curve, 0, tau);
  for (Index j = 0; j + 1 < g; ++j) {
    const NodeState nxt = state_of(curve, j + 1, tau);
    if (nxt == cur) continue;
    const bool non_side = cur == NodeState::non || nxt == NodeState::non;
    const bool exc_side = cur == NodeState::exc || nxt == NodeState::exc;
    if (non_side && exc_side) {
      // jump across the undetermined band inside one cell
      double c_sup = crossing(j, true);
      double c_inf = crossing(j, false);
      double lo = std::min(c_sup, c_inf), hi = std::max(c_sup, c_inf);
      const double first = (cur == NodeState::non) ? c_sup : c_inf;
      push(cur, pos, first);
      push(NodeState::und, lo, hi);
      pos = (nxt == NodeState::non) ? c_sup : c_inf;
      if (pos < hi) pos = hi;
    } else {
      const double c = crossing(j, non_side);
      push(cur, pos, c);
      pos = c;
    }
    cur = nxt;
  }
  push(cur, pos, curve.etas[g - 1]);
  return out;
}

CrossingRefiner exact_refiner_coordinate(Objective objective, const GradientFn* gradient,
                                         Index coord, const BoxDomain& box,
                                         const ProfileConfig& cfg) {
  std::shared_ptr<GradientFn> grad =
      gradient ? std::make_shared<GradientFn>(*gradient) : nullptr;
  auto solve = [objective, grad, coord, box, cfg](double eta, bool maximize) {
    ProfileGrid one;
    one.etas = Matrix::Constant(1, 1, eta);
    one.feasible.assign(1, true);
    one.shape = {1};
    ProfileConfig c = cfg;
    c.threads = 1;
    ProfileCurve curve = coordinate_profiles(objective, grad.get(), coord, box, one, c);
    return maximize ? curve.sup[0] : curve.inf[0];
  };
  CrossingRefiner r;
  r.sup_eval = [solve](double eta) { return solve(eta, true); };
  r.inf_eval = [solve](double eta) { return solve(eta, false); };
  return r;
}

CrossingRefiner exact_refiner_projection(Objective objective, const GradientFn* gradient,
                                         const Projection& proj, const BoxDomain& box,
                                         const ProfileConfig& cfg) {
  std::shared_ptr<GradientFn> grad =
      gradient ? std::make_shared<GradientFn>(*gradient) : nullptr;
  auto solve = [objective, grad, proj, box, cfg](double eta, bool maximize) {
    ProfileGrid one;
    one.etas = Matrix::Constant(1, 1, eta);
    one.feasible.assign(1, true);
    one.shape = {1};
    ProfileConfig c = cfg;
    c.threads = 1;
    ProfileCurve curve = oblique_profiles(objective, grad.get(), proj, box, one, c);
    return maximize ? curve.sup[0] : curve.inf[0];
  };
  CrossingRefiner r;
  r.sup_eval = [solve](double eta) { return solve(eta, true); };
  r.inf_eval = [solve](double eta) { return solve(eta, false); };
  return r;
}

namespace {

Vector slopes_impl(const ProfileCurve& curve, const Matrix& args, const GradientFn& gradient,
                   const Projection& proj) {
  require(proj.p() == 1, "profile slopes: projection must have p = 1");
  require(args.rows() == curve.etas.size() && args.cols() > 0,
          "profile slopes: curve carries no argmax/argmin trace");
  const double nrm2 = proj.psi.col(0).squaredNorm();
  Vector s(curve.etas.size());
  for (Index j = 0; j < s.size(); ++j)
    s[j] = gradient(args.row(j).transpose()).dot(proj.psi.col(0)) / nrm2;
  return s;
}

}  // namespace

Vector profile_sup_slopes(const ProfileCurve& curve, const GradientFn& gradient,
                          const Projection& proj) {
  return slopes_impl(curve, curve.argmax, gradient, proj);
}

Vector profile_inf_slopes(const ProfileCurve& curve, const GradientFn& gradient,
                          const Projection& proj) {
  return slopes_impl(curve, curve.argmin, gradient, proj);
}

}  // namespace profex
