#include "profex/constrained.hpp"

#include "profex/rng.hpp"

#include <cmath>
#include <limits>

namespace profex {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct ReducedProblem {
  Vector xi;               // base point on the fiber (interior of its face)
  Matrix N;                // d x q directions spanning the fiber's face
  std::vector<Index> varying;  // coordinates the barrier watches
  bool point = false;      // fiber is a single point
};

std::vector<Index> varying_rows(const Matrix& N) {
  std::vector<Index> rows;
  for (Index i = 0; i < N.rows(); ++i)
    if (N.row(i).norm() > 1e-12) rows.push_back(i);
  return rows;
}

// Builds the reduced problem, handling fibers that live on a box face
// (max slack 0): coordinates constant across the fiber are detected with
// range LPs and frozen, and the directions are restricted to the face.
ReducedProblem reduce_fiber(const EqualityFiber& fiber, const BoxDomain& box) {
  ReducedProblem rp;
  const Index d = box.dim();
  FeasiblePoint fp = lp_max_slack_point(fiber.projection, fiber.eta, box);

  if (fp.slack > 1e-9) {
    rp.xi = fp.xi;
    rp.N = fiber.nullbasis;
    rp.varying = varying_rows(rp.N);
    rp.point = rp.N.cols() == 0;
    return rp;
  }

  // Boundary fiber: freeze the constant coordinates.
  std::vector<bool> free_coord(static_cast<size_t>(d), true);
  Vector fixed = fp.xi;
  Index n_free = 0;
  for (Index i = 0; i < d; ++i) {
    auto [lo, hi] = fiber_coordinate_range(fiber.projection, fiber.eta, box, i);
    if (hi - lo <= 1e-10 * (box.upper[i] - box.lower[i])) {
      free_coord[static_cast<size_t>(i)] = false;
      fixed[i] = 0.5 * (lo + hi);
    } else {
      ++n_free;
    }
  }
  if (n_free == 0) {
    rp.xi = fixed;
    rp.point = true;
    rp.N = Matrix::Zero(d, 0);
    return rp;
  }

  // Null space of [Psi, e_i (i frozen)]^T: directions that keep both the
  // projection value and the frozen coordinates.
  Matrix M(d, fiber.projection.p() + (d - n_free));
  M.leftCols(fiber.projection.p()) = fiber.projection.psi;
  Index col = fiber.projection.p();
  for (Index i = 0; i < d; ++i) {
    if (!free_coord[static_cast<size_t>(i)]) {
      M.col(col).setZero();
      M(i, col) = 1.0;
      ++col;
    }
  }
  Eigen::FullPivHouseholderQR<Matrix> qr(M);
  const Index rank = qr.rank();
  if (rank >= d) {
    rp.xi = fixed;
    rp.point = true;
    rp.N = Matrix::Zero(d, 0);
    return rp;
  }
  Matrix Q = qr.matrixQ();
  rp.N = Q.rightCols(d - rank);
  for (Index c = 0; c < rp.N.cols(); ++c) {
    for (Index r = 0; r < d; ++r) {
      if (std::abs(rp.N(r, c)) > 1e-12) {
        if (rp.N(r, c) < 0.0) rp.N.col(c) = -rp.N.col(c);
        break;
      }
    }
  }
  rp.varying = varying_rows(rp.N);

  // Interior point of the face.
  FeasiblePoint face_fp = lp_max_slack_on_face(fiber.projection, fiber.eta, box, free_coord, fixed);
  rp.xi = face_fp.xi;
  rp.point = rp.N.cols() == 0;
  return rp;
}

struct Stage {
  const Objective& obj;
  const GradientFn* grad;
  const BoxDomain& box;
  const ReducedProblem& rp;
  double mu;
  LbfgsConfig cfg;

  double value(const Vector& z) const {
    const Vector x = rp.xi + rp.N * z;
    double pen = 0.0;
    for (Index i : rp.varying) {
      const double slo = x[i] - box.lower[i];
      const double shi = box.upper[i] - x[i];
      if (slo <= 0.0 || shi <= 0.0) return kNegInf;
      pen += std::log(slo) + std::log(shi);
    }
    const double g = obj(x);
    if (!std::isfinite(g)) return kNegInf;
    return g + mu * pen;
  }

  Vector gradient(const Vector& z) const {
    const Vector x = rp.xi + rp.N * z;
    Vector gx = grad ? (*grad)(x) : numerical_gradient(obj, x, 1e-6, &box);
    Vector gz = rp.N.transpose() * gx;
    for (Index i : rp.varying) {
      const double slo = x[i] - box.lower[i];
      const double shi = box.upper[i] - x[i];
      gz += mu * (1.0 / slo - 1.0 / shi) * rp.N.row(i).transpose();
    }
    return gz;
  }
};

bool interior(const Vector& x, const BoxDomain& box, const std::vector<Index>& varying,
              double margin) {
  for (Index i : varying) {
    if (x[i] - box.lower[i] < margin || box.upper[i] - x[i] < margin) return false;
  }
  return true;
}

}  // namespace

ConstrainedResult constrained_maximize(const Objective& objective, const GradientFn* gradient,
                                       const EqualityFiber& fiber, const BoxDomain& box,
                                       const ConstrainedConfig& cfg) {
  box.validate();
  ReducedProblem rp = reduce_fiber(fiber, box);

  ConstrainedResult best;
  if (rp.point) {
    best.x = rp.xi;
    best.f = objective(rp.xi);
    best.degenerate = true;
    return best;
  }

  const Index q = rp.N.cols();
  const double span = (box.upper - box.lower).maxCoeff();
  const double margin = 1e-9 * span;

  // Candidate starts in z-space: the LP interior point, near-endpoint starts
  // for segment fibers (boundary basins are invisible to the barrier
  // otherwise), seeded random projections, then caller-provided warm starts.
  // Infeasible proposals are shrunk toward the interior point.
  std::vector<Vector> starts;
  starts.emplace_back(Vector::Zero(q));
  CounterRng rng(cfg.seed, derive_stream(0xc0757a27, 0));
  auto admit = [&](const Vector& z) {
    Vector zz = z;
    for (double t : {1.0, 0.5, 0.25, 0.1, 0.05}) {
      zz = t * z;
      if (interior(rp.xi + rp.N * zz, box, rp.varying, margin)) {
        starts.push_back(zz);
        return;
      }
    }
  };
  if (q == 1) {
    double t_lo = -std::numeric_limits<double>::infinity();
    double t_hi = std::numeric_limits<double>::infinity();
    for (Index i : rp.varying) {
      const double w = rp.N(i, 0);
      if (w == 0.0) continue;
      const double to_hi = (box.upper[i] - rp.xi[i]) / w;
      const double to_lo = (box.lower[i] - rp.xi[i]) / w;
      t_hi = std::min(t_hi, std::max(to_hi, to_lo));
      t_lo = std::max(t_lo, std::min(to_hi, to_lo));
    }
    if (std::isfinite(t_lo) && t_lo < 0.0) admit(Vector::Constant(1, 0.98 * t_lo));
    if (std::isfinite(t_hi) && t_hi > 0.0) admit(Vector::Constant(1, 0.98 * t_hi));
  }
  const int budget = std::max(cfg.n_starts - static_cast<int>(starts.size()), 0);
  for (int k = 0; k < budget; ++k) {
    Vector xr(box.dim());
    for (Index i = 0; i < box.dim(); ++i)
      xr[i] = box.lower[i] + (box.upper[i] - box.lower[i]) * rng.uniform();
    admit(rp.N.transpose() * (xr - rp.xi));
  }
  for (const Vector& w : cfg.extra_starts) {
    if (w.size() == box.dim()) admit(rp.N.transpose() * (w - rp.xi));
  }

  // z stays within the ball of fiber diameter; a generous box for lbfgs.
  const double zlim = 2.0 * span * std::sqrt(static_cast<double>(box.dim()));
  BoxDomain zbox(Vector::Constant(q, -zlim), Vector::Constant(q, zlim));

  bool have = false;
  for (size_t si = 0; si < starts.size(); ++si) {
    Vector z = starts[si];
    for (double mu : cfg.barrier_weights) {
      Stage st{objective, gradient, box, rp, mu, cfg.stage};
      Objective f = [&st](const Vector& zz) { return st.value(zz); };
      GradientFn g = [&st](const Vector& zz) { return st.gradient(zz); };
      try {
        OptResult r = lbfgsb_maximize(f, &g, zbox, z, cfg.stage);
        z = r.x;
      } catch (const OptimizerError&) {
        break;  // start went numerically bad; keep the last stage iterate
      }
    }
    Vector x = box.clamp(rp.xi + rp.N * z);
    const double fx = objective(x);
    if (!std::isfinite(fx)) continue;
    if (!have || fx > best.f + 1e-10) {
      best.x = x;
      best.f = fx;
      have = true;
    }
  }
  if (!have) {
    best.x = rp.xi;
    best.f = objective(rp.xi);
  }
  return best;
}

ConstrainedResult constrained_minimize(const Objective& objective, const GradientFn* gradient,
                                       const EqualityFiber& fiber, const BoxDomain& box,
                                       const ConstrainedConfig& cfg) {
  Objective neg = [&objective](const Vector& x) { return -objective(x); };
  ConstrainedResult r;
  if (gradient) {
    GradientFn ng = [gradient](const Vector& x) { return Vector(-(*gradient)(x)); };
    r = constrained_maximize(neg, &ng, fiber, box, cfg);
  } else {
    r = constrained_maximize(neg, nullptr, fiber, box, cfg);
  }
  r.f = -r.f;
  return r;
}

}  // namespace profex
