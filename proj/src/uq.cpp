#include "profex/uq.hpp"

#include "profex/doe.hpp"
#include "profex/threading.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace profex {

Matrix sobol_pool(Index count, Index d) { return sobol_sequence(count, d); }

PilotSelection select_pilot_points(const GpModel& model, Index count, const Matrix& pool) {
  require(count >= 1, "select_pilot_points: count must be >= 1");
  require(pool.rows() >= count, "select_pilot_points: pool smaller than requested count");
  require(pool.cols() == model.dim(), "select_pilot_points: pool dimension mismatch");
  const Index np = pool.rows();
  const Index n = model.n();

  // Posterior variance of every pool point, then pivoted-Cholesky updates:
  // var_j <- var_j - cov_n(x_j, g)^2 / var_g for each selected g.
  Matrix kX(np, n);      // K(pool, X)
  Matrix lam(np, model.trend().size());
  Vector var(np);
  Vector kx;
  for (Index j = 0; j < np; ++j) {
    const Vector x = pool.row(j).transpose();
    model.cache().cross_cov(x, kx);
    kX.row(j) = kx.transpose();
    lam.row(j) = (model.trend().eval(x) - model.kinv_trend().transpose() * kx).transpose();
  }
  const Matrix KinvKx = model.solve_kernel(Matrix(kX.transpose()));  // n x np
  for (Index j = 0; j < np; ++j) {
    const Vector x = pool.row(j).transpose();
    var[j] = kernel_eval(model.kernel(), x, x) - kX.row(j).dot(KinvKx.col(j)) +
             lam.row(j).dot(model.trend_gram_inv() * lam.row(j).transpose());
    var[j] = std::max(var[j], 0.0);
  }

  Matrix L = Matrix::Zero(np, count);  // partial pivoted factor
  PilotSelection sel;
  sel.pilots.resize(count, model.dim());
  const double halt = 1e-8 * model.kernel().variance;

  for (Index step = 0; step < count; ++step) {
    Index best = 0;
    for (Index j = 1; j < np; ++j)
      if (var[j] > var[best]) best = j;
    if (var[best] <= halt) {
      sel.truncated = true;
      sel.pilots.conservativeResize(step, model.dim());
      break;
    }
    const Vector g = pool.row(best).transpose();
    sel.pool_indices.push_back(best);
    sel.pilots.row(step) = g.transpose();

    // posterior covariance (given the data only) of g against the pool
    Vector kg;
    model.cache().cross_cov(g, kg);
    const Vector lam_g = model.trend().eval(g) - model.kinv_trend().transpose() * kg;
    Vector cross = kX * model.solve_kernel(kg);  // K(pool,X) K^-1 k(g)
    for (Index j = 0; j < np; ++j) {
      const double prior = kernel_eval(model.kernel(), pool.row(j).transpose(), g);
      cross[j] = prior - cross[j] + lam.row(j).dot(model.trend_gram_inv() * lam_g);
    }
    // downdate by the already-selected pilots
    if (step > 0)
      cross -= L.leftCols(step) * L.row(best).head(step).transpose();
    const double piv = std::sqrt(var[best]);
    L.col(step) = cross / piv;
    for (Index j = 0; j < np; ++j) var[j] = std::max(0.0, var[j] - L(j, step) * L(j, step));
    var[best] = 0.0;
  }
  return sel;
}

ApproxProcess::ApproxProcess(GpModel model, Matrix pilots)
    : model_(std::move(model)), pilots_(std::move(pilots)) {
  require(pilots_.rows() >= 1, "ApproxProcess: need at least one pilot point");
  require(pilots_.cols() == model_.dim(), "ApproxProcess: pilot dimension mismatch");
  const Index n = model_.n(), l = pilots_.rows();

  A_.resize(n + l, model_.dim());
  A_.topRows(n) = model_.design();
  A_.bottomRows(l) = pilots_;
  for (Index i = 0; i < n + l; ++i)
    for (Index j = i + 1; j < n + l; ++j)
      if ((A_.row(i) - A_.row(j)).squaredNorm() == 0.0)
        throw ModelError("ApproxProcess: pilot coincides with another point");

  cacheA_ = DesignCache(A_, model_.kernel());
  cholesky_with_jitter(cacheA_.kernel_matrix(), model_.kernel().variance, lltA_);
  HA_ = model_.trend().design_matrix(A_);
  KinvHA_ = lltA_.solve(HA_);
  Matrix gram = HA_.transpose() * KinvHA_;
  gram = 0.5 * (gram + gram.transpose()).eval();
  Eigen::LLT<Matrix> gram_llt(gram);
  if (gram_llt.info() != Eigen::Success)
    throw NumericError("ApproxProcess: augmented trend normal equations are singular");
  KHinvA_ = gram_llt.solve(Matrix::Identity(HA_.cols(), HA_.cols()));

  // Pilot posterior given the data: mean and covariance blockwise.
  pilot_mean_.resize(l);
  for (Index i = 0; i < l; ++i) pilot_mean_[i] = model_.posterior_mean(pilots_.row(i).transpose());

  Matrix kGX(l, model_.n());
  lamG_.resize(l, model_.trend().size());
  Vector kx;
  for (Index i = 0; i < l; ++i) {
    model_.cache().cross_cov(pilots_.row(i).transpose(), kx);
    kGX.row(i) = kx.transpose();
    lamG_.row(i) =
        (model_.trend().eval(pilots_.row(i).transpose()) - model_.kinv_trend().transpose() * kx)
            .transpose();
  }
  S_ = model_.solve_kernel(Matrix(kGX.transpose()));  // n x l
  DesignCache pilot_cache(pilots_, model_.kernel());
  pilot_cov_ = pilot_cache.kernel_matrix() - kGX * S_ +
               lamG_ * model_.trend_gram_inv() * lamG_.transpose();
  pilot_cov_ = 0.5 * (pilot_cov_ + pilot_cov_.transpose()).eval();

  Eigen::LLT<Matrix> pc_llt;
  cholesky_with_jitter(pilot_cov_, model_.kernel().variance, pc_llt);
  pilot_chol_ = pc_llt.matrixL();
}

ApproxProcess::Weights ApproxProcess::weights(const Vector& pilot_values) const {
  require(pilot_values.size() == n_pilots(), "ApproxProcess: pilot value size mismatch");
  Vector w(model_.n() + n_pilots());
  w.head(model_.n()) = model_.observations();
  w.tail(n_pilots()) = pilot_values;
  Weights out;
  out.chat = KHinvA_ * (KinvHA_.transpose() * w);
  out.beta = lltA_.solve(w - HA_ * out.chat);
  return out;
}

double ApproxProcess::eval(const Weights& w, const Vector& x) const {
  return model_.trend().eval(x).dot(w.chat) + cacheA_.cross_cov(x).dot(w.beta);
}

Vector ApproxProcess::grad(const Weights& w, const Vector& x) const {
  Matrix dk;
  cacheA_.cross_cov_grad(x, dk);
  return model_.trend().grad(x).transpose() * w.chat + dk.transpose() * w.beta;
}

Vector ApproxProcess::lambda_pilot(const Vector& x) const {
  const Vector kA = cacheA_.cross_cov(x);
  const Vector KinvK = lltA_.solve(kA);
  const Vector lam = model_.trend().eval(x) - KinvHA_.transpose() * kA;
  const Vector full = KinvK + KinvHA_ * (KHinvA_ * lam);
  return full.tail(n_pilots());
}

Vector ApproxProcess::posterior_cross_pilots(const Vector& x) const {
  Vector kx;
  model_.cache().cross_cov(x, kx);
  const Vector lam_x = model_.trend().eval(x) - model_.kinv_trend().transpose() * kx;
  Vector prior(n_pilots());
  for (Index i = 0; i < n_pilots(); ++i)
    prior[i] = kernel_eval(model_.kernel(), x, pilots_.row(i).transpose());
  return prior - S_.transpose() * kx + lamG_ * (model_.trend_gram_inv() * lam_x);
}

double ApproxProcess::delta_var(const Vector& x) const {
  const Vector b = lambda_pilot(x);
  const Vector cross = posterior_cross_pilots(x);
  const double v = model_.posterior_var(x) - 2.0 * cross.dot(b) + b.dot(pilot_cov_ * b);
  return std::max(v, 0.0);
}

double ApproxProcess::delta_cov(const Vector& x, const Vector& y) const {
  const Vector bx = lambda_pilot(x);
  const Vector by = lambda_pilot(y);
  return model_.posterior_cov(x, y) - posterior_cross_pilots(y).dot(bx) -
         posterior_cross_pilots(x).dot(by) + bx.dot(pilot_cov_ * by);
}

RealizationSet simulate_realizations(const ApproxProcess& proc, Index s, std::uint64_t seed,
                                     bool zero_noise) {
  require(s >= 1, "simulate_realizations: need s >= 1");
  const Index l = proc.n_pilots();
  RealizationSet set;
  set.seed = seed;
  set.samples.resize(s, l);
  for (Index i = 0; i < s; ++i) {
    Vector eps = Vector::Zero(l);
    if (!zero_noise) {
      const std::uint64_t stream = derive_stream(0x5a3e11e5, static_cast<std::uint64_t>(i));
      for (Index j = 0; j < l; ++j)
        eps[j] = CounterRng::normal_at(seed, stream, static_cast<std::uint64_t>(j));
    }
    set.samples.row(i) =
        (proc.pilot_mean() + proc.pilot_cov_chol().triangularView<Eigen::Lower>() * eps)
            .transpose();
  }
  return set;
}

double empirical_quantile(std::vector<double> values, double q) {
  require(!values.empty(), "empirical_quantile: empty sample");
  require(q >= 0.0 && q <= 1.0, "empirical_quantile: q must be in [0,1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<size_t>(pos);
  const double frac = pos - static_cast<double>(lo);
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

EnvelopeResult profile_envelope(const ApproxProcess& proc, const RealizationSet& reals,
                                const Projection& proj, const BoxDomain& box,
                                const ProfileGrid& grid, double beta,
                                const ProfileConfig& cfg) {
  const Index s = reals.samples.rows();
  const Index g = grid.size();
  require(s >= 20, "profile_envelope: need at least 20 realizations");
  require(beta >= 0.0 && beta < 0.5, "profile_envelope: beta must be in [0, 0.5)");

  EnvelopeResult out;
  out.sup_samples = Matrix::Constant(s, g, std::numeric_limits<double>::quiet_NaN());
  out.inf_samples = out.sup_samples;
  out.failures.assign(static_cast<size_t>(g), 0);
  out.flagged.assign(static_cast<size_t>(g), false);

  ProfileConfig node_cfg = cfg;
  node_cfg.threads = 1;  // realizations parallelize, curves stay sequential
  parallel_for(s, cfg.threads, [&](Index i) {
    const ApproxProcess::Weights w = proc.weights(reals.samples.row(i).transpose());
    Objective obj = [&proc, w](const Vector& x) { return proc.eval(w, x); };
    GradientFn grd = [&proc, w](const Vector& x) { return proc.grad(w, x); };
    try {
      ProfileCurve c;
      if (proj.kind == Projection::Kind::coordinate) {
        c = coordinate_profiles(obj, &grd, proj.coord, box, grid, node_cfg);
      } else {
        c = oblique_profiles(obj, &grd, proj, box, grid, node_cfg);
      }
      out.sup_samples.row(i) = c.sup.transpose();
      out.inf_samples.row(i) = c.inf.transpose();
    } catch (const OptimizerError&) {
      // whole-path failure: all nodes of this realization stay NaN
    }
  });

  out.sup_lo.resize(g);
  out.sup_hi.resize(g);
  out.inf_lo.resize(g);
  out.inf_hi.resize(g);
  for (Index j = 0; j < g; ++j) {
    std::vector<double> su, in;
    su.reserve(static_cast<size_t>(s));
    in.reserve(static_cast<size_t>(s));
    for (Index i = 0; i < s; ++i) {
      if (std::isfinite(out.sup_samples(i, j)) && std::isfinite(out.inf_samples(i, j))) {
        su.push_back(out.sup_samples(i, j));
        in.push_back(out.inf_samples(i, j));
      }
    }
    const int fails = static_cast<int>(s) - static_cast<int>(su.size());
    out.failures[static_cast<size_t>(j)] = fails;
    out.flagged[static_cast<size_t>(j)] = fails > 0.05 * static_cast<double>(s);
    if (su.empty()) {
      out.sup_lo[j] = out.sup_hi[j] = out.inf_lo[j] = out.inf_hi[j] =
          std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    out.sup_lo[j] = empirical_quantile(su, beta);
    out.sup_hi[j] = empirical_quantile(su, 1.0 - beta);
    out.inf_lo[j] = empirical_quantile(in, beta);
    out.inf_hi[j] = empirical_quantile(in, 1.0 - beta);
  }
  return out;
}

MapEnvelopeResult map_envelope(const ApproxProcess& proc, const RealizationSet& reals,
                               const Projection& proj, const BoxDomain& box,
                               const ProfileGrid& lattice, double beta,
                               const ProfileConfig& cfg) {
  const Index s = reals.samples.rows();
  const Index g = lattice.size();
  require(proj.p() == 2 && lattice.p() == 2, "map_envelope: p = 2 only");
  require(s >= 20, "map_envelope: need at least 20 realizations");

  Matrix sup_s = Matrix::Constant(s, g, std::numeric_limits<double>::quiet_NaN());
  Matrix inf_s = sup_s;
  ProfileConfig node_cfg = cfg;
  node_cfg.threads = 1;
  parallel_for(s, cfg.threads, [&](Index i) {
    const ApproxProcess::Weights w = proc.weights(reals.samples.row(i).transpose());
    Objective obj = [&proc, w](const Vector& x) { return proc.eval(w, x); };
    GradientFn grd = [&proc, w](const Vector& x) { return proc.grad(w, x); };
    try {
      ProfileMap m = bivariate_profiles(obj, &grd, proj, box, lattice, node_cfg);
      sup_s.row(i) = m.sup.transpose();
      inf_s.row(i) = m.inf.transpose();
    } catch (const OptimizerError&) {
      // realization dropped, counted below
    }
  });

  MapEnvelopeResult out;
  out.sup_lo = Vector::Constant(g, std::numeric_limits<double>::quiet_NaN());
  out.sup_hi = out.sup_lo;
  out.inf_lo = out.sup_lo;
  out.inf_hi = out.sup_lo;
  out.failures.assign(static_cast<size_t>(g), 0);
  out.flagged.assign(static_cast<size_t>(g), false);
  for (Index j = 0; j < g; ++j) {
    if (!lattice.feasible[static_cast<size_t>(j)]) continue;
    std::vector<double> su, in;
    for (Index i = 0; i < s; ++i) {
      if (std::isfinite(sup_s(i, j)) && std::isfinite(inf_s(i, j))) {
        su.push_back(sup_s(i, j));
        in.push_back(inf_s(i, j));
      }
    }
    const int fails = static_cast<int>(s) - static_cast<int>(su.size());
    out.failures[static_cast<size_t>(j)] = fails;
    out.flagged[static_cast<size_t>(j)] = fails > 0.05 * static_cast<double>(s);
    if (su.empty()) continue;
    out.sup_lo[j] = empirical_quantile(su, beta);
    out.sup_hi[j] = empirical_quantile(su, 1.0 - beta);
    out.inf_lo[j] = empirical_quantile(in, beta);
    out.inf_hi[j] = empirical_quantile(in, 1.0 - beta);
  }
  return out;
}

namespace {

// K_Delta(x,x) has one bump per gap between anchor points (design plus
// pilots), so 1-d feasible sets get scan-seeded starts on top of the
// configured multi-start.
std::vector<Vector> segment_scan_starts(const Objective& f, const Vector& base,
                                        const Vector& dir, double t_lo, double t_hi,
                                        int n_scan, int keep) {
  std::vector<std::pair<double, double>> scored;
  for (int i = 1; i < n_scan; ++i) {
    const double t = t_lo + (t_hi - t_lo) * i / static_cast<double>(n_scan);
    scored.emplace_back(f(base + t * dir), t);
  }
  std::sort(scored.rbegin(), scored.rend());
  std::vector<Vector> starts;
  for (int k = 0; k < keep && k < static_cast<int>(scored.size()); ++k)
    starts.push_back(base + scored[static_cast<size_t>(k)].second * dir);
  return starts;
}

}  // namespace

double delta_var_sup(const ApproxProcess& proc, const EqualityFiber& fiber, const BoxDomain& box,
                     const ConstrainedConfig& cfg) {
  Objective obj = [&proc](const Vector& x) { return proc.delta_var(x); };
  ConstrainedConfig c = cfg;
  if (fiber.nullbasis.cols() == 1) {
    double t_lo = -std::numeric_limits<double>::infinity();
    double t_hi = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < box.dim(); ++i) {
      const double w = fiber.nullbasis(i, 0);
      if (w == 0.0) continue;
      const double a = (box.lower[i] - fiber.xi[i]) / w;
      const double b = (box.upper[i] - fiber.xi[i]) / w;
      t_lo = std::max(t_lo, std::min(a, b));
      t_hi = std::min(t_hi, std::max(a, b));
    }
    if (std::isfinite(t_lo) && std::isfinite(t_hi) && t_hi > t_lo) {
      for (auto& s : segment_scan_starts(obj, fiber.xi, fiber.nullbasis.col(0), t_lo, t_hi,
                                         32, 3))
        c.extra_starts.push_back(std::move(s));
    }
  }
  return constrained_maximize(obj, nullptr, fiber, box, c).f;
}

double delta_var_sup_box(const ApproxProcess& proc, const BoxDomain& box, const LbfgsConfig& cfg,
                         int n_starts, std::uint64_t seed) {
  Objective obj = [&proc](const Vector& x) { return proc.delta_var(x); };
  double best = 0.0;
  std::vector<Vector> starts;
  starts.push_back(0.5 * (box.lower + box.upper));
  if (box.dim() == 1) {
    // anchor-gap midpoints: the bumps sit between consecutive anchors
    std::vector<double> anchors;
    for (Index i = 0; i < proc.model().n(); ++i) anchors.push_back(proc.model().design()(i, 0));
    for (Index j = 0; j < proc.n_pilots(); ++j) anchors.push_back(proc.pilots()(j, 0));
    anchors.push_back(box.lower[0]);
    anchors.push_back(box.upper[0]);
    std::sort(anchors.begin(), anchors.end());
    for (size_t i = 0; i + 1 < anchors.size(); ++i) {
      const double mid = 0.5 * (anchors[i] + anchors[i + 1]);
      if (mid > box.lower[0] && mid < box.upper[0] && anchors[i + 1] - anchors[i] > 1e-12)
        starts.push_back(Vector::Constant(1, mid));
    }
  }
  CounterRng rng(seed, derive_stream(0xde1fa, 1));
  for (int k = 1; k < n_starts; ++k) {
    Vector s(box.dim());
    for (Index i = 0; i < box.dim(); ++i)
      s[i] = box.lower[i] + (box.upper[i] - box.lower[i]) * rng.uniform();
    starts.push_back(std::move(s));
  }
  for (const Vector& s : starts)
    best = std::max(best, lbfgsb_maximize(obj, nullptr, box, s, cfg).f);
  return best;
}

Vector delta_var_curve(const ApproxProcess& proc, const Projection& proj, const BoxDomain& box,
                       const ProfileGrid& grid, const ProfileConfig& cfg) {
  require(proj.p() == 1, "delta_var_curve: projection must have p = 1");
  const double nrm = proj.psi.col(0).norm();
  Projection unit = proj;
  unit.psi = proj.psi / nrm;
  const Matrix N = null_space(unit);
  Vector out(grid.size());
  parallel_for(grid.size(), cfg.threads, [&](Index j) {
    EqualityFiber f;
    f.projection = unit;
    f.eta = Vector::Constant(1, grid.etas(j, 0) / nrm);
    f.xi = lp_feasible_point(unit, f.eta, box);
    f.nullbasis = N;
    ConstrainedConfig ccfg;
    ccfg.n_starts = cfg.starts_for(1);
    ccfg.barrier_weights = cfg.barrier_weights;
    ccfg.stage = cfg.lbfgs;
    ccfg.stage.pg_tol = std::max(cfg.lbfgs.pg_tol, 1e-6);
    ccfg.seed = derive_stream(cfg.seed, 0xde17a ^ static_cast<std::uint64_t>(j));
    out[j] = delta_var_sup(proc, f, box, ccfg);
  });
  return out;
}

Vector delta_var_lattice(const ApproxProcess& proc, const Projection& proj,
                         const BoxDomain& box, const ProfileGrid& lattice,
                         const ProfileConfig& cfg) {
  require(proj.p() == 2 && lattice.p() == 2, "delta_var_lattice: p = 2 only");
  Vector out = Vector::Constant(lattice.size(), std::numeric_limits<double>::quiet_NaN());
  const Matrix N = null_space(proj);
  parallel_for(lattice.size(), cfg.threads, [&](Index j) {
    if (!lattice.feasible[static_cast<size_t>(j)]) return;
    EqualityFiber f;
    f.projection = proj;
    f.eta = lattice.etas.row(j).transpose();
    f.xi = lp_feasible_point(proj, f.eta, box);
    f.nullbasis = N;
    ConstrainedConfig ccfg;
    ccfg.n_starts = cfg.starts_for(2);
    ccfg.barrier_weights = cfg.barrier_weights;
    ccfg.stage = cfg.lbfgs;
    ccfg.stage.pg_tol = std::max(cfg.lbfgs.pg_tol, 1e-6);
    ccfg.seed = derive_stream(cfg.seed, 0x2de17a ^ static_cast<std::uint64_t>(j));
    out[j] = delta_var_sup(proc, f, box, ccfg);
  });
  return out;
}

BoundPair bound_envelope(const Vector& q_lo, const Vector& q_hi, const Vector& delta_var,
                         double alpha, double beta) {
  if (!(alpha > 2.0 * beta && beta > 0.0))
    throw std::invalid_argument("bound_envelope: need alpha > 2*beta > 0");
  require(q_lo.size() == q_hi.size() && q_lo.size() == delta_var.size(),
          "bound_envelope: size mismatch");
  BoundPair out;
  out.u_hi = q_hi;
  out.u_lo = q_lo;
  const double c_hi = std::log(2.0 / (alpha - beta));
  const double c_lo = std::log(2.0 / (alpha - 2.0 * beta));
  for (Index j = 0; j < q_lo.size(); ++j) {
    const double v = std::max(0.0, delta_var[j]);
    out.u_hi[j] += std::sqrt(2.0 * v * c_hi);
    out.u_lo[j] -= std::sqrt(2.0 * v * c_lo);
  }
  return out;
}

double borell_tis_tail(double u, double mu_delta, double sigma_delta) {
  require(sigma_delta > 0.0, "borell_tis_tail: sigma must be positive");
  if (!(u > mu_delta))
    throw std::domain_error("borell_tis_tail: bound is vacuous for u <= mu_delta");
  const double z = (u - mu_delta) / sigma_delta;
  return std::min(1.0, 2.0 * std::exp(-0.5 * z * z));
}

double integrated_delta_variance(const Vector& delta_var, const ProfileGrid& grid) {
  require(grid.p() == 1, "integrated_delta_variance: p = 1 grids only");
  require(delta_var.size() == grid.size(), "integrated_delta_variance: size mismatch");
  double acc = 0.0;
  for (Index j = 0; j + 1 < grid.size(); ++j) {
    const double h = grid.etas(j + 1, 0) - grid.etas(j, 0);
    acc += 0.5 * h * (delta_var[j] + delta_var[j + 1]);
  }
  return acc;
}

}  // namespace profex
