#include "profex/spline.hpp"

#include "profex/gp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace profex {

namespace {

std::vector<Index> knot_order(const Vector& xs) {
  std::vector<Index> order(static_cast<size_t>(xs.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) { return xs[a] < xs[b]; });
  return order;
}

}  // namespace

CubicSpline CubicSpline::interpolate(const Vector& xs_in, const Vector& ys_in, End end) {
  const Index k = xs_in.size();
  require(k >= 4, "CubicSpline: need at least 4 knots");
  require(ys_in.size() == k, "CubicSpline: size mismatch");

  const std::vector<Index> order = knot_order(xs_in);
  CubicSpline s;
  s.xs_.resize(k);
  s.ys_.resize(k);
  for (Index i = 0; i < k; ++i) {
    s.xs_[i] = xs_in[order[static_cast<size_t>(i)]];
    s.ys_[i] = ys_in[order[static_cast<size_t>(i)]];
  }
  for (Index i = 1; i < k; ++i)
    require(s.xs_[i] > s.xs_[i - 1], "CubicSpline: knots must be distinct");

  Vector h(k - 1);
  for (Index i = 0; i + 1 < k; ++i) h[i] = s.xs_[i + 1] - s.xs_[i];

  // Solve for the moments M (second derivatives at the knots).
  Matrix A = Matrix::Zero(k, k);
  Vector rhs = Vector::Zero(k);
  for (Index i = 1; i + 1 < k; ++i) {
    A(i, i - 1) = h[i - 1] / 6.0;
    A(i, i) = (h[i - 1] + h[i]) / 3.0;
    A(i, i + 1) = h[i] / 6.0;
    rhs[i] = (s.ys_[i + 1] - s.ys_[i]) / h[i] - (s.ys_[i] - s.ys_[i - 1]) / h[i - 1];
  }
  if (end == End::natural) {
    A(0, 0) = 1.0;
    A(k - 1, k - 1) = 1.0;
  } else {
    // third-derivative continuity at the second and second-to-last knots
    A(0, 0) = -1.0 / h[0];
    A(0, 1) = 1.0 / h[0] + 1.0 / h[1];
    A(0, 2) = -1.0 / h[1];
    A(k - 1, k - 3) = -1.0 / h[k - 3];
    A(k - 1, k - 2) = 1.0 / h[k - 3] + 1.0 / h[k - 2];
    A(k - 1, k - 1) = -1.0 / h[k - 2];
  }
  Vector M = A.partialPivLu().solve(rhs);

  s.b_.resize(k - 1);
  s.c_.resize(k - 1);
  s.d_.resize(k - 1);
  for (Index i = 0; i + 1 < k; ++i) {
    s.b_[i] = (s.ys_[i + 1] - s.ys_[i]) / h[i] - h[i] * (2.0 * M[i] + M[i + 1]) / 6.0;
    s.c_[i] = M[i] / 2.0;
    s.d_[i] = (M[i + 1] - M[i]) / (6.0 * h[i]);
  }
  return s;
}

CubicSpline CubicSpline::hermite(const Vector& xs_in, const Vector& ys_in,
                                 const Vector& slopes_in) {
  const Index k = xs_in.size();
  require(k >= 2, "CubicSpline::hermite: need at least 2 knots");
  require(ys_in.size() == k && slopes_in.size() == k, "CubicSpline::hermite: size mismatch");

  const std::vector<Index> order = knot_order(xs_in);
  CubicSpline s;
  s.xs_.resize(k);
  s.ys_.resize(k);
  Vector m(k);
  for (Index i = 0; i < k; ++i) {
    s.xs_[i] = xs_in[order[static_cast<size_t>(i)]];
    s.ys_[i] = ys_in[order[static_cast<size_t>(i)]];
    m[i] = slopes_in[order[static_cast<size_t>(i)]];
  }
  for (Index i = 1; i < k; ++i)
    require(s.xs_[i] > s.xs_[i - 1], "CubicSpline: knots must be distinct");

  s.b_.resize(k - 1);
  s.c_.resize(k - 1);
  s.d_.resize(k - 1);
  for (Index i = 0; i + 1 < k; ++i) {
    const double h = s.xs_[i + 1] - s.xs_[i];
    const double dy = (s.ys_[i + 1] - s.ys_[i]) / h;
    s.b_[i] = m[i];
    s.c_[i] = (3.0 * dy - 2.0 * m[i] - m[i + 1]) / h;
    s.d_[i] = (m[i] + m[i + 1] - 2.0 * dy) / (h * h);
  }
  return s;
}

double CubicSpline::eval(double x) const {
  const Index k = xs_.size();
  Index i = static_cast<Index>(
      std::upper_bound(xs_.data(), xs_.data() + k, x) - xs_.data());
  i = std::clamp<Index>(i - 1, 0, k - 2);  // end segments extrapolate
  const double t = x - xs_[i];
  return ys_[i] + t * (b_[i] + t * (c_[i] + t * d_[i]));
}

ProfileCurve approximate_profile_1d(const Vector& knot_etas, const Vector& sup_values,
                                    const Vector& inf_values, const Vector& query_etas,
                                    const std::optional<Vector>& sup_slopes,
                                    const std::optional<Vector>& inf_slopes,
                                    CubicSpline::End end) {
  const Index k = knot_etas.size();
  if (k < 4) throw std::invalid_argument("approximate_profile_1d: need k >= 4 knots");
  require(sup_values.size() == k && inf_values.size() == k,
          "approximate_profile_1d: size mismatch");

  const CubicSpline sup_s = sup_slopes ? CubicSpline::hermite(knot_etas, sup_values, *sup_slopes)
                                       : CubicSpline::interpolate(knot_etas, sup_values, end);
  const CubicSpline inf_s = inf_slopes ? CubicSpline::hermite(knot_etas, inf_values, *inf_slopes)
                                       : CubicSpline::interpolate(knot_etas, inf_values, end);

  ProfileCurve c;
  c.etas = query_etas;
  c.sup.resize(query_etas.size());
  c.inf.resize(query_etas.size());
  for (Index j = 0; j < query_etas.size(); ++j) {
    c.sup[j] = sup_s.eval(query_etas[j]);
    c.inf[j] = inf_s.eval(query_etas[j]);
  }
  c.provenance = Provenance::spline_approx;
  c.approx_knots = static_cast<int>(k);
  return c;
}

ProfileMap approximate_profile_2d(const Matrix& knot_etas, const Vector& sup_values,
                                  const Vector& inf_values, const ProfileGrid& query) {
  const Index k = knot_etas.rows();
  require(knot_etas.cols() == 2 && query.p() == 2, "approximate_profile_2d: need p = 2");
  if (k < 10) throw std::invalid_argument("approximate_profile_2d: need k >= 10 nodes");
  require(sup_values.size() == k && inf_values.size() == k,
          "approximate_profile_2d: size mismatch");
  for (Index i = 0; i < k; ++i)
    for (Index j = i + 1; j < k; ++j)
      if ((knot_etas.row(i) - knot_etas.row(j)).norm() == 0.0)
        throw std::invalid_argument("approximate_profile_2d: duplicate nodes");

  // normalize onto the unit square spanned by knots and query nodes
  Vector lo(2), hi(2);
  for (int c = 0; c < 2; ++c) {
    lo[c] = std::min(knot_etas.col(c).minCoeff(), query.etas.col(c).minCoeff());
    hi[c] = std::max(knot_etas.col(c).maxCoeff(), query.etas.col(c).maxCoeff());
    if (hi[c] - lo[c] <= 0.0) hi[c] = lo[c] + 1.0;
  }
  auto norm_rows = [&](const Matrix& E) {
    Matrix Z = E;
    for (int c = 0; c < 2; ++c) Z.col(c) = (E.col(c).array() - lo[c]) / (hi[c] - lo[c]);
    return Z;
  };
  const Matrix Zk = norm_rows(knot_etas);

  FitConfig fcfg;
  fcfg.n_starts = 5;
  fcfg.max_iter = 40;
  GpModel sup_gp = fit_gp(Zk, sup_values, KernelFamily::matern52,
                          KernelStructure::tensor_product, TrendBasis::constant(), fcfg);
  GpModel inf_gp = fit_gp(Zk, inf_values, KernelFamily::matern52,
                          KernelStructure::tensor_product, TrendBasis::constant(), fcfg);

  ProfileMap mp;
  mp.grid = query;
  const Index g = query.size();
  mp.sup = Vector::Constant(g, std::numeric_limits<double>::quiet_NaN());
  mp.inf = Vector::Constant(g, std::numeric_limits<double>::quiet_NaN());
  const Matrix Zq = norm_rows(query.etas);
  for (Index j = 0; j < g; ++j) {
    if (!query.feasible[static_cast<size_t>(j)]) continue;
    mp.sup[j] = sup_gp.posterior_mean(Zq.row(j).transpose());
    mp.inf[j] = inf_gp.posterior_mean(Zq.row(j).transpose());
  }
  mp.provenance = Provenance::kriging_approx;
  mp.approx_knots = static_cast<int>(k);
  return mp;
}

}  // namespace profex
