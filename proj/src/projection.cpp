#include "profex/projection.hpp"

#include "profex/linprog.hpp"

#include <cmath>
#include <vector>

namespace profex {

void Projection::validate() const {
  require(psi.rows() >= 2 && psi.cols() >= 1, "Projection: need d >= 2, p >= 1");
  require(psi.cols() < psi.rows(), "Projection: need p < d");
  require(psi.cols() <= 2, "Projection: p must be 1 or 2");
  Eigen::JacobiSVD<Matrix> svd(psi);
  const auto& sv = svd.singularValues();
  if (!(sv(sv.size() - 1) > 1e-10 * sv(0)))
    throw std::invalid_argument("Projection: matrix is rank-deficient");
}

Projection Projection::coordinate(Index i, Index d) {
  require(i >= 0 && i < d, "Projection::coordinate: index out of range");
  Projection pr;
  pr.psi = Matrix::Zero(d, 1);
  pr.psi(i, 0) = 1.0;
  pr.kind = Kind::coordinate;
  pr.coord = i;
  return pr;
}

Projection Projection::oblique(Vector v) {
  Projection pr;
  pr.psi = v;
  pr.kind = Kind::oblique;
  pr.validate();
  return pr;
}

Projection Projection::planar(Matrix psi) {
  Projection pr;
  pr.psi = std::move(psi);
  pr.kind = Kind::planar;
  pr.validate();
  return pr;
}

Projection Projection::coordinate_pair(Index i, Index j, Index d) {
  require(i != j && i >= 0 && j >= 0 && i < d && j < d, "coordinate_pair: bad indices");
  Matrix psi = Matrix::Zero(d, 2);
  psi(i, 0) = 1.0;
  psi(j, 1) = 1.0;
  return planar(std::move(psi));
}

Matrix null_space(const Projection& proj) {
  proj.validate();
  const Index d = proj.d(), p = proj.p();
  Eigen::HouseholderQR<Matrix> qr(proj.psi);
  Matrix Q = qr.householderQ() * Matrix::Identity(d, d);
  Matrix N = Q.rightCols(d - p);
  for (Index c = 0; c < N.cols(); ++c) {
    for (Index r = 0; r < d; ++r) {
      if (std::abs(N(r, c)) > 1e-12) {
        if (N(r, c) < 0.0) N.col(c) = -N.col(c);
        break;
      }
    }
  }
  return N;
}

namespace {

// Max-slack LP over x in box with Psi^T x = eta; coordinates where
// slack_coord is false are held at fixed_val. Variables (a, b, t):
//   x_S = lo_S + t*1 + a,  a + 2t*1 + b = hi_S - lo_S,  a,b,t >= 0
//   Psi_S^T a + t * (Psi_S^T 1) = eta - Psi^T lo - Psi_P^T (fixed - lo_P)
FeasiblePoint max_slack_impl(const Matrix& psi, const Vector& eta, const BoxDomain& box,
                             const std::vector<bool>& slack_coord, const Vector& fixed_val) {
  const Index d = psi.rows(), p = psi.cols();
  std::vector<Index> S;
  for (Index i = 0; i < d; ++i)
    if (slack_coord[static_cast<size_t>(i)]) S.push_back(i);
  const Index ds = static_cast<Index>(S.size());
  require(ds >= 1, "max_slack_impl: no free coordinates");

  const Index nv = 2 * ds + 1;  // a, b, t
  const Index nc = p + ds;
  Matrix A = Matrix::Zero(nc, nv);
  Vector b = Vector::Zero(nc);
  Vector c = Vector::Zero(nv);
  c[nv - 1] = -1.0;  // maximize t

  Vector rhs_eq = eta - psi.transpose() * box.lower;
  for (Index i = 0; i < d; ++i) {
    if (!slack_coord[static_cast<size_t>(i)])
      rhs_eq -= psi.row(i).transpose() * (fixed_val[i] - box.lower[i]);
  }
  for (Index r = 0; r < p; ++r) {
    double psum = 0.0;
    for (Index k = 0; k < ds; ++k) {
      A(r, k) = psi(S[static_cast<size_t>(k)], r);
      psum += psi(S[static_cast<size_t>(k)], r);
    }
    A(r, nv - 1) = psum;
    b[r] = rhs_eq[r];
  }
  for (Index k = 0; k < ds; ++k) {
    const Index i = S[static_cast<size_t>(k)];
    A(p + k, k) = 1.0;           // a_k
    A(p + k, ds + k) = 1.0;      // b_k
    A(p + k, nv - 1) = 2.0;      // t
    b[p + k] = box.upper[i] - box.lower[i];
  }

  LpResult lp = simplex_solve(A, b, c);
  if (lp.status != LpResult::Status::optimal)
    throw InfeasibleError("lp_feasible_point: eta is outside the image of the box");

  FeasiblePoint fp;
  fp.slack = lp.x[nv - 1];
  fp.xi = Vector(d);
  for (Index i = 0; i < d; ++i)
    fp.xi[i] = slack_coord[static_cast<size_t>(i)] ? 0.0 : fixed_val[i];
  for (Index k = 0; k < ds; ++k) {
    const Index i = S[static_cast<size_t>(k)];
    fp.xi[i] = box.lower[i] + fp.slack + lp.x[k];
  }
  // restore the equality exactly (least-squares correction in span(psi))
  Vector resid = eta - psi.transpose() * fp.xi;
  if (resid.lpNorm<Eigen::Infinity>() > 0.0) {
    fp.xi += psi * (psi.transpose() * psi).ldlt().solve(resid);
  }
  // clamp the roundoff, never more
  for (Index i = 0; i < d; ++i) {
    const double span = box.upper[i] - box.lower[i];
    if (fp.xi[i] < box.lower[i] && fp.xi[i] > box.lower[i] - 1e-9 * span)
      fp.xi[i] = box.lower[i];
    if (fp.xi[i] > box.upper[i] && fp.xi[i] < box.upper[i] + 1e-9 * span)
      fp.xi[i] = box.upper[i];
  }
  return fp;
}

}  // namespace

FeasiblePoint lp_max_slack_point(const Projection& proj, const Vector& eta,
                                 const BoxDomain& box) {
  proj.validate();
  box.validate();
  require(eta.size() == proj.p(), "lp_feasible_point: eta dimension mismatch");
  require(box.dim() == proj.d(), "lp_feasible_point: box dimension mismatch");
  std::vector<bool> all(static_cast<size_t>(proj.d()), true);
  return max_slack_impl(proj.psi, eta, box, all, Vector::Zero(proj.d()));
}

FeasiblePoint lp_max_slack_on_face(const Projection& proj, const Vector& eta,
                                   const BoxDomain& box, const std::vector<bool>& free_coord,
                                   const Vector& fixed_vals) {
  return max_slack_impl(proj.psi, eta, box, free_coord, fixed_vals);
}

Vector lp_feasible_point(const Projection& proj, const Vector& eta, const BoxDomain& box) {
  return lp_max_slack_point(proj, eta, box).xi;
}

EqualityFiber make_fiber(const Projection& proj, const Vector& eta, const BoxDomain& box) {
  EqualityFiber f;
  f.projection = proj;
  f.eta = eta;
  f.xi = lp_feasible_point(proj, eta, box);
  f.nullbasis = null_space(proj);
  return f;
}

std::pair<double, double> eta_interval(const Projection& proj, const BoxDomain& box) {
  require(proj.p() == 1, "eta_interval: p must be 1");
  double lo = 0.0, hi = 0.0;
  for (Index i = 0; i < proj.d(); ++i) {
    const double v = proj.psi(i, 0);
    lo += v * (v > 0.0 ? box.lower[i] : box.upper[i]);
    hi += v * (v > 0.0 ? box.upper[i] : box.lower[i]);
  }
  return {lo, hi};
}

Matrix eta_bounding_box(const Projection& proj, const BoxDomain& box) {
  Matrix bb(proj.p(), 2);
  for (Index c = 0; c < proj.p(); ++c) {
    double lo = 0.0, hi = 0.0;
    for (Index i = 0; i < proj.d(); ++i) {
      const double v = proj.psi(i, c);
      lo += v * (v > 0.0 ? box.lower[i] : box.upper[i]);
      hi += v * (v > 0.0 ? box.upper[i] : box.lower[i]);
    }
    bb(c, 0) = lo;
    bb(c, 1) = hi;
  }
  return bb;
}

std::pair<double, double> fiber_coordinate_range(const Projection& proj, const Vector& eta,
                                                 const BoxDomain& box, Index i) {
  // min/max x_i over {x in box : Psi^T x = eta}, x = lo + a:
  //   a + b = hi - lo,  Psi^T a = eta - Psi^T lo
  const Index d = proj.d(), p = proj.p();
  const Index nv = 2 * d;
  Matrix A = Matrix::Zero(p + d, nv);
  Vector b(p + d);
  A.block(0, 0, p, d) = proj.psi.transpose();
  b.head(p) = eta - proj.psi.transpose() * box.lower;
  for (Index k = 0; k < d; ++k) {
    A(p + k, k) = 1.0;
    A(p + k, d + k) = 1.0;
    b[p + k] = box.upper[k] - box.lower[k];
  }
  Vector c = Vector::Zero(nv);
  c[i] = 1.0;
  LpResult lo_lp = simplex_solve(A, b, c);
  c[i] = -1.0;
  LpResult hi_lp = simplex_solve(A, b, c);
  if (lo_lp.status != LpResult::Status::optimal || hi_lp.status != LpResult::Status::optimal)
    throw InfeasibleError("fiber_coordinate_range: empty fiber");
  return {box.lower[i] + lo_lp.x[i], box.lower[i] + hi_lp.x[i]};
}

}  // namespace profex
