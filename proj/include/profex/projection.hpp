#pragma once

#include "profex/optimize.hpp"
#include "profex/types.hpp"

#include <utility>
#include <vector>

namespace profex {

// Full-column-rank d x p projection matrix, p in {1,2}.
struct Projection {
  enum class Kind { coordinate, oblique, planar };
  Matrix psi;  // d x p
  Kind kind = Kind::oblique;
  Index coord = -1;  // set for Kind::coordinate

  Index d() const { return psi.rows(); }
  Index p() const { return psi.cols(); }
  void validate() const;  // rank check via singular values

  static Projection coordinate(Index i, Index d);
  static Projection oblique(Vector v);   // p = 1
  static Projection planar(Matrix psi);  // p = 2
  static Projection coordinate_pair(Index i, Index j, Index d);
};

// Orthonormal basis of Null(Psi^T), deterministic: Householder QR followed by
// a sign convention (first entry of magnitude > tol per column positive).
Matrix null_space(const Projection& proj);

struct EqualityFiber {
  Projection projection;
  Vector eta;        // p-vector
  Vector xi;         // feasible point, Psi^T xi = eta
  Matrix nullbasis;  // d x (d-p), orthonormal
};

// Max-slack feasible point of {x in box : Psi^T x = eta}: the LP maximizes
// the smallest distance to the box faces. Throws InfeasibleError when eta is
// outside the image of the box (this is the E_Psi membership test).
Vector lp_feasible_point(const Projection& proj, const Vector& eta, const BoxDomain& box);

// lp_feasible_point plus the slack value (0 means the fiber touches only the
// box boundary).
struct FeasiblePoint {
  Vector xi;
  double slack;
};
FeasiblePoint lp_max_slack_point(const Projection& proj, const Vector& eta, const BoxDomain& box);

// Max-slack LP restricted to the free coordinates; frozen coordinates are
// held at their fixed values (fibers that live on a box face).
FeasiblePoint lp_max_slack_on_face(const Projection& proj, const Vector& eta,
                                   const BoxDomain& box, const std::vector<bool>& free_coord,
                                   const Vector& fixed_vals);

EqualityFiber make_fiber(const Projection& proj, const Vector& eta, const BoxDomain& box);

// Exact range of psi' x over the box (p = 1): attained at box vertices.
std::pair<double, double> eta_interval(const Projection& proj, const BoxDomain& box);

// Per-column ranges for p >= 1 (bounding box of E_Psi).
Matrix eta_bounding_box(const Projection& proj, const BoxDomain& box);  // p x 2 (lo, hi)

// Range [min, max] of coordinate `i` of x over the fiber; used to detect
// coordinates pinned by the equality constraints.
std::pair<double, double> fiber_coordinate_range(const Projection& proj, const Vector& eta,
                                                 const BoxDomain& box, Index i);

}  // namespace profex
