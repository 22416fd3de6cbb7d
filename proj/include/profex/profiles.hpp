#pragma once

#include "profex/constrained.hpp"
#include "profex/optimize.hpp"
#include "profex/projection.hpp"
#include "profex/types.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace profex {

struct ProfileConfig {
  int n_starts = 0;  // 0 -> 5 for p = 1, 8 for p = 2
  std::uint64_t seed = 2024;
  int threads = 1;
  LbfgsConfig lbfgs;
  std::vector<double> barrier_weights = {1e-2, 1e-4, 1e-6, 1e-8};

  int starts_for(Index p) const { return n_starts > 0 ? n_starts : (p == 2 ? 8 : 5); }
};

// Evaluation nodes in the image E_Psi: ascending scalars for p = 1, a
// row-major lattice with infeasible nodes masked for p = 2.
struct ProfileGrid {
  Matrix etas;                // g x p
  std::vector<bool> feasible;
  std::vector<int> shape;     // {g} or {n1, n2}

  Index size() const { return etas.rows(); }
  Index p() const { return etas.cols(); }
};

ProfileGrid grid_1d(const Projection& proj, const BoxDomain& box, int n = 100);
ProfileGrid grid_1d_range(double lo, double hi, int n);
ProfileGrid grid_2d(const Projection& proj, const BoxDomain& box, int n1 = 30, int n2 = 30);

enum class Provenance { exact, spline_approx, kriging_approx };

struct ProfileCurve {
  Vector etas;
  Vector sup, inf;
  Matrix argmax, argmin;  // g x d; empty for approximated curves
  Provenance provenance = Provenance::exact;
  int approx_knots = 0;
};

struct ProfileMap {
  ProfileGrid grid;
  Vector sup, inf;        // NaN on masked nodes
  Matrix argmax, argmin;  // g x d
  Provenance provenance = Provenance::exact;
  int approx_knots = 0;
};

// 2d univariate curves describing the extremal behavior along coordinate i:
// each node solves the (d-1)-dimensional box problem with x_i fixed. Pass 1
// multi-starts every node independently (parallel); pass 2 chains warm starts
// through ascending eta. Identical output for any thread count.
ProfileCurve coordinate_profiles(const Objective& objective, const GradientFn* gradient,
                                 Index coord, const BoxDomain& box, const ProfileGrid& grid,
                                 const ProfileConfig& cfg = {});

// General p = 1 projections via null-space reduction and the box barrier.
ProfileCurve oblique_profiles(const Objective& objective, const GradientFn* gradient,
                              const Projection& proj, const BoxDomain& box,
                              const ProfileGrid& grid, const ProfileConfig& cfg = {});

// p = 2 lattices; warm starts propagate along lattice rows.
ProfileMap bivariate_profiles(const Objective& objective, const GradientFn* gradient,
                              const Projection& proj, const BoxDomain& box,
                              const ProfileGrid& lattice, const ProfileConfig& cfg = {});

struct Interval {
  double lo = 0.0, hi = 0.0;
  bool low_resolution = false;  // shorter than one grid cell

  double length() const { return hi - lo; }
};

struct ExcursionIntervals {
  double tau = 0.0;
  std::vector<Interval> non_excursion;  // profile sup < tau
  std::vector<Interval> excursion;      // profile inf >= tau
  std::vector<Interval> undetermined;
};

// Optional endpoint refinement: bisection on the exact profile inside the
// bracketing grid cell (used when the curve is exact, not approximated).
struct CrossingRefiner {
  std::function<double(double)> sup_eval;
  std::function<double(double)> inf_eval;
  int max_iter = 20;
};

ExcursionIntervals excursion_intervals(const ProfileCurve& curve, double tau,
                                       const CrossingRefiner* refiner = nullptr);

// Refiners that re-solve the profile problem at single eta values (for
// bisection of interval endpoints on exact curves). Callables are copied;
// the gradient, when given, is copied too.
CrossingRefiner exact_refiner_coordinate(Objective objective, const GradientFn* gradient,
                                         Index coord, const BoxDomain& box,
                                         const ProfileConfig& cfg = {});
CrossingRefiner exact_refiner_projection(Objective objective, const GradientFn* gradient,
                                         const Projection& proj, const BoxDomain& box,
                                         const ProfileConfig& cfg = {});

// Directional slopes of an exact profile at its argmax/argmin trace
// (optimal-value-function derivative: the objective's directional derivative
// at the inner optimum). proj must have p = 1.
Vector profile_sup_slopes(const ProfileCurve& curve, const GradientFn& gradient,
                          const Projection& proj);
Vector profile_inf_slopes(const ProfileCurve& curve, const GradientFn& gradient,
                          const Projection& proj);

}  // namespace profex
