#pragma once

#include "profex/profiles.hpp"
#include "profex/types.hpp"

#include <optional>

namespace profex {

// Piecewise-cubic interpolant through (x_i, y_i). Default end condition is
// not-a-knot (reproduces cubic polynomials exactly); natural is available.
// With slopes supplied the curve is the C1 cubic Hermite interpolant.
class CubicSpline {
 public:
  enum class End { not_a_knot, natural };

  static CubicSpline interpolate(const Vector& xs, const Vector& ys,
                                 End end = End::not_a_knot);
  static CubicSpline hermite(const Vector& xs, const Vector& ys, const Vector& slopes);

  double eval(double x) const;
  Index knots() const { return xs_.size(); }

 private:
  Vector xs_, ys_;
  Vector b_, c_, d_;  // segment coefficients: y + b*t + c*t^2 + d*t^3
};

// Spline approximation of 1-d profile curves from k >= 4 exact evaluations.
// With slopes given, uses slope-augmented Hermite segments.
ProfileCurve approximate_profile_1d(const Vector& knot_etas, const Vector& sup_values,
                                    const Vector& inf_values, const Vector& query_etas,
                                    const std::optional<Vector>& sup_slopes = std::nullopt,
                                    const std::optional<Vector>& inf_slopes = std::nullopt,
                                    CubicSpline::End end = CubicSpline::End::not_a_knot);

// Ordinary-kriging approximation of 2-d profile maps from k >= 10 exact
// nodes (Matern 5/2, maximum-likelihood lengthscales).
ProfileMap approximate_profile_2d(const Matrix& knot_etas, const Vector& sup_values,
                                  const Vector& inf_values, const ProfileGrid& query);

}  // namespace profex
