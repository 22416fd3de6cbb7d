#pragma once

#include "profex/optimize.hpp"
#include "profex/types.hpp"

#include <functional>
#include <string>
#include <vector>

namespace profex {

// 2-d wave objective on [0,1]^2: sin(a v1'x + b) + cos(c v2'x + d) + shift,
// with orthonormal directions v1 = (cos t, sin t), v2 = (cos(t+pi/2), ...).
// The default shift keeps the excursion set above 0 small (volume ~ 0.127),
// mirroring the explicit -1.5 of the 3-d variant.
struct AnalyticFn2d {
  double a = 1.0, b = 0.0, c = 10.0, d = 0.0;
  double shift = -1.5;
  double theta = 0.5235987755982988;  // pi/6

  Vector v1() const;
  Vector v2() const;
  double eval(const Vector& x) const;
  Vector grad(const Vector& x) const;
};

// 3-d variant with an orthonormal spherical frame, shifted down by 1.5.
struct AnalyticFn3d {
  double a = 1.0, b = 0.0, c = 10.0, d = 0.0, e = 1.0, f = 0.0;
  double theta = 0.7853981633974483;  // pi/4
  double phi = 0.7853981633974483;

  Vector v1() const;
  Vector v2() const;
  Vector v3() const;
  double eval(const Vector& x) const;
  Vector grad(const Vector& x) const;
};

// Smooth 5-d surrogate on [0,1]^5: monotone ramp in x1, saturating term in
// x2, a bump in x3, and 0.01-amplitude ripples in x4, x5. Strictly positive,
// so the squared response can stand in for an area-like output.
struct Synthetic5d {
  double base = 0.3;
  double ramp = 2.4;
  double sat_scale = 1.3;
  double sat_rate = 2.5;
  double bump_height = 0.8;
  double bump_center = 0.55;
  double bump_width = 30.0;
  double ripple = 0.01;

  double eval(const Vector& x) const;
  Vector grad(const Vector& x) const;
};

// Name-indexed registry for the CLI demo mode.
struct RegisteredFn {
  std::string name;
  Index dim;
  BoxDomain box;
  Objective eval;
  GradientFn grad;
};

const std::vector<RegisteredFn>& function_registry();
const RegisteredFn& find_function(const std::string& name);

}  // namespace profex
