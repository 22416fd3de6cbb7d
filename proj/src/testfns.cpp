#include "profex/testfns.hpp"

#include <cmath>

namespace profex {

Vector AnalyticFn2d::v1() const {
  Vector v(2);
  v << std::cos(theta), std::sin(theta);
  return v;
}

Vector AnalyticFn2d::v2() const {
  Vector v(2);
  v << std::cos(theta + M_PI_2), std::sin(theta + M_PI_2);
  return v;
}

double AnalyticFn2d::eval(const Vector& x) const {
  return std::sin(a * v1().dot(x) + b) + std::cos(c * v2().dot(x) + d) + shift;
}

Vector AnalyticFn2d::grad(const Vector& x) const {
  return a * std::cos(a * v1().dot(x) + b) * v1() - c * std::sin(c * v2().dot(x) + d) * v2();
}

Vector AnalyticFn3d::v1() const {
  Vector v(3);
  v << std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta);
  return v;
}

Vector AnalyticFn3d::v2() const {
  Vector v(3);
  v << std::cos(theta) * std::cos(phi), std::cos(theta) * std::sin(phi), -std::sin(theta);
  return v;
}

Vector AnalyticFn3d::v3() const {
  Vector v(3);
  v << -std::sin(phi), std::cos(phi), 0.0;
  return v;
}

double AnalyticFn3d::eval(const Vector& x) const {
  return std::sin(a * v1().dot(x) + b) + std::cos(c * v2().dot(x) + d) +
         std::sin(e * v3().dot(x) + f) - 1.5;
}

Vector AnalyticFn3d::grad(const Vector& x) const {
  return a * std::cos(a * v1().dot(x) + b) * v1() - c * std::sin(c * v2().dot(x) + d) * v2() +
         e * std::cos(e * v3().dot(x) + f) * v3();
}

double Synthetic5d::eval(const Vector& x) const {
  const double sat = (1.0 - std::exp(-sat_rate * x[1])) / (1.0 - std::exp(-sat_rate));
  const double u = x[2] - bump_center;
  return base + ramp * x[0] + sat_scale * sat + bump_height * std::exp(-bump_width * u * u) +
         ripple * std::sin(2.0 * M_PI * x[3]) + ripple * std::cos(2.0 * M_PI * x[4]);
}

Vector Synthetic5d::grad(const Vector& x) const {
  Vector g(5);
  const double u = x[2] - bump_center;
  g[0] = ramp;
  g[1] = sat_scale * sat_rate * std::exp(-sat_rate * x[1]) / (1.0 - std::exp(-sat_rate));
  g[2] = bump_height * std::exp(-bump_width * u * u) * (-2.0 * bump_width * u);
  g[3] = ripple * 2.0 * M_PI * std::cos(2.0 * M_PI * x[3]);
  g[4] = -ripple * 2.0 * M_PI * std::sin(2.0 * M_PI * x[4]);
  return g;
}

const std::vector<RegisteredFn>& function_registry() {
  static const std::vector<RegisteredFn> reg = [] {
    std::vector<RegisteredFn> r;
    {
      AnalyticFn2d fn;
      r.push_back({"wave2d", 2, BoxDomain::unit(2),
                   [fn](const Vector& x) { return fn.eval(x); },
                   [fn](const Vector& x) { return fn.grad(x); }});
    }
    {
      AnalyticFn3d fn;
      r.push_back({"wave3d", 3, BoxDomain::unit(3),
                   [fn](const Vector& x) { return fn.eval(x); },
                   [fn](const Vector& x) { return fn.grad(x); }});
    }
    {
      Synthetic5d fn;
      r.push_back({"synth5d", 5, BoxDomain::unit(5),
                   [fn](const Vector& x) { return fn.eval(x); },
                   [fn](const Vector& x) { return fn.grad(x); }});
    }
    return r;
  }();
  return reg;
}

const RegisteredFn& find_function(const std::string& name) {
  for (const auto& f : function_registry())
    if (f.name == name) return f;
  throw std::invalid_argument("unknown test function: " + name);
}

}  // namespace profex
