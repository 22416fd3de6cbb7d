#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "profex/doe.hpp"
#include "profex/profiles.hpp"
#include "profex/rng.hpp"
#include "profex/spline.hpp"
#include "profex/testfns.hpp"

#include <cmath>

using namespace profex;

namespace {

Vector vec(std::initializer_list<double> vals) {
  Vector v(static_cast<Index>(vals.size()));
  Index i = 0;
  for (double x : vals) v[i++] = x;
  return v;
}

// endpoints of non-excursion intervals within tol of the expected list
void check_intervals(const std::vector<Interval>& got,
                     const std::vector<std::pair<double, double>>& expected, double tol) {
  REQUIRE(got.size() == expected.size());
  for (size_t i = 0; i < got.size(); ++i) {
    CHECK(got[i].lo == doctest::Approx(expected[i].first).epsilon(0).scale(0).epsilon(0));
    CHECK(std::abs(got[i].lo - expected[i].first) <= tol);
    CHECK(std::abs(got[i].hi - expected[i].second) <= tol);
  }
}

}  // namespace

TEST_CASE("fiber-constant objective gives identity curves") {
  Objective f = [](const Vector& x) { return x[0]; };
  GradientFn g = [](const Vector& x) {
    Vector v = Vector::Zero(x.size());
    v[0] = 1.0;
    return v;
  };
  BoxDomain box = BoxDomain::unit(2);
  ProfileGrid grid = grid_1d_range(0.0, 1.0, 21);
  ProfileCurve c = coordinate_profiles(f, &g, 0, box, grid);
  for (Index j = 0; j < 21; ++j) {
    CHECK(c.sup[j] == doctest::Approx(c.etas[j]).epsilon(1e-9));
    CHECK(c.inf[j] == doctest::Approx(c.etas[j]).epsilon(1e-9));
  }
}

TEST_CASE("coordinate non-excursion intervals of the 2-d wave") {
  AnalyticFn2d fn;
  Objective f = [&fn](const Vector& x) { return fn.eval(x); };
  GradientFn g = [&fn](const Vector& x) { return fn.grad(x); };
  BoxDomain box = BoxDomain::unit(2);
  ProfileGrid grid = grid_1d_range(0.0, 1.0, 100);

  ProfileCurve c1 = coordinate_profiles(f, &g, 0, box, grid);
  CrossingRefiner r1 = exact_refiner_coordinate(f, &g, 0, box);
  ExcursionIntervals e1 = excursion_intervals(c1, 0.0, &r1);
  REQUIRE(e1.non_excursion.size() == 1);
  CHECK(std::abs(e1.non_excursion[0].lo - 0.0) <= 0.01);
  CHECK(std::abs(e1.non_excursion[0].hi - 0.13) <= 0.01);

  ProfileCurve c2 = coordinate_profiles(f, &g, 1, box, grid);
  CrossingRefiner r2 = exact_refiner_coordinate(f, &g, 1, box);
  ExcursionIntervals e2 = excursion_intervals(c2, 0.0, &r2);
  REQUIRE(e2.non_excursion.size() == 2);
  // reference endpoints are 2-decimal readouts of a 100-node grid, so half a
  // grid cell of quantization rides on top of the band
  const double tol = 0.01 + 0.5 / 99.0;
  CHECK(std::abs(e2.non_excursion[0].lo - 0.0) <= tol);
  CHECK(std::abs(e2.non_excursion[0].hi - 0.25) <= tol);
  CHECK(std::abs(e2.non_excursion[1].lo - 0.70) <= tol);
  CHECK(std::abs(e2.non_excursion[1].hi - 0.80) <= tol);

  // excluded volumes 0.13 and 0.35 for coordinate strips
  double len1 = 0.0, len2 = 0.0;
  for (const auto& iv : e1.non_excursion) len1 += iv.length();
  for (const auto& iv : e2.non_excursion) len2 += iv.length();
  CHECK(std::abs(len1 - 0.13) <= 0.02);
  CHECK(std::abs(len2 - 0.35) <= 0.02);
}

TEST_CASE("oblique non-excursion intervals along the generating directions") {
  AnalyticFn2d fn;
  Objective f = [&fn](const Vector& x) { return fn.eval(x); };
  GradientFn g = [&fn](const Vector& x) { return fn.grad(x); };
  BoxDomain box = BoxDomain::unit(2);

  {
    Projection pr = Projection::oblique(fn.v1());
    ProfileCurve c = oblique_profiles(f, &g, pr, box, grid_1d(pr, box, 100));
    ExcursionIntervals e = excursion_intervals(c, 0.0);
    REQUIRE(e.non_excursion.size() == 2);
    CHECK(std::abs(e.non_excursion[0].lo - 0.0) <= 0.02);
    CHECK(std::abs(e.non_excursion[0].hi - 0.52) <= 0.02);
    CHECK(std::abs(e.non_excursion[1].lo - 1.22) <= 0.02);
    CHECK(std::abs(e.non_excursion[1].hi - 1.37) <= 0.02);
  }
  {
    Projection pr = Projection::oblique(fn.v2());
    ProfileCurve c = oblique_profiles(f, &g, pr, box, grid_1d(pr, box, 100));
    ExcursionIntervals e = excursion_intervals(c, 0.0);
    REQUIRE(e.non_excursion.size() == 3);
    CHECK(std::abs(e.non_excursion[0].lo - (-0.5)) <= 0.02);
    CHECK(std::abs(e.non_excursion[0].hi - (-0.1)) <= 0.02);
    CHECK(std::abs(e.non_excursion[1].lo - 0.11) <= 0.02);
    CHECK(std::abs(e.non_excursion[1].hi - 0.54) <= 0.02);
    CHECK(std::abs(e.non_excursion[2].lo - 0.71) <= 0.02);
    CHECK(std::abs(e.non_excursion[2].hi - 0.87) <= 0.02);
  }
}

TEST_CASE("oblique along a canonical axis reduces to the coordinate path") {
  AnalyticFn2d fn;
  Objective f = [&fn](const Vector& x) { return fn.eval(x); };
  GradientFn g = [&fn](const Vector& x) { return fn.grad(x); };
  BoxDomain box = BoxDomain::unit(2);
  ProfileGrid grid = grid_1d_range(0.0, 1.0, 40);
  ProfileCurve cc = coordinate_profiles(f, &g, 0, box, grid);
  ProfileCurve oc = oblique_profiles(f, &g, Projection::coordinate(0, 2), box, grid);
  for (Index j = 0; j < grid.size(); ++j) {
    CHECK(std::abs(cc.sup[j] - oc.sup[j]) <= 1e-6);
    CHECK(std::abs(cc.inf[j] - oc.inf[j]) <= 1e-6);
  }
}

TEST_CASE("non-unit directions keep the caller's eta units") {
  AnalyticFn2d fn;
  Objective f = [&fn](const Vector& x) { return fn.eval(x); };
  BoxDomain box = BoxDomain::unit(2);
  const Vector v = fn.v1();
  ProfileGrid unit_grid = grid_1d(Projection::oblique(v), box, 21);
  ProfileCurve unit_curve = oblique_profiles(f, nullptr, Projection::oblique(v), box, unit_grid);
  // doubled column: the image stretches by 2, values at 2*eta match
  Projection scaled = Projection::oblique(2.0 * v);
  ProfileGrid scaled_grid;
  scaled_grid.etas = 2.0 * unit_grid.etas;
  scaled_grid.feasible = unit_grid.feasible;
  scaled_grid.shape = unit_grid.shape;
  ProfileCurve scaled_curve = oblique_profiles(f, nullptr, scaled, box, scaled_grid);
  for (Index j = 0; j < unit_grid.size(); ++j) {
    CHECK(scaled_curve.sup[j] == doctest::Approx(unit_curve.sup[j]).epsilon(1e-8));
    CHECK(scaled_curve.inf[j] == doctest::Approx(unit_curve.inf[j]).epsilon(1e-8));
  }
}

TEST_CASE("slope-augmented segments reproduce a cubic with its derivatives") {
  auto poly = [](double x) { return 1.0 + 2.0 * x - x * x + 0.5 * x * x * x; };
  auto dpoly = [](double x) { return 2.0 - 2.0 * x + 1.5 * x * x; };
  Vector xs = vec({0.0, 0.3, 0.55, 0.8, 1.0});
  Vector ys(5), sl(5);
  for (Index i = 0; i < 5; ++i) {
    ys[i] = poly(xs[i]);
    sl[i] = dpoly(xs[i]);
  }
  Vector query(41);
  for (Index i = 0; i < 41; ++i) query[i] = i / 40.0;
  ProfileCurve c = approximate_profile_1d(xs, ys, ys, query, sl, sl);
  for (Index i = 0; i < 41; ++i)
    CHECK(c.sup[i] == doctest::Approx(poly(query[i])).epsilon(1e-12));
  CHECK(c.provenance == Provenance::spline_approx);
}

TEST_CASE("profile dominates the fiber and inf stays below sup") {
  AnalyticFn2d fn;
  Objective f = [&fn](const Vector& x) { return fn.eval(x); };
  GradientFn g = [&fn](const Vector& x) { return fn.grad(x); };
  BoxDomain box = BoxDomain::unit(2);
  ProfileGrid grid = grid_1d_range(0.0, 1.0, 25);
  ProfileCurve c = coordinate_profiles(f, &g, 1, box, grid);
  CounterRng rng(4, 0);
  for (Index j = 0; j < grid.size(); ++j) {
    CHECK(c.inf[j] <= c.sup[j] + 1e-12);
    for (int r = 0; r < 8; ++r) {
      Vector x(2);
      x << rng.uniform(), c.etas[j];
      CHECK(c.sup[j] >= fn.eval(x) - 1e-6);
      CHECK(c.inf[j] <= fn.eval(x) + 1e-6);
    }
  }
}

TEST_CASE("monotone transforms commute with profiles") {
  AnalyticFn2d fn;
  auto u = [](double t) { return t * t * t + 2.0 * t; };  // strictly increasing
  Objective f = [&fn](const Vector& x) { return fn.eval(x); };
  Objective uf = [&fn, &u](const Vector& x) { return u(fn.eval(x)); };
  BoxDomain box = BoxDomain::unit(2);
  ProfileGrid grid = grid_1d_range(0.0, 1.0, 30);
  ProfileConfig cfg;
  cfg.seed = 5150;
  ProfileCurve base = coordinate_profiles(f, nullptr, 0, box, grid, cfg);
  ProfileCurve mapped = coordinate_profiles(uf, nullptr, 0, box, grid, cfg);
  for (Index j = 0; j < grid.size(); ++j) {
    CHECK(mapped.sup[j] == doctest::Approx(u(base.sup[j])).epsilon(1e-6));
    CHECK(mapped.inf[j] == doctest::Approx(u(base.inf[j])).epsilon(1e-6));
  }
}

TEST_CASE("single-thread and multi-thread sweeps are bit-identical") {
  AnalyticFn2d fn;
  Objective f = [&fn](const Vector& x) { return fn.eval(x); };
  GradientFn g = [&fn](const Vector& x) { return fn.grad(x); };
  BoxDomain box = BoxDomain::unit(2);
  ProfileGrid grid = grid_1d_range(0.0, 1.0, 50);
  ProfileConfig one;
  one.threads = 1;
  ProfileConfig four;
  four.threads = 4;
  ProfileCurve a = coordinate_profiles(f, &g, 1, box, grid, one);
  ProfileCurve b = coordinate_profiles(f, &g, 1, box, grid, four);
  CHECK((a.sup - b.sup).norm() == 0.0);
  CHECK((a.inf - b.inf).norm() == 0.0);
  CHECK((a.argmax - b.argmax).norm() == 0.0);
}

TEST_CASE("bivariate separable objective has a closed-form map") {
  // g1(x1) + g2(x2) + g3(x3) with projection on (x1, x2)
  auto g1 = [](double t) { return std::sin(3.0 * t); };
  auto g2 = [](double t) { return 0.5 * t * t; };
  auto g3 = [](double t) { return std::cos(5.0 * t); };
  Objective f = [&](const Vector& x) { return g1(x[0]) + g2(x[1]) + g3(x[2]); };
  GradientFn g = [&](const Vector& x) {
    return vec({3.0 * std::cos(3.0 * x[0]), x[1], -5.0 * std::sin(5.0 * x[2])});
  };
  // max/min of g3 on [0,1] by dense scan
  double g3max = -1e300, g3min = 1e300;
  for (int i = 0; i <= 100000; ++i) {
    const double v = g3(i / 100000.0);
    g3max = std::max(g3max, v);
    g3min = std::min(g3min, v);
  }
  BoxDomain box = BoxDomain::unit(3);
  Projection pr = Projection::coordinate_pair(0, 1, 3);
  ProfileGrid lattice = grid_2d(pr, box, 7, 7);
  ProfileMap map = bivariate_profiles(f, &g, pr, box, lattice);
  for (Index r = 0; r < lattice.size(); ++r) {
    REQUIRE(lattice.feasible[static_cast<size_t>(r)]);
    const double base = g1(lattice.etas(r, 0)) + g2(lattice.etas(r, 1));
    CHECK(map.sup[r] == doctest::Approx(base + g3max).epsilon(1e-6));
    CHECK(map.inf[r] == doctest::Approx(base + g3min).epsilon(1e-6));
  }
}

TEST_CASE("oblique planar lattices mask infeasible bounding-box corners") {
  // a rotated plane: the bounding box of the image has unreachable corners
  Matrix psi(3, 2);
  psi << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(6.0),
         1.0 / std::sqrt(2.0), -1.0 / std::sqrt(6.0),
         0.0, 2.0 / std::sqrt(6.0);
  Projection pr = Projection::planar(psi);
  BoxDomain box = BoxDomain::unit(3);
  ProfileGrid lattice = grid_2d(pr, box, 8, 8);
  Index feasible = 0;
  for (bool f : lattice.feasible) feasible += f ? 1 : 0;
  CHECK(feasible > 0);
  CHECK(feasible < lattice.size());  // corners of the bounding box are masked

  Objective f = [](const Vector& x) { return x.sum(); };
  ProfileMap map = bivariate_profiles(f, nullptr, pr, box, lattice);
  for (Index r = 0; r < lattice.size(); ++r) {
    if (lattice.feasible[static_cast<size_t>(r)]) {
      CHECK(std::isfinite(map.sup[r]));
      CHECK(map.inf[r] <= map.sup[r] + 1e-12);
    } else {
      CHECK(std::isnan(map.sup[r]));
    }
  }
}

TEST_CASE("a lattice row equals the 1-d profile of the restricted function") {
  AnalyticFn3d fn;
  Objective f = [&fn](const Vector& x) { return fn.eval(x); };
  GradientFn g = [&fn](const Vector& x) { return fn.grad(x); };
  BoxDomain box = BoxDomain::unit(3);
  Projection pr = Projection::coordinate_pair(0, 1, 3);
  ProfileGrid lattice = grid_2d(pr, box, 5, 9);
  ProfileMap map = bivariate_profiles(f, &g, pr, box, lattice);

  // row i1 = 2 fixes eta_1; restrict x1 = eta_1 and take coordinate profiles
  const double eta1 = lattice.etas(2 * 9, 0);
  Objective fr = [&fn, eta1](const Vector& z) { return fn.eval(vec({eta1, z[0], z[1]})); };
  ProfileGrid grid = grid_1d_range(0.0, 1.0, 9);
  ProfileCurve row = coordinate_profiles(fr, nullptr, 0, BoxDomain::unit(2), grid);
  for (int j = 0; j < 9; ++j) {
    CHECK(std::abs(map.sup[2 * 9 + j] - row.sup[j]) <= 1e-4);
    CHECK(std::abs(map.inf[2 * 9 + j] - row.inf[j]) <= 1e-4);
  }
}

TEST_CASE("excursion interval classification basics") {
  ProfileCurve c;
  c.etas = vec({0.0, 0.25, 0.5, 0.75, 1.0});
  SUBCASE("everything below the threshold") {
    c.sup = Vector::Constant(5, -1.0);
    c.inf = Vector::Constant(5, -2.0);
    ExcursionIntervals e = excursion_intervals(c, 0.0);
    REQUIRE(e.non_excursion.size() == 1);
    CHECK(e.non_excursion[0].lo == 0.0);
    CHECK(e.non_excursion[0].hi == 1.0);
    CHECK(e.excursion.empty());
    CHECK(e.undetermined.empty());
  }
  SUBCASE("linear sup crossing at 0.13") {
    c.sup = c.etas;
    c.inf = Vector(c.etas.array() - 2.0);
    ExcursionIntervals e = excursion_intervals(c, 0.13);
    REQUIRE(e.non_excursion.size() == 1);
    CHECK(e.non_excursion[0].lo == 0.0);
    CHECK(e.non_excursion[0].hi == doctest::Approx(0.13).epsilon(1e-12));
    REQUIRE(e.undetermined.size() == 1);
    CHECK(e.undetermined[0].lo == doctest::Approx(0.13).epsilon(1e-12));
  }
  SUBCASE("partition covers the span") {
    c.sup = vec({-1.0, 1.0, 2.0, 1.0, -1.0});
    c.inf = vec({-2.0, -1.0, 1.5, -1.0, -2.0});
    ExcursionIntervals e = excursion_intervals(c, 0.0);
    double total = 0.0;
    for (const auto& iv : e.non_excursion) total += iv.length();
    for (const auto& iv : e.excursion) total += iv.length();
    for (const auto& iv : e.undetermined) total += iv.length();
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("sub-cell intervals survive and carry the low-resolution flag") {
  ProfileCurve c;
  c.etas = vec({0.0, 0.25, 0.5, 0.75, 1.0});
  // a spike dips below the threshold only around the middle node
  c.sup = vec({1.0, 0.9, -0.1, 0.9, 1.0});
  c.inf = vec({-1.0, -1.0, -1.0, -1.0, -1.0});
  ExcursionIntervals e = excursion_intervals(c, 0.0);
  REQUIRE(e.non_excursion.size() == 1);
  CHECK(e.non_excursion[0].length() < 0.25);
  CHECK(e.non_excursion[0].low_resolution);
}

TEST_CASE("profile inf is exactly the negated profile sup of the negation") {
  AnalyticFn2d fn;
  Objective f = [&fn](const Vector& x) { return fn.eval(x); };
  Objective nf = [&fn](const Vector& x) { return -fn.eval(x); };
  BoxDomain box = BoxDomain::unit(2);
  ProfileGrid grid = grid_1d_range(0.0, 1.0, 15);
  ProfileConfig cfg;
  cfg.seed = 8899;
  ProfileCurve base = coordinate_profiles(f, nullptr, 0, box, grid, cfg);
  ProfileCurve neg = coordinate_profiles(nf, nullptr, 0, box, grid, cfg);
  for (Index j = 0; j < grid.size(); ++j) {
    CHECK(base.inf[j] == -neg.sup[j]);  // exact: same solves, negated
    CHECK(base.sup[j] == -neg.inf[j]);
  }
}

TEST_CASE("bisection refinement sharpens a crossing") {
  // curve sampled coarsely from a known function: sup(eta) = eta^2 - 0.2
  ProfileCurve c;
  c.etas = vec({0.0, 0.5, 1.0});
  c.sup = vec({-0.2, 0.05, 0.8});
  c.inf = Vector(c.sup.array() - 1.0);
  CrossingRefiner ref;
  ref.sup_eval = [](double eta) { return eta * eta - 0.2; };
  ref.inf_eval = [](double eta) { return eta * eta - 1.2; };
  ExcursionIntervals e = excursion_intervals(c, 0.0, &ref);
  REQUIRE(e.non_excursion.size() == 1);
  CHECK(e.non_excursion[0].hi == doctest::Approx(std::sqrt(0.2)).epsilon(1e-5));
}

TEST_CASE("spline reproduces cubic polynomials exactly") {
  auto poly = [](double x) { return 2.0 - x + 3.0 * x * x - 0.5 * x * x * x; };
  Vector xs = vec({0.0, 0.15, 0.4, 0.55, 0.8, 1.0});
  Vector ys(6);
  for (Index i = 0; i < 6; ++i) ys[i] = poly(xs[i]);
  CubicSpline s = CubicSpline::interpolate(xs, ys);
  for (int i = 0; i <= 200; ++i) {
    const double x = i / 200.0;
    CHECK(s.eval(x) == doctest::Approx(poly(x)).epsilon(1e-9));
  }
}

TEST_CASE("spline hits its knots and rejects tiny knot sets") {
  Vector xs = vec({0.9, 0.1, 0.5, 0.3, 0.7});  // unsorted on purpose
  Vector ys = vec({1.0, -1.0, 0.3, 0.2, -0.4});
  CubicSpline s = CubicSpline::interpolate(xs, ys);
  for (Index i = 0; i < 5; ++i) CHECK(s.eval(xs[i]) == doctest::Approx(ys[i]).epsilon(1e-12));
  CHECK_THROWS_AS(approximate_profile_1d(vec({0, 1, 2}), vec({0, 1, 2}), vec({0, 0, 0}),
                                         vec({0.5})),
                  std::invalid_argument);
}

TEST_CASE("spline approximation of the wave profiles stays within the bands") {
  AnalyticFn2d fn;
  Objective f = [&fn](const Vector& x) { return fn.eval(x); };
  GradientFn g = [&fn](const Vector& x) { return fn.grad(x); };
  BoxDomain box = BoxDomain::unit(2);
  ProfileGrid dense = grid_1d_range(0.0, 1.0, 100);

  for (Index coord : {Index(0), Index(1)}) {
    ProfileCurve exact = coordinate_profiles(f, &g, coord, box, dense);
    // k = 15 stratified knots
    CounterRng rng(2026, 3 + static_cast<std::uint64_t>(coord));
    const int k = 15;
    Vector knots(k);
    for (int i = 0; i < k; ++i) knots[i] = (i + rng.uniform()) / k;
    ProfileGrid kg;
    kg.etas.resize(k, 1);
    kg.etas.col(0) = knots;
    kg.feasible.assign(k, true);
    kg.shape = {k};
    ProfileCurve at_knots = coordinate_profiles(f, &g, coord, box, kg);
    ProfileCurve approx = approximate_profile_1d(knots, at_knots.sup, at_knots.inf, dense.etas);
    // median absolute error relative to the curve range, per curve
    auto median_rel_err = [&](const Vector& a, const Vector& e) {
      const double range = e.maxCoeff() - e.minCoeff();
      std::vector<double> errs;
      for (Index j = 0; j < a.size(); ++j) errs.push_back(std::abs(a[j] - e[j]) / range);
      std::sort(errs.begin(), errs.end());
      return errs[errs.size() / 2];
    };
    const double sup_err = median_rel_err(approx.sup, exact.sup);
    const double inf_err = median_rel_err(approx.inf, exact.inf);
    MESSAGE("coord ", coord, ": sup_err = ", sup_err, ", inf_err = ", inf_err);
    CHECK(inf_err <= 0.01);
    CHECK(sup_err <= 0.06);
  }
}

TEST_CASE("profile slopes equal the objective's directional derivative at the argmax") {
  AnalyticFn2d fn;
  Objective f = [&fn](const Vector& x) { return fn.eval(x); };
  GradientFn g = [&fn](const Vector& x) { return fn.grad(x); };
  BoxDomain box = BoxDomain::unit(2);
  ProfileGrid grid = grid_1d_range(0.05, 0.95, 12);
  ProfileCurve c = coordinate_profiles(f, &g, 0, box, grid);
  Vector slopes = profile_sup_slopes(c, g, Projection::coordinate(0, 2));
  // finite differences of the exact profile
  for (Index j = 0; j < grid.size(); ++j) {
    const double h = 1e-4;
    ProfileGrid two;
    two.etas.resize(2, 1);
    two.etas << c.etas[j] - h, c.etas[j] + h;
    two.feasible.assign(2, true);
    two.shape = {2};
    ProfileCurve nb = coordinate_profiles(f, &g, 0, box, two);
    const double fd = (nb.sup[1] - nb.sup[0]) / (2.0 * h);
    CHECK(slopes[j] == doctest::Approx(fd).epsilon(5e-3));
  }
}

TEST_CASE("kriging approximation of a separable 2-d map") {
  auto g1 = [](double t) { return std::sin(3.0 * t); };
  auto g2 = [](double t) { return 0.5 * t * t; };
  auto g3 = [](double t) { return std::cos(5.0 * t); };
  Objective f = [&](const Vector& x) { return g1(x[0]) + g2(x[1]) + g3(x[2]); };
  BoxDomain box = BoxDomain::unit(3);
  Projection pr = Projection::coordinate_pair(0, 1, 3);
  ProfileGrid lattice = grid_2d(pr, box, 9, 9);
  ProfileMap exact = bivariate_profiles(f, nullptr, pr, box, lattice);

  // k = 25 maximin nodes, exact solves there
  Matrix nodes = maximin_lhs(25, 2, 4242, 30);
  ProfileGrid kg;
  kg.etas = nodes;
  kg.feasible.assign(25, true);
  kg.shape = {25, 1};
  Vector sup_k(25), inf_k(25);
  for (Index i = 0; i < 25; ++i) {
    ProfileGrid one;
    one.etas = nodes.row(i);
    one.feasible.assign(1, true);
    one.shape = {1, 1};
    ProfileMap m = bivariate_profiles(f, nullptr, pr, box, one);
    sup_k[i] = m.sup[0];
    inf_k[i] = m.inf[0];
  }
  ProfileMap approx = approximate_profile_2d(nodes, sup_k, inf_k, lattice);
  const double range = exact.sup.maxCoeff() - exact.sup.minCoeff();
  double err = 0.0;
  for (Index r = 0; r < lattice.size(); ++r)
    err = std::max(err, std::abs(approx.sup[r] - exact.sup[r]));
  MESSAGE("2-d approx max err / range = ", err / range);
  CHECK(err <= 0.05 * range);

  // interpolation at the nodes
  ProfileGrid node_grid;
  node_grid.etas = nodes;
  node_grid.feasible.assign(25, true);
  node_grid.shape = {25, 1};
  ProfileMap at_nodes = approximate_profile_2d(nodes, sup_k, inf_k, node_grid);
  for (Index i = 0; i < 25; ++i)
    CHECK(at_nodes.sup[i] == doctest::Approx(sup_k[i]).epsilon(1e-6));

  // duplicates rejected
  Matrix dup = nodes;
  dup.row(1) = dup.row(0);
  CHECK_THROWS_AS(approximate_profile_2d(dup, sup_k, inf_k, lattice), std::invalid_argument);

  // constant values give a constant map
  Vector c25 = Vector::Constant(25, 1.5);
  ProfileMap cm = approximate_profile_2d(nodes, c25, c25, lattice);
  for (Index r = 0; r < lattice.size(); ++r)
    CHECK(cm.sup[r] == doctest::Approx(1.5).epsilon(1e-6));
}

TEST_CASE("analytic function values and gradients") {
  AnalyticFn2d plain;
  plain.shift = 0.0;
  CHECK(plain.eval(vec({0.0, 0.0})) == doctest::Approx(1.0).epsilon(1e-15));
  AnalyticFn2d f2;
  CHECK(f2.eval(vec({0.0, 0.0})) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(f2.v1().dot(f2.v2()) == doctest::Approx(0.0).epsilon(1e-15));
  AnalyticFn3d f3;
  CHECK(f3.eval(vec({0.0, 0.0, 0.0})) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(f3.v1().dot(f3.v2()) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(f3.v1().dot(f3.v3()) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(f3.v2().dot(f3.v3()) == doctest::Approx(0.0).epsilon(1e-15));

  CounterRng rng(8, 0);
  Synthetic5d f5;
  for (int rep = 0; rep < 25; ++rep) {
    Vector x2(2), x3(3), x5(5);
    for (Index i = 0; i < 2; ++i) x2[i] = rng.uniform();
    for (Index i = 0; i < 3; ++i) x3[i] = rng.uniform();
    for (Index i = 0; i < 5; ++i) x5[i] = rng.uniform();
    const double h = 1e-6;
    auto check_grad = [&](auto& fn, Vector x) {
      const Vector g = fn.grad(x);
      for (Index i = 0; i < x.size(); ++i) {
        Vector xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        const double fd = (fn.eval(xp) - fn.eval(xm)) / (2 * h);
        CHECK(g[i] == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
      }
    };
    check_grad(f2, x2);
    check_grad(f3, x3);
    check_grad(f5, x5);
  }
}

TEST_CASE("directional structure of the 2-d wave") {
  // first term constant along v2, second constant along v1
  AnalyticFn2d fn;
  CounterRng rng(21, 0);
  for (int rep = 0; rep < 10; ++rep) {
    Vector x(2);
    x << rng.uniform(), rng.uniform();
    const Vector g = fn.grad(x);
    // derivative along v2 only sees the cosine term
    const double along_v2 = g.dot(fn.v2());
    const double expected = -fn.c * std::sin(fn.c * fn.v2().dot(x) + fn.d);
    CHECK(along_v2 == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("synthetic 5-d shape: monotone ramps and weak tail coordinates") {
  Synthetic5d fn;
  CounterRng rng(12, 0);
  for (int rep = 0; rep < 20; ++rep) {
    Vector x(5);
    for (Index i = 0; i < 5; ++i) x[i] = rng.uniform();
    const Vector g = fn.grad(x);
    CHECK(g[0] > 0.0);
    CHECK(g[1] > 0.0);
    CHECK(std::abs(g[3]) <= 0.07);
    CHECK(std::abs(g[4]) <= 0.07);
  }
  // range spans useful thresholds
  CHECK(fn.eval(Vector::Zero(5)) < 1.0);
  CHECK(fn.eval(Vector::Ones(5)) > 3.0);
}

TEST_CASE("true excursion volume of the 2-d wave by grid counting") {
  AnalyticFn2d fn;
  const int ng = 1000;
  Index above = 0;
  Vector x(2);
  for (int i = 0; i < ng; ++i) {
    x[0] = (i + 0.5) / ng;
    for (int j = 0; j < ng; ++j) {
      x[1] = (j + 0.5) / ng;
      if (fn.eval(x) >= 0.0) ++above;
    }
  }
  const double volume = static_cast<double>(above) / (ng * ng);
  MESSAGE("excursion volume = ", volume);
  CHECK(std::abs(volume - 0.127) <= 0.005);
}
