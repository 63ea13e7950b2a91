#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "lagfront/errors.hpp"
#include "lagfront/geomapps.hpp"

using namespace lagfront;

namespace {

constexpr double kPi = std::numbers::pi;

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) out(i++) = d;
  return out;
}

std::vector<Vector> angle_grid(std::size_t count) {
  std::vector<Vector> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(vec({-kPi + 2 * kPi * i / count}));
  return out;
}

// Closed-form ellipse evolute.
Vector ellipse_evolute(double a, double b, double th) {
  return vec({(a * a - b * b) / a * std::pow(std::cos(th), 3), (b * b - a * a) / b * std::pow(std::sin(th), 3)});
}

}  // namespace

TEST_CASE("curvature of catalog curves and surfaces") {
  for (double th : {-2.0, 0.0, 0.7, 3.0}) {
    CHECK(curvature(surfaces::circle(2.0), vec({th})).kappa[0] == doctest::Approx(0.5));
  }
  CHECK(curvature(surfaces::ellipse(2, 1), vec({0.0})).kappa[0] == doctest::Approx(2.0));
  for (double th : {0.3, 1.1, 2.5}) {
    const double expected = 2.0 / std::pow(4 * std::sin(th) * std::sin(th) + std::cos(th) * std::cos(th), 1.5);
    CHECK(curvature(surfaces::ellipse(2, 1), vec({th})).kappa[0] == doctest::Approx(expected));
  }
  const auto plane = curvature(surfaces::plane({{-1, 1}, {-1, 1}}), vec({0.2, 0.3}));
  CHECK(std::abs(plane.kappa[0]) < 1e-15);
  CHECK(std::abs(plane.kappa[1]) < 1e-15);
  const auto sphere = curvature(surfaces::sphere(2.0), vec({1.0, 0.5}));
  CHECK(sphere.kappa[0] == doctest::Approx(0.5));
  CHECK(sphere.kappa[1] == doctest::Approx(0.5));
  CHECK_THROWS_AS(curvature(surfaces::sphere(1.0), vec({0.0, 0.3})), DegenerateMetric);
  const auto bowl = curvature(surfaces::graph(parse_expression("u1^2 + 3*u2^2", VariableSet::indexed("u", 2)),
                                              {{-1, 1}, {-1, 1}}),
                              vec({0, 0}));
  CHECK(bowl.kappa[0] == doctest::Approx(2.0));
  CHECK(bowl.kappa[1] == doctest::Approx(6.0));
}

TEST_CASE("principal curvatures match the shape operator invariants") {
  const auto e = surfaces::ellipsoid(3, 2, 1);
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u1(0.2, kPi - 0.2), u2(-kPi, kPi);
  for (int i = 0; i < 50; ++i) {
    const Vector u = vec({u1(rng), u2(rng)});
    const auto c = curvature(e, u);
    const SurfaceJet j = e.jet(u);
    const Vector nu = -e.normal(u);
    Matrix second(2, 2);
    second << j.d2[0].dot(nu), j.d2[1].dot(nu), j.d2[2].dot(nu), j.d2[3].dot(nu);
    const Matrix shape = (j.d1.transpose() * j.d1).inverse() * second;
    CHECK(c.kappa[0] <= c.kappa[1]);
    CHECK(std::abs(c.kappa[0] * c.kappa[1] - shape.determinant()) < 1e-8);
    CHECK(std::abs(c.kappa[0] + c.kappa[1] - shape.trace()) < 1e-8);
    CHECK(std::abs(e.normal(u).norm() - 1) < 1e-12);
  }
}

TEST_CASE("evolutes") {
  const auto ev = evolute(surfaces::ellipse(2, 1), angle_grid(400));
  CHECK(ev.skipped == 0);
  for (std::size_t i = 0; i < ev.points.size(); ++i) {
    CHECK((ev.points[i] - ellipse_evolute(2, 1, ev.u[i](0))).norm() < 1e-10);
  }
  const auto at = evolute(surfaces::ellipse(2, 1), {vec({0}), vec({kPi / 2}), vec({kPi}), vec({-kPi / 2})});
  CHECK((at.points[0] - vec({1.5, 0})).norm() < 1e-12);
  CHECK((at.points[1] - vec({0, -3})).norm() < 1e-12);
  CHECK((at.points[2] - vec({-1.5, 0})).norm() < 1e-12);
  CHECK((at.points[3] - vec({0, 3})).norm() < 1e-12);

  for (const auto& p : evolute(surfaces::circle(1.5), angle_grid(50)).points) CHECK(p.norm() < 1e-10);
  const std::vector<Vector> sphere_grid{vec({0.5, 0.1}), vec({1.5, -2.0}), vec({2.5, 3.0})};
  for (std::size_t branch : {0u, 1u}) {
    for (const auto& p : evolute(surfaces::sphere(2.0), sphere_grid, branch).points) CHECK(p.norm() < 1e-10);
  }
  CHECK(evolute(surfaces::plane({{-1, 1}, {-1, 1}}), {vec({0, 0})}).skipped == 1);
}

TEST_CASE("parallels") {
  const auto centre = parallels(surfaces::circle(1.0), {-1.0}, angle_grid(30));
  for (const auto& p : centre[0].points) CHECK(p.norm() < 1e-12);
  CHECK_THROWS_AS(parallels(surfaces::circle(1.0), {0.0}, angle_grid(3)), DomainError);

  const auto ellipse = surfaces::ellipse(2, 1);
  const auto grid = angle_grid(2000);
  const double eps = 1e-4;
  const auto near = parallels(ellipse, {eps}, grid);
  const auto base = parallels(ellipse, {1e-300}, grid);
  const double h = hausdorff_distance({near[0].points}, {base[0].points});
  CHECK(std::abs(h - eps) < 1e-9);
}

TEST_CASE("cusps of inward ellipse parallels lie on the evolute") {
  const auto ellipse = surfaces::ellipse(2, 1);
  const auto grid = angle_grid(4000);
  const auto ev = evolute(ellipse, grid);
  Polyline evolute_line = ev.points;
  evolute_line.push_back(ev.points.front());
  for (const auto& curve : parallels(ellipse, {-1.0, -2.0, -3.5}, grid)) {
    const auto cusps = parallel_cusps(ellipse, curve);
    CAPTURE(curve.r);
    CHECK(cusps.size() == 4);
    for (const auto& c : cusps) CHECK(distance_to_polylines(c, {evolute_line}) < 1e-6);
  }
  CHECK(parallel_cusps(ellipse, parallels(ellipse, {-0.3}, grid)[0]).empty());
  CHECK(parallel_cusps(ellipse, parallels(ellipse, {0.5}, grid)[0]).empty());
}

TEST_CASE("distance-squared family: derivatives, critical points and degeneracy") {
  const auto circle = surfaces::circle(1.0);
  const auto fams = distance_squared_family(circle);
  // Critical angles are exactly where v is on the normal line.
  const Vector v = vec({0.3, 0.4});
  const double normal_angle = std::atan2(0.4, 0.3);
  const auto cs = solve_critical_set(fams.family, {v}, {vec({0.5}), vec({-2.5})});
  REQUIRE(cs.points.size() == 2);
  for (const auto& cp : cs.points) {
    const double d = std::remainder(cp.q(0) - normal_angle, kPi);
    CHECK(std::abs(d) < 1e-10);
  }

  const auto ellipse = surfaces::ellipse(2, 1);
  const auto efam = distance_squared_family(ellipse).family;
  for (const auto& seed : focal_seeds(ellipse, angle_grid(20))) {
    CHECK(std::abs(hessian(efam.field(), seed)(0, 0)) < 1e-10);
  }
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> th(-kPi, kPi), rr(0.1, 3);
  for (int i = 0; i < 50; ++i) {
    const Vector u = vec({th(rng)});
    const double r = rr(rng);
    for (double sign : {-1.0, 1.0}) {
      const Vector z = GeneratingFamily::join(u, ellipse.point(u) + sign * r * ellipse.normal(u));
      Vector zt(4);
      zt << z, r * r;
      CHECK(sigma_star_residual(distance_squared_family(ellipse).extended, zt) < 1e-12);
    }
  }
  const Vector fd = fd_gradient(ScalarField(3, [f = efam.field()](const Vector& z) { return f(z); }), vec({0.4, 0.5, -0.2}));
  CHECK((fd - grad(efam.field(), vec({0.4, 0.5, -0.2}))).norm() < 1e-8);
  CHECK((fd_hessian(ScalarField(3, [f = efam.field()](const Vector& z) { return f(z); }), vec({0.4, 0.5, -0.2})) -
         hessian(efam.field(), vec({0.4, 0.5, -0.2}))).norm() < 1e-5);
}

TEST_CASE("Lagrangian and Legendrian maps of the distance family") {
  const auto ellipse = surfaces::ellipse(2, 1);
  const auto fams = distance_squared_family(ellipse);
  const Vector u = vec({0.8});
  const Vector v = ellipse.point(u) - 0.7 * ellipse.normal(u);
  const CriticalPoint cp = make_critical_point(fams.family, GeneratingFamily::join(u, v));
  CHECK(cp.residual < 1e-12);
  const auto lag = lagrangian_map(fams.family, cp);
  CHECK((lag.p + 2 * (ellipse.point(u) - v)).norm() < 1e-12);
  const auto leg = legendrian_unfolding_map(fams.extended, cp);
  CHECK(leg.t == doctest::Approx(0.49));
}

TEST_CASE("distance family is Morse and non-degenerate at random Sigma* points") {
  const std::vector<ParametricHypersurface> catalog{
      surfaces::circle(1.0), surfaces::ellipse(2, 1), surfaces::parabola(0.5),
      surfaces::sphere(1.0), surfaces::ellipsoid(3, 2, 1),
      surfaces::graph(parse_expression("u1^2 - u2^2 + u1*u2^3", VariableSet::indexed("u", 2)),
                      {{-1, 1}, {-1, 1}})};
  std::mt19937 rng(17);
  for (const auto& s : catalog) {
    CAPTURE(s.kind());
    const auto fams = distance_squared_family(s, Box(s.ambient(), Interval{}));
    std::size_t checked = 0;
    while (checked < 200) {
      Vector u(static_cast<Eigen::Index>(s.chart_dim()));
      for (Eigen::Index i = 0; i < u.size(); ++i) {
        const auto& iv = s.u_domain()[static_cast<std::size_t>(i)];
        u(i) = std::uniform_real_distribution<double>(iv.lo + 0.1, iv.hi - 0.1)(rng);
      }
      const double r = std::uniform_real_distribution<double>(-3.0, 3.0)(rng);
      if (std::abs(r) < 1e-3) continue;
      const Vector qx = GeneratingFamily::join(u, s.point(u) + r * s.normal(u));
      Vector qxt(qx.size() + 1);
      qxt << qx, r * r;
      CHECK(morse_family_check(fams.family, qx).pass);
      CHECK(nondegeneracy_check(fams.extended, qxt));
      ++checked;
    }
  }
}

TEST_CASE("distance-induced hypersurface family passes at a tangency point") {
  const auto circle = surfaces::circle(1.0);
  const auto fam = distance_squared_family(circle).family;
  const double r = 0.5;
  const GeneratingFamily shifted(
      1, 2,
      ScalarField(3, [f = fam.field(), r](const Vector& z) { return f(z) - r * r; }, {},
                  [f = fam.field()](const Vector& z) { return grad(f, z); },
                  [f = fam.field()](const Vector& z) { return hessian(f, z); }));
  const Vector u = vec({0.4});
  const auto check = morse_hypersurface_check(shifted, GeneratingFamily::join(u, circle.point(u) - r * circle.normal(u)));
  CHECK(check.on_zero_level);
  CHECK(check.pass);
}

TEST_CASE("caustic of the ellipse distance family is the evolute") {
  const auto ellipse = surfaces::ellipse(2, 1);
  const auto fams = distance_squared_family(ellipse, Box(2, Interval{-4, 4}));
  const ChainSet c = caustic(fams.family, focal_seeds(ellipse, angle_grid(8)), {0.01});
  REQUIRE(c.chains.size() == 1);
  CHECK(c.chains[0].closed);
  const auto ev = evolute(ellipse, angle_grid(4000));
  Polyline line = ev.points;
  line.push_back(line.front());
  CHECK(hausdorff_distance(c.polylines(), {line}) < 1e-3);
}

TEST_CASE("parallels coincide with the fronts of the extended family") {
  const auto ellipse = surfaces::ellipse(2, 1);
  const auto fams = distance_squared_family(ellipse);
  for (double r : {0.3, 1.2, 2.5}) {
    const FrontResult front = distance_front(ellipse, fams, r, angle_grid(8));
    REQUIRE(front.curves.size() == 2);
    for (const auto& curve : front.curves) {
      CHECK(curve.closed);
      const double sign = curve.branch == "outer" ? 1.0 : -1.0;
      for (const auto& p : curve.points) {
        CHECK((p.x - (ellipse.point(p.q) + sign * r * ellipse.normal(p.q))).norm() < 1e-6);
      }
    }
  }
  const auto circle = surfaces::circle(1.0);
  const FrontResult centre = distance_front(circle, distance_squared_family(circle), 1.0, angle_grid(8));
  bool found_point = false;
  for (const auto& curve : centre.curves) {
    if (curve.branch != "inner") continue;
    found_point = true;
    for (const auto& p : curve.points) CHECK(p.x.norm() < 1e-8);
  }
  CHECK(found_point);
}

TEST_CASE("Maxwell set of the ellipse lies on the symmetry axes") {
  const auto ellipse = surfaces::ellipse(2, 1);
  const auto fams = distance_squared_family(ellipse, Box(2, Interval{-3.5, 3.5}));
  const auto grid = grid_points({{-3.4, 3.4, 35}, {-3.4, 3.4, 35}});
  const MaxwellResult m = maxwell_set(fams.family, grid, angle_grid(12), 0.2, {0.01});
  REQUIRE_FALSE(m.points.empty());
  bool major = false, minor = false;
  for (const auto& p : m.points) {
    CHECK((std::abs(p.x(0)) < 1e-3 || std::abs(p.x(1)) < 1e-3));
    major = major || std::abs(p.x(1)) < 1e-3;
    minor = minor || std::abs(p.x(0)) < 1e-3;
  }
  CHECK(major);
  CHECK(minor);
}

TEST_CASE("tangent sphere check") {
  const auto ellipse = surfaces::ellipse(2, 1);
  // Brute-force scan of |X(th) - v| for its smallest local minimum.
  const Vector v = vec({0.5, 0});
  double best = 1e9;
  for (int i = 0; i < 200000; ++i) {
    const double th = -kPi + 2 * kPi * i / 200000;
    best = std::min(best, (ellipse.point(vec({th})) - v).norm());
  }
  const auto bitangent = tangent_sphere_check(ellipse, v, best, angle_grid(64));
  CHECK(bitangent.multiple);
  CHECK(bitangent.tangency_points.size() == 2);

  const auto circle = surfaces::circle(1.0);
  const auto all = tangent_sphere_check(circle, vec({0, 0}), 1.0, angle_grid(32));
  CHECK(all.multiple);
  CHECK(all.tangency_points.size() == 32);

  const auto single = tangent_sphere_check(ellipse, vec({5, 0}), 3.0, angle_grid(64));
  CHECK_FALSE(single.multiple);
  CHECK(single.tangency_points.size() == 1);
}

TEST_CASE("surface specs") {
  CHECK(surfaces::from_spec("ellipse", {{"a", 2}, {"b", 1}}).kind() == "ellipse");
  CHECK_THROWS_AS(surfaces::from_spec("ellipse", {{"a", 2}}), DomainError);
  CHECK_THROWS_AS(surfaces::from_spec("torus", {}), DomainError);
}
