#include <cmath>
#include <random>

#include "doctest.h"
#include "lagfront/errors.hpp"
#include "lagfront/fronts.hpp"
#include "lagfront/genfam.hpp"
#include "lagfront/newton.hpp"

using namespace lagfront;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) out(i++) = d;
  return out;
}

GeneratingFamily family(const char* text, std::size_t k, std::size_t n) {
  return GeneratingFamily::from_expression(text, k, n, Box(k + n, Interval{-3.0, 3.0}));
}

// Random critical points of a catalog family plus degenerate ones.
std::vector<CriticalPoint> sample_critical_points(const GeneratingFamily& fam, std::size_t count,
                                                  unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  std::vector<CriticalPoint> out;
  std::vector<Vector> caustic_seeds;
  for (std::size_t i = 0; i < 60; ++i) {
    Vector s(static_cast<Eigen::Index>(fam.dim()));
    for (Eigen::Index j = 0; j < s.size(); ++j) s(j) = u(rng);
    caustic_seeds.push_back(s);
  }
  for (const auto& p : caustic_points(fam, caustic_seeds)) {
    if (out.size() >= count / 4) break;
    out.push_back(make_critical_point(fam, GeneratingFamily::join(p.q, p.x)));
  }
  // Critical points over q = 0, where F_x often vanishes.
  std::vector<std::size_t> q_frozen;
  for (std::size_t i = 0; i < fam.k(); ++i) q_frozen.push_back(i);
  for (int i = 0; i < 10; ++i) {
    Vector s = Vector::Zero(static_cast<Eigen::Index>(fam.dim()));
    for (std::size_t j = fam.k(); j < fam.dim(); ++j) s(static_cast<Eigen::Index>(j)) = u(rng);
    try {
      out.push_back(make_critical_point(fam, newton_solve(fam.delta(), s, q_frozen)));
    } catch (const Error&) {
    }
  }
  while (out.size() < count) {
    Vector x(static_cast<Eigen::Index>(fam.n()));
    Vector q(static_cast<Eigen::Index>(fam.k()));
    for (Eigen::Index j = 0; j < x.size(); ++j) x(j) = u(rng);
    for (Eigen::Index j = 0; j < q.size(); ++j) q(j) = u(rng);
    const CriticalSet cs = solve_critical_set(fam, {x}, {q});
    if (!cs.points.empty()) out.push_back(cs.points.front());
  }
  return out;
}

}  // namespace

TEST_CASE("Morse family check") {
  auto fold = family("q1^3 + x1*q1", 1, 1);
  auto r = morse_family_check(fold, vec({0, 0}));
  CHECK(r.pass);
  CHECK(r.rank == 1);
  CHECK(morse_family_check(family("q1^2", 1, 1), vec({0, 0})).pass);
  r = morse_family_check(family("q1^3", 1, 1), vec({0, 0}));
  CHECK_FALSE(r.pass);
  CHECK(r.rank == 0);
  CHECK_THROWS_AS(morse_family_check(fold, vec({5, 0})), DomainError);
}

TEST_CASE("a declared base point must pass the Morse check") {
  CHECK_NOTHROW(GeneratingFamily::from_expression("q1^3 + x1*q1", 1, 1, {}, vec({0, 0})));
  CHECK_THROWS_AS(GeneratingFamily::from_expression("q1^3", 1, 1, {}, vec({0, 0})), DomainError);
}

TEST_CASE("Morse hypersurface check") {
  auto r = morse_hypersurface_check(family("q1^3 + x1*q1 + x2", 1, 2), vec({0, 0, 0}));
  CHECK(r.pass);
  CHECK(r.rank == 2);
  CHECK(r.on_zero_level);
  CHECK_FALSE(morse_hypersurface_check(family("q1^2", 1, 1), vec({0, 0})).pass);
  CHECK_FALSE(morse_hypersurface_check(family("q1^2 + 1", 1, 1), vec({0, 0})).on_zero_level);
}

TEST_CASE("non-degeneracy of the graph-like family") {
  GraphLikeFamily fold{family("q1^3 + x1*q1", 1, 1), {}};
  CHECK_FALSE(nondegeneracy_check(fold, vec({0, 0, 0})));
  GraphLikeFamily fold2{family("q1^3 + x1*q1 + x2", 1, 2), {}};
  CHECK(nondegeneracy_check(fold2, vec({0, 0, 0, 0})));
  CHECK_THROWS_AS(nondegeneracy_check(fold2, vec({0, 0, 0, 1})), NotOnSigmaStar);
  CHECK_THROWS_AS(nondegeneracy_check(fold2, vec({1, 0, 0, 1})), NotOnSigmaStar);
}

TEST_CASE("critical sets") {
  auto quad = family("q1^2 + x1*q1", 1, 1);
  const CriticalSet a = solve_critical_set(quad, {vec({-1}), vec({0}), vec({1})}, {vec({0.3})});
  REQUIRE(a.points.size() == 3);
  for (const auto& cp : a.points) {
    CHECK(cp.q(0) == doctest::Approx(-cp.x(0) / 2));
    CHECK(cp.corank == 0);
    CHECK(cp.residual < 1e-10);
  }

  auto cusp = family("q1^4 + x1*q1^2 + x2*q1", 1, 2);
  std::vector<Vector> seeds;
  for (double s = -1.5; s <= 1.5; s += 0.25) seeds.push_back(vec({s}));
  const CriticalSet b = solve_critical_set(cusp, {vec({-1, 0})}, seeds);
  REQUIRE(b.points.size() == 3);
  std::vector<double> qs;
  for (const auto& cp : b.points) qs.push_back(cp.q(0));
  std::sort(qs.begin(), qs.end());
  CHECK(qs[0] == doctest::Approx(-1 / std::sqrt(2.0)));
  CHECK(qs[1] == doctest::Approx(0).epsilon(1e-12));
  CHECK(qs[2] == doctest::Approx(1 / std::sqrt(2.0)));

  const CriticalSet c = solve_critical_set(cusp, {vec({1, 0})}, seeds);
  REQUIRE(c.points.size() == 1);
  CHECK(std::abs(c.points[0].q(0)) < 1e-10);
}

TEST_CASE("critical set output order is deterministic") {
  auto cusp = catalog_families::cusp();
  std::vector<Vector> xs = grid_points({{-1, 1, 9}, {-1, 1, 9}});
  std::vector<Vector> seeds{vec({-1}), vec({0}), vec({1})};
  const auto first = solve_critical_set(cusp, xs, seeds);
  const auto second = solve_critical_set(cusp, xs, seeds);
  REQUIRE(first.points.size() == second.points.size());
  for (std::size_t i = 0; i < first.points.size(); ++i) {
    CHECK(first.points[i].q == second.points[i].q);
    CHECK(first.points[i].x == second.points[i].x);
  }
}

TEST_CASE("Lagrangian map and Legendrian unfolding") {
  auto quad = family("q1^2 + x1*q1", 1, 1);
  const CriticalPoint cp = make_critical_point(quad, vec({-0.5, 1}));
  const LagrangianSample lag = lagrangian_map(quad, cp);
  CHECK(lag.p(0) == doctest::Approx(-0.5));
  const GraphLikeSample leg = legendrian_unfolding_map(GraphLikeFamily{quad, {}}, cp);
  CHECK(leg.t == doctest::Approx(-0.25));
  CHECK(leg.p == lag.p);
  CHECK(leg.x == lag.x);

  auto flat = family("q1^2", 1, 1);
  CHECK(lagrangian_map(flat, make_critical_point(flat, vec({0, 0.7}))).p(0) == 0.0);
}

TEST_CASE("rank diagnostics at regular and degenerate critical points") {
  auto cusp = family("q1^4 + x1*q1^2 + x2*q1", 1, 2);
  GraphLikeFamily gl{GeneratingFamily::from_expression("q1^4 + x1*q1^2 + x2*q1", 1, 2,
                                                       Box(3, Interval{-10, 10})),
                     {}};
  const auto regular = rank_diagnostics(gl, make_critical_point(gl.base, vec({0, 1, 0})));
  CHECK(regular.space_proj_rank == 2);
  CHECK(regular.front_proj_rank == 2);
  CHECK(regular.immersion_sigma_min > 0.1);

  const CriticalPoint degenerate = make_critical_point(gl.base, vec({1, -6, 8}));
  CHECK(degenerate.corank == 1);
  CHECK(degenerate.residual < 1e-12);
  const auto d = rank_diagnostics(gl, degenerate);
  CHECK(d.space_proj_rank == 1);
  CHECK(d.front_proj_rank == 1);
  CHECK(d.immersion_sigma_min > 1e-6);

  CHECK_THROWS_AS(critical_set_tangent(family("q1^3", 1, 1), vec({0, 0})), ChartFailure);
}

TEST_CASE("space and front projections degenerate together on the catalog") {
  unsigned seed = 1;
  for (const auto& fam : catalog_families::all()) {
    CAPTURE(fam.label());
    const GraphLikeFamily gl{fam, {}};
    std::size_t degenerate = 0;
    for (const auto& cp : sample_critical_points(fam, 200, seed++)) {
      const auto d = rank_diagnostics(gl, cp);
      CHECK((d.space_proj_rank < fam.n()) == (d.front_proj_rank < fam.n()));
      CHECK(d.immersion_sigma_min > 1e-6);
      if (d.space_proj_rank < fam.n()) ++degenerate;
      const LagrangianSample lag = lagrangian_map(fam, cp);
      const GraphLikeSample leg = legendrian_unfolding_map(gl, cp);
      CHECK(leg.p == lag.p);
    }
    if (fam.label() != "quadratic") CHECK(degenerate > 0);
  }
}

TEST_CASE("non-degeneracy agrees with the Morse hypersurface check on Sigma*") {
  unsigned seed = 100;
  for (const auto& fam : catalog_families::all()) {
    CAPTURE(fam.label());
    const GraphLikeFamily gl{fam, {}};
    std::size_t degenerate = 0;
    for (const auto& cp : sample_critical_points(fam, 200, seed++)) {
      const Vector qx = cp.qx();
      const double t = fam.field()(qx);
      Vector qxt(qx.size() + 1);
      qxt << qx, t;
      const GeneratingFamily shifted(
          fam.k(), fam.n(),
          ScalarField(fam.dim(), [f = fam.field(), t](const Vector& z) { return f(z) - t; },
                      fam.box(), [f = fam.field()](const Vector& z) { return grad(f, z); },
                      [f = fam.field()](const Vector& z) { return hessian(f, z); }),
          fam.box());
      const bool nondegenerate = nondegeneracy_check(gl, qxt);
      CHECK(nondegenerate == morse_hypersurface_check(shifted, qx).pass);
      if (!nondegenerate) ++degenerate;
    }
    if (fam.label() != "quadratic" && fam.label() != "fold") CHECK(degenerate > 0);
  }
}
