#include "lagfront/geomapps.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "lagfront/errors.hpp"
#include "lagfront/newton.hpp"

namespace lagfront {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

Vector vec3(double a, double b, double c) {
  Vector v(3);
  v << a, b, c;
  return v;
}

Vector cross(const Vector& a, const Vector& b) {
  return vec3(a(1) * b(2) - a(2) * b(1), a(2) * b(0) - a(0) * b(2), a(0) * b(1) - a(1) * b(0));
}

double require(const std::map<std::string, double>& params, const char* key) {
  const auto it = params.find(key);
  if (it == params.end()) throw DomainError(std::string("surface parameter '") + key + "' is missing");
  return it->second;
}

}  // namespace

ParametricHypersurface::ParametricHypersurface(std::size_t ambient, JetFn jet, Box u_domain,
                                               std::vector<double> u_periods, int orientation,
                                               std::string kind) {
  if (ambient != 2 && ambient != 3) throw DomainError("ambient dimension must be 2 or 3");
  if (u_domain.size() != ambient - 1) throw DomainError("chart domain has wrong dimension");
  u_periods.resize(ambient - 1, 0.0);
  auto impl = std::make_shared<Impl>();
  impl->ambient = ambient;
  impl->jet = std::move(jet);
  impl->u_domain = std::move(u_domain);
  impl->periods = std::move(u_periods);
  impl->orientation = orientation >= 0 ? 1 : -1;
  impl->kind = std::move(kind);
  impl_ = std::move(impl);
}

SurfaceJet ParametricHypersurface::jet(const Vector& u) const {
  if (static_cast<std::size_t>(u.size()) != chart_dim()) throw DomainError("chart parameter has wrong size");
  if (!u.allFinite()) throw DomainError("non-finite chart parameter");
  return impl_->jet(u);
}

Vector ParametricHypersurface::normal(const Vector& u) const {
  const SurfaceJet j = jet(u);
  Vector n = ambient() == 2 ? vec2(j.d1(1, 0), -j.d1(0, 0)) : cross(j.d1.col(0), j.d1.col(1));
  const double len = n.norm();
  if (!(len > 0.0)) throw DegenerateMetric("chart is not an immersion here");
  return impl_->orientation * n / len;
}

Vector ParametricHypersurface::normal_derivative(const Vector& u) const {
  if (ambient() != 2) throw DomainError("normal_derivative is defined for curves only");
  const SurfaceJet j = jet(u);
  const Vector t = j.d1.col(0);
  const Vector dt = j.d2[0];
  const double len = t.norm();
  if (!(len > 0.0)) throw DegenerateMetric("chart is not an immersion here");
  const Vector raw = vec2(t(1), -t(0));
  const Vector draw = vec2(dt(1), -dt(0));
  return impl_->orientation * (draw / len - raw * t.dot(dt) / (len * len * len));
}

namespace surfaces {

ParametricHypersurface ellipse(double a, double b) {
  if (!(a > 0.0 && b > 0.0)) throw DomainError("ellipse axes must be positive");
  auto jet = [a, b](const Vector& u) {
    const double c = std::cos(u(0)), s = std::sin(u(0));
    SurfaceJet j;
    j.x = vec2(a * c, b * s);
    j.d1 = Matrix(2, 1);
    j.d1 << -a * s, b * c;
    j.d2 = {vec2(-a * c, -b * s)};
    return j;
  };
  return ParametricHypersurface(2, jet, {{-std::numbers::pi, std::numbers::pi}}, {kTwoPi}, 1,
                                "ellipse");
}

ParametricHypersurface circle(double radius) {
  ParametricHypersurface e = ellipse(radius, radius);
  return ParametricHypersurface(2, [e](const Vector& u) { return e.jet(u); }, e.u_domain(),
                                e.u_periods(), 1, "circle");
}

ParametricHypersurface parabola(double c, Interval u) {
  auto jet = [c](const Vector& p) {
    SurfaceJet j;
    j.x = vec2(p(0), c * p(0) * p(0));
    j.d1 = Matrix(2, 1);
    j.d1 << 1.0, 2.0 * c * p(0);
    j.d2 = {vec2(0.0, 2.0 * c)};
    return j;
  };
  return ParametricHypersurface(2, jet, {u}, {0.0}, 1, "parabola");
}

ParametricHypersurface ellipsoid(double a, double b, double c) {
  if (!(a > 0.0 && b > 0.0 && c > 0.0)) throw DomainError("ellipsoid axes must be positive");
  auto jet = [a, b, c](const Vector& u) {
    const double s1 = std::sin(u(0)), c1 = std::cos(u(0));
    const double s2 = std::sin(u(1)), c2 = std::cos(u(1));
    SurfaceJet j;
    j.x = vec3(a * s1 * c2, b * s1 * s2, c * c1);
    j.d1 = Matrix(3, 2);
    j.d1.col(0) = vec3(a * c1 * c2, b * c1 * s2, -c * s1);
    j.d1.col(1) = vec3(-a * s1 * s2, b * s1 * c2, 0.0);
    const Vector x12 = vec3(-a * c1 * s2, b * c1 * c2, 0.0);
    j.d2 = {vec3(-a * s1 * c2, -b * s1 * s2, -c * c1), x12, x12, vec3(-a * s1 * c2, -b * s1 * s2, 0.0)};
    return j;
  };
  return ParametricHypersurface(3, jet, {{0.0, std::numbers::pi}, {-std::numbers::pi, std::numbers::pi}},
                                {0.0, kTwoPi}, 1, "ellipsoid");
}

ParametricHypersurface sphere(double radius) {
  ParametricHypersurface e = ellipsoid(radius, radius, radius);
  return ParametricHypersurface(3, [e](const Vector& u) { return e.jet(u); }, e.u_domain(),
                                e.u_periods(), 1, "sphere");
}

ParametricHypersurface graph(const PolyExpr& g, Box u_domain) {
  const Polynomial p = Polynomial::from_expression(g, 2);
  const Polynomial g1 = p.derivative(0), g2 = p.derivative(1);
  const Polynomial g11 = g1.derivative(0), g12 = g1.derivative(1), g22 = g2.derivative(1);
  auto jet = [p, g1, g2, g11, g12, g22](const Vector& u) {
    const double pt[] = {u(0), u(1)};
    SurfaceJet j;
    j.x = vec3(u(0), u(1), p.evaluate(pt));
    j.d1 = Matrix(3, 2);
    j.d1.col(0) = vec3(1.0, 0.0, g1.evaluate(pt));
    j.d1.col(1) = vec3(0.0, 1.0, g2.evaluate(pt));
    const Vector x12 = vec3(0.0, 0.0, g12.evaluate(pt));
    j.d2 = {vec3(0.0, 0.0, g11.evaluate(pt)), x12, x12, vec3(0.0, 0.0, g22.evaluate(pt))};
    return j;
  };
  return ParametricHypersurface(3, jet, std::move(u_domain), {0.0, 0.0}, -1, "graph");
}

ParametricHypersurface plane(Box u_domain) {
  return graph(PolyExpr::constant(Rational(0)), std::move(u_domain));
}

ParametricHypersurface from_spec(const std::string& kind, const std::map<std::string, double>& params) {
  auto radius = [&] { return params.count("r") ? params.at("r") : require(params, "R"); };
  if (kind == "circle") return circle(radius());
  if (kind == "ellipse") return ellipse(require(params, "a"), require(params, "b"));
  if (kind == "parabola") {
    const double c = require(params, "c");
    const double lo = params.count("u_lo") ? params.at("u_lo") : -2.0;
    const double hi = params.count("u_hi") ? params.at("u_hi") : 2.0;
    return parabola(c, {lo, hi});
  }
  if (kind == "sphere") return sphere(radius());
  if (kind == "ellipsoid") {
    return ellipsoid(require(params, "a"), require(params, "b"), require(params, "c"));
  }
  throw DomainError("unknown surface kind '" + kind + "'");
}

}  // namespace surfaces

CurvatureData curvature(const ParametricHypersurface& surface, const Vector& u) {
  const SurfaceJet j = surface.jet(u);
  const Matrix metric = j.d1.transpose() * j.d1;
  if (metric.determinant() < 1e-14) throw DegenerateMetric("first fundamental form is singular");
  const Vector nu = -surface.normal(u);
  CurvatureData out;
  if (surface.ambient() == 2) {
    const double speed = std::sqrt(metric(0, 0));
    out.kappa = {j.d2[0].dot(nu) / (speed * speed)};
    out.directions = j.d1 / speed;
    return out;
  }
  const auto m = static_cast<Eigen::Index>(surface.chart_dim());
  Matrix second(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) second(a, b) = j.d2[static_cast<std::size_t>(a * m + b)].dot(nu);
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> solver(second, metric);
  const Vector k = solver.eigenvalues();
  out.kappa.assign(k.data(), k.data() + k.size());
  out.directions = j.d1 * solver.eigenvectors();
  for (Eigen::Index c = 0; c < out.directions.cols(); ++c) out.directions.col(c).normalize();
  return out;
}

PointSet evolute(const ParametricHypersurface& surface, const std::vector<Vector>& u_grid,
                 std::size_t branch) {
  if (branch >= surface.chart_dim()) throw DomainError("no such curvature branch");
  PointSet out;
  for (const auto& u : u_grid) {
    double kappa = 0.0;
    try {
      kappa = curvature(surface, u).kappa[branch];
    } catch (const DegenerateMetric&) {
      ++out.skipped;
      continue;
    }
    if (std::abs(kappa) < 1e-12) {
      ++out.skipped;
      continue;
    }
    out.points.push_back(surface.point(u) - surface.normal(u) / kappa);
    out.u.push_back(u);
  }
  return out;
}

std::vector<ParallelCurve> parallels(const ParametricHypersurface& surface,
                                     const std::vector<double>& r_values,
                                     const std::vector<Vector>& u_grid) {
  std::vector<ParallelCurve> out;
  for (double r : r_values) {
    if (r == 0.0) throw DomainError("parallel offset r must be non-zero");
    ParallelCurve curve;
    curve.r = r;
    for (const auto& u : u_grid) {
      curve.points.push_back(surface.point(u) + r * surface.normal(u));
      curve.u.push_back(u);
    }
    out.push_back(std::move(curve));
  }
  return out;
}

std::vector<Vector> parallel_cusps(const ParametricHypersurface& surface, const ParallelCurve& curve) {
  std::vector<Vector> out;
  if (surface.ambient() != 2 || curve.points.size() < 4) return out;
  Polyline line = curve.points;
  std::vector<double> us;
  for (const auto& u : curve.u) us.push_back(u(0));
  const double period = surface.u_periods()[0];
  const double spacing = us[1] - us[0];
  if (period > 0.0 && std::abs(us.back() + spacing - us.front() - period) < 1.5 * std::abs(spacing)) {
    for (std::size_t i = 0; i < 3; ++i) {
      line.push_back(curve.points[i]);
      us.push_back(us[i] + period);
    }
  }
  auto velocity = [&](double s) -> Vector {
    Vector u(1);
    u << s;
    return surface.jet(u).d1.col(0) + curve.r * surface.normal_derivative(u);
  };
  for (const auto& [lo, hi] : find_reversals(line)) {
    const Vector dir = (line[lo + 1] - line[lo]).normalized();
    Vector cusp;
    try {
      Vector u(1);
      u << refine_reversal(velocity, us[lo], us[hi], dir);
      cusp = surface.point(u) + curve.r * surface.normal(u);
    } catch (const Error&) {
      std::size_t best = lo + 1;
      for (std::size_t i = lo + 1; i < hi; ++i) {
        if ((line[i + 1] - line[i - 1]).norm() < (line[best + 1] - line[best - 1]).norm()) best = i;
      }
      cusp = line[best];
    }
    bool duplicate = false;
    for (const auto& c : out) duplicate = duplicate || (c - cusp).norm() < 1e-9;
    if (!duplicate) out.push_back(std::move(cusp));
  }
  return out;
}

DistanceFamilies distance_squared_family(const ParametricHypersurface& surface, Box v_box) {
  const std::size_t n = surface.ambient();
  const std::size_t m = surface.chart_dim();
  const auto mi = static_cast<Eigen::Index>(m);
  const auto ni = static_cast<Eigen::Index>(n);
  if (v_box.empty()) v_box.assign(n, Interval{-10.0, 10.0});
  if (v_box.size() != n) throw DomainError("v box has wrong dimension");

  auto split = [mi, ni](const Vector& z) { return std::pair<Vector, Vector>(z.head(mi), z.tail(ni)); };
  auto value = [surface, split](const Vector& z) {
    const auto [u, v] = split(z);
    return (surface.point(u) - v).squaredNorm();
  };
  auto gradient = [surface, split, mi, ni](const Vector& z) {
    const auto [u, v] = split(z);
    const SurfaceJet j = surface.jet(u);
    const Vector diff = j.x - v;
    Vector g(mi + ni);
    g.head(mi) = 2.0 * j.d1.transpose() * diff;
    g.tail(ni) = -2.0 * diff;
    return g;
  };
  auto hess = [surface, split, mi, ni](const Vector& z) {
    const auto [u, v] = split(z);
    const SurfaceJet j = surface.jet(u);
    const Vector diff = j.x - v;
    Matrix h = Matrix::Zero(mi + ni, mi + ni);
    for (Eigen::Index a = 0; a < mi; ++a) {
      for (Eigen::Index b = 0; b < mi; ++b) {
        h(a, b) = 2.0 * (j.d2[static_cast<std::size_t>(a * mi + b)].dot(diff) + j.d1.col(a).dot(j.d1.col(b)));
      }
    }
    h.block(0, mi, mi, ni) = -2.0 * j.d1.transpose();
    h.block(mi, 0, ni, mi) = -2.0 * j.d1;
    h.block(mi, mi, ni, ni) = 2.0 * Matrix::Identity(ni, ni);
    return h;
  };

  Box box;
  for (std::size_t i = 0; i < m; ++i) {
    box.push_back(surface.u_periods()[i] > 0.0 ? Interval{} : surface.u_domain()[i]);
  }
  box.insert(box.end(), v_box.begin(), v_box.end());
  ScalarField field(m + n, value, box, gradient, hess, "distance-squared " + surface.kind());
  GeneratingFamily fam = GeneratingFamily(m, n, std::move(field), box, std::nullopt,
                                          "distance-squared " + surface.kind())
                             .with_periods(surface.u_periods());
  GraphLikeFamily extended{fam, Interval{std::numeric_limits<double>::min(),
                                         std::numeric_limits<double>::infinity()}};
  return {fam, extended};
}

std::vector<Vector> parallel_seeds(const ParametricHypersurface& surface, double r,
                                   const std::vector<Vector>& u_values) {
  std::vector<Vector> out;
  for (const auto& u : u_values) {
    out.push_back(GeneratingFamily::join(u, surface.point(u) + r * surface.normal(u)));
  }
  return out;
}

std::vector<Vector> focal_seeds(const ParametricHypersurface& surface,
                                const std::vector<Vector>& u_values, std::size_t branch) {
  const PointSet focal = evolute(surface, u_values, branch);
  std::vector<Vector> out;
  for (std::size_t i = 0; i < focal.points.size(); ++i) {
    out.push_back(GeneratingFamily::join(focal.u[i], focal.points[i]));
  }
  return out;
}

FrontResult distance_front(const ParametricHypersurface& surface, const DistanceFamilies& fams,
                           double r, const std::vector<Vector>& u_values,
                           const TraceOptions& options) {
  if (r == 0.0) throw DomainError("parallel offset r must be non-zero");
  std::vector<Vector> seeds = parallel_seeds(surface, std::abs(r), u_values);
  const std::vector<Vector> inner = parallel_seeds(surface, -std::abs(r), u_values);
  seeds.insert(seeds.end(), inner.begin(), inner.end());
  FrontResult out = momentary_front(fams.extended, r * r, seeds, options);
  for (auto& curve : out.curves) {
    if (curve.points.empty()) continue;
    const auto& p = curve.points.front();
    const double side = (p.x - surface.point(p.q)).dot(surface.normal(p.q));
    curve.branch = side > 0.0 ? "outer" : "inner";
  }
  return out;
}

TangencyReport tangent_sphere_check(const ParametricHypersurface& surface, const Vector& v,
                                    double r, const std::vector<Vector>& u_grid) {
  if (!(r > 0.0)) throw DomainError("sphere radius must be positive");
  const DistanceFamilies fams = distance_squared_family(surface, Box(surface.ambient(), Interval{}));
  const GeneratingFamily& fam = fams.family;
  std::vector<std::size_t> frozen;
  for (std::size_t i = fam.k(); i < fam.dim(); ++i) frozen.push_back(i);

  TangencyReport out;
  for (const auto& u0 : u_grid) {
    Vector sol;
    try {
      sol = newton_solve(fam.delta(), GeneratingFamily::join(u0, v), frozen);
    } catch (const Error&) {
      continue;
    }
    const Vector u = fam.canonical_q(fam.q_of(sol));
    if (!box_contains(surface.u_domain(), u)) continue;
    if (std::abs(fam.field()(sol) - r * r) > 1e-8 * std::max(1.0, r * r)) continue;
    bool duplicate = false;
    for (const auto& p : out.tangency_points) duplicate = duplicate || fam.q_distance(p, u) < 1e-6;
    if (!duplicate) out.tangency_points.push_back(u);
  }
  for (std::size_t i = 0; i < out.tangency_points.size() && !out.multiple; ++i) {
    for (std::size_t j = i + 1; j < out.tangency_points.size(); ++j) {
      if (fam.q_distance(out.tangency_points[i], out.tangency_points[j]) > 1e-3) out.multiple = true;
    }
  }
  return out;
}

}  // namespace lagfront
