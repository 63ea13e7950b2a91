#include "lagfront/odegallery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lagfront/continuation.hpp"
#include "lagfront/errors.hpp"
#include "lagfront/newton.hpp"

namespace lagfront {

namespace {

struct GermText {
  const char* mu;
  const char* g1;
  const char* g2;
  DiagramKind kind;
  bool has_modulus;
};

const GermText kGerms[] = {
    {"u2", "u1", "u2", DiagramKind::kTrivial, false},
    {"2/3*u1^3 + u2", "u1^2", "u2", DiagramKind::kRegular, false},
    {"u2 - 1/2*u1", "u1", "u2^2", DiagramKind::kClairaut, false},
    {"3/4*u1^4 + 1/2*u1^2*u2 + u2", "u1^3 + u2*u1", "u2", DiagramKind::kRegular, true},
    {"u2", "u1", "u2^3 + u1*u2", DiagramKind::kClairaut, true},
    {"-3*u2^2 + 4*u1*u2 + u1", "u1", "u2^3 + u1*u2^2", DiagramKind::kMixed, true},
};

PolyExpr substitute(const PolyExpr& e, const std::array<PolyExpr, 2>& subs) {
  switch (e.kind()) {
    case PolyExpr::Kind::kConstant:
      return e;
    case PolyExpr::Kind::kVariable:
      return subs.at(e.variable_index());
    case PolyExpr::Kind::kSum: {
      std::vector<PolyExpr> terms;
      for (const auto& c : e.children()) terms.push_back(substitute(c, subs));
      return PolyExpr::sum(std::move(terms), {e.signs().begin(), e.signs().end()});
    }
    case PolyExpr::Kind::kProduct: {
      std::vector<PolyExpr> factors;
      for (const auto& c : e.children()) factors.push_back(substitute(c, subs));
      return PolyExpr::product(std::move(factors));
    }
    case PolyExpr::Kind::kPower:
      return PolyExpr::power(substitute(e.children()[0], subs), e.exponent());
    case PolyExpr::Kind::kNegate:
      return PolyExpr::negate(substitute(e.children()[0], subs));
  }
  return e;
}

// Fields derived from Dg: its determinant and the minors det[grad mu; grad g_i].
struct FoldFields {
  ScalarField det;
  std::array<ScalarField, 2> minor;
};

FoldFields fold_fields(const IntegralDiagram& d) {
  const Polynomial& g1 = d.g_poly[0];
  const Polynomial& g2 = d.g_poly[1];
  const Polynomial det = g1.derivative(0) * g2.derivative(1) - g1.derivative(1) * g2.derivative(0);
  const Polynomial m1 = d.mu_poly.derivative(0) * g1.derivative(1) - d.mu_poly.derivative(1) * g1.derivative(0);
  const Polynomial m2 = d.mu_poly.derivative(0) * g2.derivative(1) - d.mu_poly.derivative(1) * g2.derivative(0);
  return {ScalarField::from_polynomial(det), {ScalarField::from_polynomial(m1), ScalarField::from_polynomial(m2)}};
}

Vector point2(double a, double b) {
  Vector p(2);
  p << a, b;
  return p;
}

// Zeros of f along the grid lines of the box, by sign changes and bisection.
std::vector<Vector> line_seeds(const ScalarField& f, const Box& box, std::size_t lines) {
  const std::size_t samples = std::max<std::size_t>(8 * lines, 64);
  std::vector<Vector> out;
  for (int axis = 0; axis < 2; ++axis) {
    const int other = 1 - axis;
    const GridAxis across{box[other].lo, box[other].hi, lines};
    const GridAxis along{box[axis].lo, box[axis].hi, samples};
    for (std::size_t i = 0; i < lines; ++i) {
      auto at = [&](double s) {
        Vector p(2);
        p(axis) = s;
        p(other) = across.at(i);
        return p;
      };
      double prev_s = along.at(0);
      double prev_v = f(at(prev_s));
      if (prev_v == 0.0) out.push_back(at(prev_s));
      for (std::size_t j = 1; j < samples; ++j) {
        const double s = along.at(j);
        const double v = f(at(s));
        if (v == 0.0) {
          out.push_back(at(s));
        } else if (prev_v != 0.0 && (v > 0.0) != (prev_v > 0.0)) {
          double lo = prev_s, hi = s, vlo = prev_v;
          for (int iter = 0; iter < 80 && hi - lo > 1e-15; ++iter) {
            const double mid = 0.5 * (lo + hi);
            const double vm = f(at(mid));
            if (vm == 0.0) {
              lo = hi = mid;
              break;
            }
            if ((vm > 0.0) == (vlo > 0.0)) {
              lo = mid;
              vlo = vm;
            } else {
              hi = mid;
            }
          }
          out.push_back(at(0.5 * (lo + hi)));
        }
        prev_s = s;
        prev_v = v;
      }
    }
  }
  return out;
}

std::vector<CurveChain> trace_level_set(const ScalarField& f, const GalleryOptions& o) {
  ContinuationOptions copts;
  copts.step = o.step;
  copts.max_points = o.max_points;
  copts.box = o.u_box;
  copts.both_directions = true;
  std::vector<CurveChain> chains;
  std::vector<Polyline> traced;
  for (const auto& seed : line_seeds(f, o.u_box, o.lines_per_axis)) {
    if (distance_to_polylines(seed, traced) < o.step) continue;
    try {
      CurveChain chain = continue_curve({f}, seed, copts);
      // A chain seeded near the end of an earlier one retraces it.
      const bool repeat = std::all_of(chain.points.begin(), chain.points.end(), [&](const Vector& p) {
        return distance_to_polylines(p, traced) < 2.0 * o.step;
      });
      if (repeat) continue;
      traced.push_back(chain.points);
      chains.push_back(std::move(chain));
    } catch (const Error&) {
      // Seeds at singular points of the level set are covered by neighbours.
    }
  }
  return chains;
}

bool in_range(const Interval& r, double t) { return t >= r.lo && t <= r.hi; }

// Appends u to the open chain at the back of `chains`, starting a new one
// when `fresh` is set.
void extend(std::vector<GalleryChain>& chains, bool& fresh, const IntegralDiagram& d, const Vector& u) {
  if (fresh) chains.emplace_back();
  chains.back().u.push_back(u);
  chains.back().curve.push_back(d.map(u));
  fresh = false;
}

std::size_t segment_count(const GalleryChain& c) {
  return c.closed ? c.u.size() : c.u.size() - 1;
}

// u at parameter s of segment k of a chain.
Vector segment_u(const GalleryChain& c, std::size_t k, double s) {
  const Vector& a = c.u[k];
  const Vector& b = c.u[(k + 1) % c.u.size()];
  return a + s * (b - a);
}

double segment_parameter(const Polyline& line, std::size_t k, const Vector& p) {
  const Vector& a = line[k];
  const Vector& b = line[(k + 1) % line.size()];
  const double len2 = (b - a).squaredNorm();
  return len2 > 0.0 ? std::clamp((p - a).dot(b - a) / len2, 0.0, 1.0) : 0.0;
}

ScalarField pair_difference(const ScalarField& f) {
  return ScalarField(
      4, [f](const Vector& p) { return f(p.head(2)) - f(p.tail(2)); }, {},
      [f](const Vector& p) {
        Vector g(4);
        g << grad(f, p.head(2)), -grad(f, p.tail(2));
        return g;
      });
}

Interval sampled_mu_range(const IntegralDiagram& d, const Box& box) {
  Interval r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& p : grid_points({{box[0].lo, box[0].hi, 41}, {box[1].lo, box[1].hi, 41}})) {
    const double v = d.mu(p);
    r.lo = std::min(r.lo, v);
    r.hi = std::max(r.hi, v);
  }
  return r;
}

std::vector<GalleryChain> maxwell_strata(const IntegralDiagram& d, Interval t_range, const GalleryOptions& o) {
  const FieldSystem pair = {pair_difference(d.g[0]), pair_difference(d.g[1]), pair_difference(d.mu)};
  const Box box4 = {o.u_box[0], o.u_box[1], o.u_box[0], o.u_box[1]};
  auto admissible = [&](const Vector& p) {
    return (p.head(2) - p.tail(2)).norm() >= 1e-3 && box_contains(box4, p) && in_range(t_range, d.mu(p.head(2)));
  };
  ContinuationOptions copts;
  copts.step = o.step;
  copts.max_points = o.max_points;
  copts.box = box4;
  copts.both_directions = true;
  copts.inside = admissible;

  Interval levels = t_range;
  const Interval sampled = sampled_mu_range(d, o.u_box);
  levels.lo = std::max(levels.lo, sampled.lo);
  levels.hi = std::min(levels.hi, sampled.hi);
  if (!(levels.hi >= levels.lo)) return {};

  std::vector<Polyline> traced;  // in (u, u')
  std::vector<GalleryChain> out;
  auto try_seed = [&](const Vector& guess) {
    Vector swapped(4);
    swapped << guess.tail(2), guess.head(2);
    if (distance_to_polylines(guess, traced) < 2.0 * o.step ||
        distance_to_polylines(swapped, traced) < 2.0 * o.step) {
      return;
    }
    try {
      const Vector seed = newton_solve(pair, guess);
      if (!admissible(seed)) return;
      const CurveChain chain = continue_curve(pair, seed, copts);
      traced.push_back(chain.points);
      GalleryChain image;
      for (const auto& p : chain.points) {
        image.u.push_back(p.head(2));
        image.curve.push_back(d.map(p.head(2)));
      }
      out.push_back(std::move(image));
    } catch (const Error&) {
    }
  };

  for (double t : linspace(levels.lo, levels.hi, o.maxwell_levels)) {
    const GalleryFront front = gallery_front(d, t, o);
    const auto& chains = front.chains;
    for (std::size_t a = 0; a < chains.size(); ++a) {
      for (std::size_t b = a; b < chains.size(); ++b) {
        const auto crossings = a == b ? self_intersections(chains[a].curve, chains[a].closed)
                                      : mutual_intersections(chains[a].curve, chains[b].curve);
        for (const auto& c : crossings) {
          Vector guess(4);
          guess << segment_u(chains[a], c.segment_a, segment_parameter(chains[a].curve, c.segment_a, c.point)),
              segment_u(chains[b], c.segment_b, segment_parameter(chains[b].curve, c.segment_b, c.point));
          try_seed(guess);
        }
      }
    }
  }
  return out;
}

}  // namespace

std::string kind_name(DiagramKind kind) {
  switch (kind) {
    case DiagramKind::kTrivial:
      return "trivial";
    case DiagramKind::kRegular:
      return "regular";
    case DiagramKind::kClairaut:
      return "clairaut";
    case DiagramKind::kMixed:
      return "mixed fold";
  }
  return "unknown";
}

VariableSet IntegralDiagram::u_variables() { return VariableSet::indexed("u", 2); }
VariableSet IntegralDiagram::v_variables() { return VariableSet::indexed("v", 2); }

Vector IntegralDiagram::grad_mu(const Vector& u) const { return grad(mu, u); }

Vector IntegralDiagram::map(const Vector& u) const { return point2(g[0](u), g[1](u)); }

Matrix IntegralDiagram::jacobian(const Vector& u) const {
  Matrix j(2, 2);
  j.row(0) = grad(g[0], u).transpose();
  j.row(1) = grad(g[1], u).transpose();
  return j;
}

IntegralDiagram gallery_family(int id) { return gallery_family(id, PolyExpr::constant(0)); }

IntegralDiagram gallery_family(int id, std::string_view alpha) {
  if (alpha.empty()) return gallery_family(id);
  return gallery_family(id, parse_expression(alpha, IntegralDiagram::v_variables()));
}

IntegralDiagram gallery_family(int id, const PolyExpr& alpha) {
  if (id < 1 || id > 6) throw UnknownGerm("no normal form with id " + std::to_string(id));
  const GermText& text = kGerms[id - 1];
  const VariableSet u = IntegralDiagram::u_variables();
  const bool has_alpha = !Polynomial::from_expression(alpha, 2).is_zero();
  if (has_alpha && !text.has_modulus) {
    throw DomainError("germ " + std::to_string(id) + " has no functional modulus");
  }

  IntegralDiagram d;
  d.id = id;
  d.kind = text.kind;
  d.alpha = alpha;
  d.g_expr = {parse_expression(text.g1, u), parse_expression(text.g2, u)};
  d.mu_expr = parse_expression(text.mu, u);
  if (has_alpha) d.mu_expr = PolyExpr::sum({d.mu_expr, substitute(alpha, d.g_expr)}, {1, 1});
  d.mu_poly = Polynomial::from_expression(d.mu_expr, 2);
  d.g_poly = {Polynomial::from_expression(d.g_expr[0], 2), Polynomial::from_expression(d.g_expr[1], 2)};
  d.mu = ScalarField::from_polynomial(d.mu_poly, {}, "mu");
  d.g = {ScalarField::from_polynomial(d.g_poly[0], {}, "g1"),
         ScalarField::from_polynomial(d.g_poly[1], {}, "g2")};
  return d;
}

std::vector<Polyline> polylines(const std::vector<GalleryChain>& chains) {
  std::vector<Polyline> out;
  for (const auto& c : chains) {
    Polyline line = c.curve;
    if (c.closed && !line.empty()) line.push_back(line.front());
    out.push_back(std::move(line));
  }
  return out;
}

std::vector<Polyline> GalleryFront::polylines() const { return lagfront::polylines(chains); }

std::size_t GalleryFront::point_count() const {
  std::size_t n = 0;
  for (const auto& c : chains) n += c.u.size();
  return n;
}

GalleryFront gallery_front(const IntegralDiagram& diagram, double t, const GalleryOptions& options) {
  if (options.u_box.size() != 2) throw DomainError("the u box must be two-dimensional");
  const ScalarField& level = diagram.mu;
  const ScalarField shifted(
      2, [level, t](const Vector& u) { return level(u) - t; }, {},
      [level](const Vector& u) { return grad(level, u); });
  GalleryFront front;
  front.t = t;
  for (auto& chain : trace_level_set(shifted, options)) {
    GalleryChain c;
    c.closed = chain.closed;
    for (auto& p : chain.points) {
      c.curve.push_back(diagram.map(p));
      c.u.push_back(std::move(p));
    }
    front.chains.push_back(std::move(c));
  }
  return front;
}

std::vector<Vector> gallery_cusps(const IntegralDiagram& diagram, const GalleryFront& front) {
  const FoldFields fold = fold_fields(diagram);
  const double t = front.t;
  const ScalarField level(
      2, [&diagram, t](const Vector& u) { return diagram.mu(u) - t; }, {},
      [&diagram](const Vector& u) { return diagram.grad_mu(u); });
  const FieldSystem system = {level, fold.det};
  std::vector<Vector> out;
  for (const auto& chain : front.chains) {
    if (chain.u.size() < 2) continue;
    for (std::size_t k = 0; k < segment_count(chain); ++k) {
      const Vector& a = chain.u[k];
      const Vector& b = chain.u[(k + 1) % chain.u.size()];
      const double da = fold.det(a), db = fold.det(b);
      if (da == 0.0 || db == 0.0 || (da > 0.0) == (db > 0.0)) continue;
      Vector u = a + (da / (da - db)) * (b - a);
      try {
        u = newton_solve(system, u);
      } catch (const Error&) {
      }
      const Vector gm = diagram.grad_mu(u);
      const Vector tau = point2(-gm(1), gm(0)).normalized();
      const Matrix dg = diagram.jacobian(u);
      if ((dg * tau).norm() < 1e-6 * std::max(1.0, dg.norm())) out.push_back(diagram.map(u));
    }
  }
  return out;
}

GalleryDiscriminant gallery_discriminant(const IntegralDiagram& diagram, Interval t_range,
                                         const GalleryOptions& options) {
  GalleryDiscriminant out;
  const FoldFields fold = fold_fields(diagram);
  std::vector<Vector> isolated;
  const double tangent_tol = options.tangency_tolerance;

  for (const auto& chain : trace_level_set(fold.det, options)) {
    const auto& pts = chain.points;
    std::vector<double> c(pts.size());
    Vector prev_v;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      Eigen::JacobiSVD<Matrix> svd(diagram.jacobian(pts[i]), Eigen::ComputeFullV);
      Vector v = svd.matrixV().col(1);
      if (i > 0 && v.dot(prev_v) < 0.0) v = -v;
      prev_v = v;
      const Vector gm = diagram.grad_mu(pts[i]);
      c[i] = gm.dot(v) / std::max(gm.norm(), std::numeric_limits<double>::min());
    }

    bool fresh_caustic = true, fresh_delta = true;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const bool keep = in_range(t_range, diagram.mu(pts[i]));
      const bool tangent = std::abs(c[i]) < tangent_tol;
      if (keep && tangent) {
        extend(out.caustic, fresh_caustic, diagram, pts[i]);
      } else {
        fresh_caustic = true;
      }
      if (keep && !tangent) {
        extend(out.delta, fresh_delta, diagram, pts[i]);
      } else {
        fresh_delta = true;
      }
      // Isolated tangency between two transverse samples.
      if (i + 1 < pts.size() && std::abs(c[i]) >= tangent_tol && std::abs(c[i + 1]) >= tangent_tol &&
          (c[i] > 0.0) != (c[i + 1] > 0.0)) {
        Vector u = pts[i] + (c[i] / (c[i] - c[i + 1])) * (pts[i + 1] - pts[i]);
        const Matrix dg = diagram.jacobian(u);
        const std::size_t row = dg.row(0).norm() >= dg.row(1).norm() ? 0 : 1;
        try {
          u = newton_solve({fold.det, fold.minor[row]}, u);
        } catch (const Error&) {
          // Singular points of the fold locus: keep the interpolated point.
        }
        if (in_range(t_range, diagram.mu(u))) isolated.push_back(u);
      }
    }
  }
  for (const auto& u : isolated) out.caustic.push_back({{u}, {diagram.map(u)}, false});
  // Single points already covered by another caustic piece are dropped.
  std::vector<GalleryChain> caustic;
  for (auto& chain : out.caustic) {
    if (chain.curve.size() == 1 && distance_to_polylines(chain.curve[0], polylines(caustic)) < 1e-6) continue;
    caustic.push_back(std::move(chain));
  }
  out.caustic = std::move(caustic);

  if (diagram.kind != DiagramKind::kMixed) out.maxwell = maxwell_strata(diagram, t_range, options);
  return out;
}

double power_law_exponent(const std::vector<Vector>& points, std::size_t independent,
                          std::size_t dependent, double floor) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (const auto& p : points) {
    const double a = std::abs(p(static_cast<Eigen::Index>(independent)));
    const double b = std::abs(p(static_cast<Eigen::Index>(dependent)));
    if (a <= floor || b <= floor) continue;
    const double x = std::log(a), y = std::log(b);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  const double denom = static_cast<double>(n) * sxx - sx * sx;
  if (n < 2 || denom == 0.0) throw DomainError("not enough points for a power-law fit");
  return (static_cast<double>(n) * sxy - sx * sy) / denom;
}

}  // namespace lagfront
