#include "lagfront/fronts.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "lagfront/errors.hpp"
#include "lagfront/newton.hpp"

namespace lagfront {

namespace {

constexpr double kDedupRadius = 1e-6;
constexpr double kPairSeparation = 1e-3;

// Difference of (q, x) points with periodic q coordinates wrapped.
Vector qx_difference(const GeneratingFamily& fam, const Vector& a, const Vector& b) {
  Vector d = a - b;
  const auto k = static_cast<Eigen::Index>(fam.k());
  d.head(k) = fam.canonical_q(d.head(k));
  return d;
}

std::optional<Vector> project(const FieldSystem& system, const Vector& seed) {
  try {
    return newton_solve(system, seed);
  } catch (const Error&) {
    return std::nullopt;
  }
}

bool covered(const GeneratingFamily& fam, const std::vector<std::vector<Vector>>& chains,
             const Vector& p, double radius) {
  for (const auto& chain : chains) {
    for (const auto& c : chain) {
      if (qx_difference(fam, c, p).norm() < radius) return true;
    }
  }
  return false;
}

ContinuationOptions continuation_options(const GeneratingFamily& fam, const TraceOptions& trace) {
  ContinuationOptions opts;
  opts.step = trace.step;
  opts.max_points = trace.max_points;
  opts.both_directions = true;
  opts.rank_epsilon = trace.rank_epsilon;
  opts.periods = fam.qx_periods();
  // Periodic coordinates are left unbounded while tracing.
  if (!fam.box().empty()) {
    opts.box = fam.box();
    for (std::size_t i = 0; i < fam.q_periods().size(); ++i) {
      if (fam.q_periods()[i] > 0.0) opts.box[i] = Interval{};
    }
  }
  return opts;
}

struct RawChain {
  std::vector<Vector> points;
  bool closed = false;
};

// Joins open chains whose ends meet within `radius`.
void merge_chains(const GeneratingFamily& fam, std::vector<RawChain>& chains, double radius) {
  bool merged = true;
  while (merged) {
    merged = false;
    for (std::size_t i = 0; i < chains.size() && !merged; ++i) {
      if (chains[i].closed || chains[i].points.empty()) continue;
      for (std::size_t j = i + 1; j < chains.size() && !merged; ++j) {
        if (chains[j].closed || chains[j].points.empty()) continue;
        auto& a = chains[i].points;
        auto b = chains[j].points;
        auto near = [&](const Vector& u, const Vector& v) {
          return qx_difference(fam, u, v).norm() < radius;
        };
        if (near(a.back(), b.front())) {
        } else if (near(a.back(), b.back())) {
          std::reverse(b.begin(), b.end());
        } else if (near(a.front(), b.back())) {
          std::swap(a, b);
        } else if (near(a.front(), b.front())) {
          std::reverse(a.begin(), a.end());
        } else {
          continue;
        }
        a.insert(a.end(), b.begin(), b.end());
        chains.erase(chains.begin() + static_cast<std::ptrdiff_t>(j));
        merged = true;
      }
    }
  }
}

std::vector<RawChain> trace_all(const GeneratingFamily& fam, const FieldSystem& system,
                                const std::vector<Vector>& seeds, const TraceOptions& trace,
                                std::size_t& rejected, std::vector<std::string>* errors) {
  const ContinuationOptions opts = continuation_options(fam, trace);
  std::vector<RawChain> chains;
  std::vector<std::vector<Vector>> seen;
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    const std::optional<Vector> p = project(system, seeds[s]);
    if (!p || !box_contains(opts.box, *p)) {
      ++rejected;
      if (errors) errors->push_back("seed " + std::to_string(s) + ": SeedNotOnCurve");
      continue;
    }
    if (covered(fam, seen, *p, trace.step)) continue;
    try {
      CurveChain chain = continue_curve(system, *p, opts);
      seen.push_back(chain.points);
      chains.push_back({std::move(chain.points), chain.closed});
    } catch (const Error& e) {
      ++rejected;
      if (errors) errors->push_back("seed " + std::to_string(s) + ": " + e.name());
    }
  }
  merge_chains(fam, chains, 1.5 * trace.step);
  return chains;
}

TracedChain to_traced(const GeneratingFamily& fam, const RawChain& raw) {
  TracedChain out;
  out.closed = raw.closed;
  out.points.reserve(raw.points.size());
  for (const auto& p : raw.points) out.points.push_back({fam.x_of(p), fam.canonical_q(fam.q_of(p))});
  return out;
}

Polynomial determinant(const std::vector<std::vector<Polynomial>>& m) {
  const std::size_t k = m.size();
  if (k == 1) return m[0][0];
  Polynomial total(m[0][0].num_vars());
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<std::vector<Polynomial>> minor;
    for (std::size_t r = 1; r < k; ++r) {
      std::vector<Polynomial> row;
      for (std::size_t cc = 0; cc < k; ++cc) {
        if (cc != c) row.push_back(m[r][cc]);
      }
      minor.push_back(std::move(row));
    }
    const Polynomial term = m[0][c] * determinant(minor);
    total = (c % 2 == 0) ? total + term : total - term;
  }
  return total;
}

// Layout of the pairing unknowns z = (q, q', x).
struct PairLayout {
  Eigen::Index k;
  Eigen::Index n;

  Vector side(const Vector& z, int s) const {
    Vector qx(k + n);
    qx << z.segment(s * k, k), z.tail(n);
    return qx;
  }
  Vector scatter(const Vector& g, int s) const {
    Vector out = Vector::Zero(2 * k + n);
    out.segment(s * k, k) = g.head(k);
    out.tail(n) = g.tail(n);
    return out;
  }
};

// Field on z evaluating dF/dq_i (component >= 0) or F (component < 0) on one side.
ScalarField side_field(const GeneratingFamily& fam, int component, int side, double shift) {
  const PairLayout lay{static_cast<Eigen::Index>(fam.k()), static_cast<Eigen::Index>(fam.n())};
  const ScalarField f = fam.field();
  const FieldSystem delta = fam.delta();
  auto value = [=](const Vector& z) {
    const Vector qx = lay.side(z, side);
    return component < 0 ? f(qx) - shift : delta[static_cast<std::size_t>(component)](qx);
  };
  auto gradient = [=](const Vector& z) {
    const Vector qx = lay.side(z, side);
    const Vector g = component < 0 ? grad(f, qx) : Vector(hessian(f, qx).row(component).transpose());
    return lay.scatter(g, side);
  };
  return ScalarField(fam.dim() + fam.k(), value, {}, gradient);
}

ScalarField value_difference(const GeneratingFamily& fam) {
  const PairLayout lay{static_cast<Eigen::Index>(fam.k()), static_cast<Eigen::Index>(fam.n())};
  const ScalarField f = fam.field();
  auto value = [=](const Vector& z) { return f(lay.side(z, 0)) - f(lay.side(z, 1)); };
  auto gradient = [=](const Vector& z) {
    return Vector(lay.scatter(grad(f, lay.side(z, 0)), 0) - lay.scatter(grad(f, lay.side(z, 1)), 1));
  };
  return ScalarField(fam.dim() + fam.k(), value, {}, gradient);
}

FieldSystem pair_critical_equations(const GeneratingFamily& fam) {
  FieldSystem sys;
  for (int side = 0; side < 2; ++side) {
    for (std::size_t i = 0; i < fam.k(); ++i) {
      sys.push_back(side_field(fam, static_cast<int>(i), side, 0.0));
    }
  }
  return sys;
}

MaxwellPoint to_maxwell(const GeneratingFamily& fam, const Vector& z) {
  const auto k = static_cast<Eigen::Index>(fam.k());
  MaxwellPoint m;
  m.q = fam.canonical_q(z.head(k));
  m.q2 = fam.canonical_q(z.segment(k, k));
  m.x = z.tail(static_cast<Eigen::Index>(fam.n()));
  return m;
}

bool valid_pair(const GeneratingFamily& fam, const Vector& z) {
  const PairLayout lay{static_cast<Eigen::Index>(fam.k()), static_cast<Eigen::Index>(fam.n())};
  const Vector a = lay.side(z, 0);
  const Vector b = lay.side(z, 1);
  Vector ca = a, cb = b;
  ca.head(lay.k) = fam.canonical_q(a.head(lay.k));
  cb.head(lay.k) = fam.canonical_q(b.head(lay.k));
  return fam.q_distance(a.head(lay.k), b.head(lay.k)) >= kPairSeparation &&
         box_contains(fam.box(), ca) && box_contains(fam.box(), cb);
}

double maxwell_distance(const GeneratingFamily& fam, const MaxwellPoint& a, const MaxwellPoint& b) {
  const double dx = (a.x - b.x).norm();
  const double same = std::max(fam.q_distance(a.q, b.q), fam.q_distance(a.q2, b.q2));
  const double swapped = std::max(fam.q_distance(a.q, b.q2), fam.q_distance(a.q2, b.q));
  return std::max(dx, std::min(same, swapped));
}

}  // namespace

Polyline TracedChain::polyline() const {
  Polyline out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.x);
  return out;
}

std::vector<Polyline> ChainSet::polylines() const {
  std::vector<Polyline> out;
  for (const auto& c : chains) {
    Polyline line = c.polyline();
    if (c.closed && !line.empty()) line.push_back(line.front());
    out.push_back(std::move(line));
  }
  return out;
}

std::size_t ChainSet::point_count() const {
  std::size_t total = 0;
  for (const auto& c : chains) total += c.points.size();
  return total;
}

std::vector<Polyline> MaxwellResult::polylines() const {
  std::vector<Polyline> out;
  for (const auto& chain : chains) {
    Polyline line;
    for (const auto& p : chain) line.push_back(p.x);
    out.push_back(std::move(line));
  }
  return out;
}

std::vector<Vector> box_grid(const Box& box, std::size_t per_axis) {
  std::vector<GridAxis> axes;
  for (const auto& iv : box) {
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi)) {
      throw DomainError("seed grid needs a bounded box");
    }
    axes.push_back({iv.lo, iv.hi, per_axis});
  }
  return grid_points(axes);
}

FieldSystem level_system(const GeneratingFamily& fam, double t) {
  const ScalarField f = fam.field();
  FieldSystem sys{ScalarField(
      fam.dim(), [f, t](const Vector& z) { return f(z) - t; }, f.domain(),
      [f](const Vector& z) { return grad(f, z); }, [f](const Vector& z) { return hessian(f, z); })};
  for (const auto& d : fam.delta()) sys.push_back(d);
  return sys;
}

FrontResult momentary_front(const GraphLikeFamily& gl, double t, const std::vector<Vector>& seeds,
                            const TraceOptions& options) {
  const GeneratingFamily& fam = gl.base;
  if (!gl.t_range.contains(t)) {
    throw DomainError("t = " + std::to_string(t) + " is outside the admissible time range");
  }
  const FieldSystem system = level_system(fam, t);
  FrontResult out;

  if (fam.n() != 2) {
    FrontCurve cloud;
    cloud.t = t;
    cloud.branch = "cloud";
    std::vector<std::size_t> frozen;
    for (std::size_t i = fam.k(); i + 1 < fam.dim(); ++i) frozen.push_back(i);
    for (const auto& seed : seeds) {
      try {
        Vector p = newton_solve(system, seed, frozen);
        if (!box_contains(fam.box(), p)) throw SeedNotOnCurve("left the box");
        cloud.points.push_back({fam.x_of(p), fam.canonical_q(fam.q_of(p))});
      } catch (const Error& e) {
        ++out.rejected_seeds;
        out.errors.push_back(e.name());
      }
    }
    out.curves.push_back(std::move(cloud));
    return out;
  }

  const auto raw = trace_all(fam, system, seeds, options, out.rejected_seeds, &out.errors);
  for (const auto& chain : raw) {
    FrontCurve curve;
    static_cast<TracedChain&>(curve) = to_traced(fam, chain);
    curve.t = t;
    out.curves.push_back(std::move(curve));
  }
  return out;
}

FrontResult big_front(const GraphLikeFamily& gl, const Range& t_range,
                      const std::function<std::vector<Vector>(double)>& seeds,
                      const TraceOptions& options) {
  FrontResult out;
  for (double t : t_range.values()) {
    FrontResult level = momentary_front(gl, t, seeds(t), options);
    for (auto& c : level.curves) out.curves.push_back(std::move(c));
    out.rejected_seeds += level.rejected_seeds;
    for (auto& e : level.errors) out.errors.push_back("t=" + std::to_string(t) + " " + e);
  }
  return out;
}

std::vector<SourcedPoint> front_cusps(const GeneratingFamily& fam, const FrontCurve& curve,
                                      const TraceOptions& options) {
  std::vector<SourcedPoint> out;
  if (fam.n() != 2 || curve.points.size() < 4) return out;
  const FieldSystem system = level_system(fam, curve.t);
  const std::size_t count = curve.points.size();
  const std::size_t extra = curve.closed ? 4 : 0;

  std::vector<Vector> qx;
  Polyline xs;
  for (std::size_t i = 0; i < count + extra; ++i) {
    const auto& p = curve.points[i % count];
    Vector z = GeneratingFamily::join(p.q, p.x);
    if (!qx.empty()) z = qx.back() + qx_difference(fam, z, qx.back());
    qx.push_back(z);
    xs.push_back(p.x);
  }

  for (const auto& [lo, hi] : find_reversals(xs)) {
    const Vector a = qx[lo];
    const Vector b = qx[hi];
    const Vector dir = (xs[lo + 1] - xs[lo]).normalized();
    Vector found;
    try {
      auto on_curve = [&](double s) { return newton_solve(system, a + s * (b - a)); };
      auto velocity = [&](double s) -> Vector {
        Vector tau = curve_tangent(system, on_curve(s), options.rank_epsilon);
        if (tau.dot(b - a) < 0.0) tau = -tau;
        return fam.x_of(tau);
      };
      found = on_curve(refine_reversal(velocity, 0.0, 1.0, dir, 1e-10));
    } catch (const Error&) {
      // Fall back to the slowest vertex of the window.
      std::size_t best = lo + 1;
      double speed = std::numeric_limits<double>::infinity();
      for (std::size_t i = lo + 1; i < hi; ++i) {
        const double v = (xs[i + 1] - xs[i - 1]).norm();
        if (v < speed) {
          speed = v;
          best = i;
        }
      }
      found = qx[best];
    }
    SourcedPoint cusp{fam.x_of(found), fam.canonical_q(fam.q_of(found))};
    bool duplicate = false;
    for (const auto& c : out) duplicate = duplicate || (c.x - cusp.x).norm() < 1e-8;
    if (!duplicate) out.push_back(std::move(cusp));
  }
  return out;
}

FieldSystem caustic_system(const GeneratingFamily& fam) {
  FieldSystem sys = fam.delta();
  const ScalarField f = fam.field();
  const std::size_t k = fam.k();
  if (const Polynomial* p = f.polynomial()) {
    std::vector<std::vector<Polynomial>> h(k, std::vector<Polynomial>(k));
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) h[i][j] = p->derivative(i).derivative(j);
    }
    sys.push_back(ScalarField::from_polynomial(determinant(h), f.domain(), "det_qq"));
  } else {
    const auto kk = static_cast<Eigen::Index>(k);
    sys.push_back(ScalarField(
        fam.dim(), [f, kk](const Vector& z) { return hessian(f, z).topLeftCorner(kk, kk).determinant(); },
        f.domain(), {}, {}, "det_qq"));
  }
  return sys;
}

ChainSet caustic(const GeneratingFamily& fam, const std::vector<Vector>& seeds,
                 const TraceOptions& options) {
  if (fam.n() != 2) throw DomainError("caustic tracing needs n = 2; use caustic_points");
  ChainSet out;
  const auto raw = trace_all(fam, caustic_system(fam), seeds, options, out.rejected_seeds, nullptr);
  for (const auto& chain : raw) out.chains.push_back(to_traced(fam, chain));
  return out;
}

std::vector<SourcedPoint> caustic_points(const GeneratingFamily& fam,
                                         const std::vector<Vector>& seeds) {
  const FieldSystem system = caustic_system(fam);
  std::vector<SourcedPoint> out;
  for (const auto& seed : seeds) {
    std::optional<Vector> p = project(system, seed);
    if (!p) continue;
    const auto k = static_cast<Eigen::Index>(fam.k());
    p->head(k) = fam.canonical_q(p->head(k));
    if (!box_contains(fam.box(), *p)) continue;
    SourcedPoint sp{fam.x_of(*p), fam.q_of(*p)};
    bool duplicate = false;
    for (const auto& o : out) {
      if ((o.x - sp.x).norm() < kDedupRadius && fam.q_distance(o.q, sp.q) < kDedupRadius) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) out.push_back(std::move(sp));
  }
  return out;
}

MaxwellResult maxwell_set(const GeneratingFamily& fam, const std::vector<Vector>& x_grid,
                          const std::vector<Vector>& q_seeds, double cell_size,
                          const TraceOptions& options) {
  const auto k = static_cast<Eigen::Index>(fam.k());
  const auto n = static_cast<Eigen::Index>(fam.n());
  FieldSystem system = pair_critical_equations(fam);
  system.push_back(value_difference(fam));

  const CriticalSet critical = solve_critical_set(fam, x_grid, q_seeds);
  std::vector<Vector> candidates;
  for (std::size_t begin = 0; begin < critical.points.size();) {
    std::size_t end = begin + 1;
    while (end < critical.points.size() && critical.points[end].x == critical.points[begin].x) ++end;
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = i + 1; j < end; ++j) {
        const auto& a = critical.points[i];
        const auto& b = critical.points[j];
        if (fam.q_distance(a.q, b.q) < kPairSeparation) continue;
        const double d = fam.field()(a.qx()) - fam.field()(b.qx());
        const double slope = (grad(fam.field(), a.qx()) - grad(fam.field(), b.qx())).tail(n).norm();
        if (std::abs(d) <= cell_size * slope + 1e-12) {
          Vector z(2 * k + n);
          z << a.q, b.q, a.x;
          candidates.push_back(std::move(z));
        }
      }
    }
    begin = end;
  }

  MaxwellResult out;
  std::vector<Vector> refined;
  for (const auto& z0 : candidates) {
    std::optional<Vector> z = project(system, z0);
    if (!z || !valid_pair(fam, *z)) continue;
    const MaxwellPoint m = to_maxwell(fam, *z);
    bool duplicate = false;
    for (const auto& o : out.points) {
      if (maxwell_distance(fam, o, m) < kDedupRadius) {
        duplicate = true;
        break;
      }
    }
    if (duplicate) continue;
    out.points.push_back(m);
    refined.push_back(*z);
  }
  if (fam.n() != 2) return out;

  ContinuationOptions opts;
  opts.step = options.step;
  opts.max_points = options.max_points;
  opts.both_directions = true;
  opts.rank_epsilon = options.rank_epsilon;
  opts.inside = [&fam](const Vector& z) { return valid_pair(fam, z); };
  opts.periods.assign(static_cast<std::size_t>(2 * k + n), 0.0);
  for (std::size_t i = 0; i < fam.q_periods().size(); ++i) {
    opts.periods[i] = opts.periods[i + fam.k()] = fam.q_periods()[i];
  }
  for (const auto& z : refined) {
    const MaxwellPoint m = to_maxwell(fam, z);
    bool seen = false;
    for (const auto& chain : out.chains) {
      for (const auto& p : chain) {
        if (maxwell_distance(fam, p, m) < options.step) {
          seen = true;
          break;
        }
      }
      if (seen) break;
    }
    if (seen) continue;
    try {
      const CurveChain chain = continue_curve(system, z, opts);
      std::vector<MaxwellPoint> traced;
      for (const auto& p : chain.points) traced.push_back(to_maxwell(fam, p));
      out.chains.push_back(std::move(traced));
    } catch (const Error&) {
      continue;
    }
  }
  for (const auto& chain : out.chains) {
    for (const auto& p : chain) out.points.push_back(p);
  }
  return out;
}

std::vector<MaxwellPoint> front_self_intersections(const GeneratingFamily& fam,
                                                   const std::vector<FrontCurve>& curves) {
  std::vector<MaxwellPoint> out;
  if (fam.n() != 2 || curves.empty()) return out;
  const auto k = static_cast<Eigen::Index>(fam.k());
  const auto n = static_cast<Eigen::Index>(fam.n());
  FieldSystem system = pair_critical_equations(fam);
  system.push_back(side_field(fam, -1, 0, curves.front().t));
  system.push_back(side_field(fam, -1, 1, curves.front().t));

  auto interpolate_q = [&](const FrontCurve& curve, std::size_t seg, const Vector& x) {
    const std::size_t count = curve.points.size();
    const auto& a = curve.points[seg];
    const auto& b = curve.points[(seg + 1) % count];
    const double len2 = (b.x - a.x).squaredNorm();
    const double s = len2 > 0.0 ? std::clamp((x - a.x).dot(b.x - a.x) / len2, 0.0, 1.0) : 0.0;
    return Vector(a.q + s * fam.canonical_q(b.q - a.q));
  };
  auto refine = [&](const FrontCurve& ca, const FrontCurve& cb, const Crossing& c) {
    Vector z(2 * k + n);
    z << interpolate_q(ca, c.segment_a, c.point), interpolate_q(cb, c.segment_b, c.point), c.point;
    std::optional<Vector> solved = project(system, z);
    if (solved && valid_pair(fam, *solved)) out.push_back(to_maxwell(fam, *solved));
  };
  std::vector<Polyline> lines;
  for (const auto& curve : curves) lines.push_back(curve.polyline());
  for (std::size_t i = 0; i < curves.size(); ++i) {
    for (const auto& c : self_intersections(lines[i], curves[i].closed)) refine(curves[i], curves[i], c);
    for (std::size_t j = i + 1; j < curves.size(); ++j) {
      for (const auto& c : mutual_intersections(lines[i], lines[j])) refine(curves[i], curves[j], c);
    }
  }
  return out;
}

std::vector<Vector> delta_set(const GraphLikeFamily& gl, const std::vector<CriticalPoint>& samples,
                              double tolerance) {
  std::vector<Vector> out;
  for (const auto& cp : samples) {
    if (!gl.t_range.contains(gl.base.field()(cp.qx()))) continue;
    RankDiagnostics d;
    try {
      d = rank_diagnostics(gl, cp);
    } catch (const ChartFailure&) {
      continue;
    }
    if (d.front_sigma_min > tolerance && d.space_sigma_min < tolerance) out.push_back(cp.x);
  }
  return out;
}

DiscriminantDecomposition discriminant(const GraphLikeFamily& gl, const DiscriminantInput& input) {
  const GeneratingFamily& fam = gl.base;
  DiscriminantDecomposition out;
  std::vector<CriticalPoint> samples;
  if (fam.n() == 2) {
    out.caustic = caustic(fam, input.caustic_seeds, input.trace);
    for (const auto& chain : out.caustic.chains) {
      for (const auto& p : chain.points) samples.push_back(make_critical_point(fam, GeneratingFamily::join(p.q, p.x)));
    }
  } else {
    TracedChain cloud;
    cloud.points = caustic_points(fam, input.caustic_seeds);
    for (const auto& p : cloud.points) samples.push_back(make_critical_point(fam, GeneratingFamily::join(p.q, p.x)));
    out.caustic.chains.push_back(std::move(cloud));
  }
  out.maxwell = maxwell_set(fam, input.x_grid, input.q_seeds, input.cell_size, input.trace);
  for (auto& cp : solve_critical_set(fam, input.x_grid, input.q_seeds).points) {
    samples.push_back(std::move(cp));
  }
  out.delta = delta_set(gl, samples);
  if (!out.delta.empty()) {
    throw DeltaNonEmptyForGraphLike(std::to_string(out.delta.size()) +
                                    " points found where the front is smooth but its projection is singular");
  }
  return out;
}

}  // namespace lagfront
