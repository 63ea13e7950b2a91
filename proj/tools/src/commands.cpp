#include "lagfront_cli/commands.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "lagfront/errors.hpp"
#include "lagfront/fronts.hpp"
#include "lagfront/genfam.hpp"
#include "lagfront/geomapps.hpp"
#include "lagfront/odegallery.hpp"
#include "lagfront/pdechar.hpp"
#include "lagfront/versality.hpp"
#include "lagfront_cli/emit.hpp"
#include "lagfront_cli/scene.hpp"

namespace lagfront::cli {

namespace {

const double kInf = std::numeric_limits<double>::infinity();
const double kTwoPi = 2.0 * std::acos(-1.0);

struct Common {
  std::size_t seed_density = 0;
  double tol = 0.0;
  std::string csv;
  std::string svg;
  std::string viewport;
  std::string config;
};

struct Output {
  std::vector<CsvRow> rows;
  std::size_t n = 2;
  std::size_t k = 1;
  std::vector<SvgLayer> layers;
};

void add_common(CLI::App* sub, Common& c, std::size_t density, const std::string& density_help, double tol,
                const std::string& tol_help, bool files = true) {
  c.seed_density = density;
  c.tol = tol;
  sub->add_option("--seed-density", c.seed_density, density_help)->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--tol", c.tol, tol_help)->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--config", c.config, "key = value file supplying flag values; flags given on the command line win");
  if (files) {
    sub->add_option("--csv", c.csv, "write points as CSV");
    sub->add_option("--svg", c.svg, "write curves as SVG");
    sub->add_option("--viewport", c.viewport, "SVG window xmin,xmax,ymin,ymax (default: fit)");
  }
}

void check_outputs(const Common& c) {
  check_writable(c.csv);
  check_writable(c.svg);
  if (!c.viewport.empty()) parse_viewport(c.viewport);
}

void write_outputs(const Common& c, const Output& o) {
  if (!c.csv.empty()) emit_csv(c.csv, o.rows, o.n, o.k);
  if (!c.svg.empty()) {
    std::optional<Viewport> v;
    if (!c.viewport.empty()) v = parse_viewport(c.viewport);
    emit_svg(c.svg, o.layers, v);
  }
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

Box x_box(const GeneratingFamily& fam) {
  return Box(fam.box().begin() + static_cast<std::ptrdiff_t>(fam.k()), fam.box().end());
}

double grid_spacing(const Box& box, std::size_t per_axis) {
  double h = 0.0;
  for (const auto& i : box) h = std::max(h, (i.hi - i.lo) / static_cast<double>(std::max<std::size_t>(per_axis, 2) - 1));
  return h;
}

TraceOptions trace_options(const Common& c, double step) {
  TraceOptions o;
  o.step = step;
  o.rank_epsilon = c.tol;
  return o;
}

void require_plane(const Common& c, std::size_t n, const std::string& what) {
  if (!c.svg.empty() && n != 2) throw UsageError("--svg needs a planar " + what);
}

void add_chain(Output& o, std::vector<Polyline>& layer, const TracedChain& chain, double t_of_point,
               const GeneratingFamily* fam, const std::string& label) {
  for (const auto& p : chain.points) {
    const double t = fam ? fam->field()(GeneratingFamily::join(p.q, p.x)) : t_of_point;
    o.rows.push_back({t, p.x, p.q, label});
  }
  layer.push_back(chain.polyline());
}

// --- verify -------------------------------------------------------------

struct VerifyArgs {
  Common c;
  std::string family;
};

void cmd_verify(const VerifyArgs& a, std::ostream& out) {
  const FamilySpec spec = load_family(a.family);
  const GeneratingFamily& fam = spec.family;
  const CriticalSet cs = solve_critical_set(fam, box_grid(x_box(fam), a.c.seed_density), spec.q_seeds);
  const GraphLikeFamily gl{fam, {-kInf, kInf}};
  std::size_t morse = 0, graph_like = 0, hypersurface = 0, nondegenerate = 0;
  for (const auto& cp : cs.points) {
    const Vector qx = cp.qx();
    const double t = fam.field()(qx);
    if (morse_family_check(fam, qx, a.c.tol).pass) ++morse;
    // d/dt of F(q,x) - t by central difference.
    const double h = 1e-4;
    const double dfdt = ((fam.field()(qx) - (t + h)) - (fam.field()(qx) - (t - h))) / (2.0 * h);
    if (std::abs(dfdt) > a.c.tol) ++graph_like;
    const GeneratingFamily shifted(
        fam.k(), fam.n(),
        ScalarField(fam.dim(), [f = fam.field(), t](const Vector& z) { return f(z) - t; }, fam.box(),
                    [f = fam.field()](const Vector& z) { return grad(f, z); },
                    [f = fam.field()](const Vector& z) { return hessian(f, z); }),
        fam.box());
    if (morse_hypersurface_check(shifted, qx, a.c.tol).pass) ++hypersurface;
    Vector qxt(qx.size() + 1);
    qxt << qx, t;
    if (nondegeneracy_check(gl, qxt, a.c.tol)) ++nondegenerate;
  }
  const std::size_t total = cs.points.size();
  auto line = [&](const char* name, std::size_t passed) {
    out << name << ": " << (total > 0 && passed == total ? "PASS" : "FAIL") << " (" << passed << "/" << total << ")\n";
  };
  out << "family: " << spec.expr << " (k=" << fam.k() << ", n=" << fam.n() << ")\n";
  out << "critical points: " << total << " (" << cs.failed_seeds << " seeds failed)\n";
  line("morse-family", morse);
  line("graph-like", graph_like);
  line("morse-hypersurface (t-shifted)", hypersurface);
  line("non-degeneracy", nondegenerate);
}

// --- fronts -------------------------------------------------------------

struct FamilyArgs {
  Common c;
  std::string family;
  double step = 0.02;
  double t = 0.0;
  std::string t_range;
};

void emit_fronts(Output& o, const FrontResult& r, std::vector<Polyline>& layer) {
  for (const auto& curve : r.curves) add_chain(o, layer, curve, curve.t, nullptr, "front");
}

void cmd_front(const FamilyArgs& a, std::ostream& out, Output& o) {
  const FamilySpec spec = load_family(a.family);
  const GeneratingFamily& fam = spec.family;
  require_plane(a.c, fam.n(), "front");
  const GraphLikeFamily gl{fam, {-kInf, kInf}};
  const TraceOptions opts = trace_options(a.c, a.step);
  const FrontResult r = momentary_front(gl, a.t, box_grid(fam.box(), a.c.seed_density), opts);
  o.n = fam.n();
  o.k = fam.k();
  SvgLayer fronts{"front", {}};
  emit_fronts(o, r, fronts.curves);
  SvgLayer cusps{"caustic", {}};
  std::size_t cusp_count = 0;
  if (fam.n() == 2) {
    for (const auto& curve : r.curves) {
      for (const auto& p : front_cusps(fam, curve, opts)) {
        cusps.curves.push_back({p.x});
        ++cusp_count;
      }
    }
  }
  o.layers = {fronts, cusps};
  out << "front t=" << format_number(a.t) << ": " << r.curves.size() << " curve(s), " << o.rows.size()
      << " point(s), " << cusp_count << " cusp(s), " << r.rejected_seeds << " rejected seed(s)\n";
}

void cmd_big_front(const FamilyArgs& a, std::ostream& out, Output& o) {
  const FamilySpec spec = load_family(a.family);
  const GeneratingFamily& fam = spec.family;
  require_plane(a.c, fam.n(), "front");
  const Range range = parse_range(a.t_range, "--t");
  const GraphLikeFamily gl{fam, {-kInf, kInf}};
  const std::vector<Vector> seeds = box_grid(fam.box(), a.c.seed_density);
  const FrontResult r = big_front(gl, range, [&](double) { return seeds; }, trace_options(a.c, a.step));
  o.n = fam.n();
  o.k = fam.k();
  SvgLayer fronts{"front", {}};
  emit_fronts(o, r, fronts.curves);
  o.layers = {fronts};
  out << "big front: " << range.values().size() << " level(s), " << r.curves.size() << " curve(s), " << o.rows.size()
      << " point(s)\n";
}

void cmd_caustic(const FamilyArgs& a, std::ostream& out, Output& o) {
  const FamilySpec spec = load_family(a.family);
  const GeneratingFamily& fam = spec.family;
  require_plane(a.c, fam.n(), "caustic");
  const std::vector<Vector> seeds = box_grid(fam.box(), a.c.seed_density);
  o.n = fam.n();
  o.k = fam.k();
  SvgLayer layer{"caustic", {}};
  if (fam.n() == 2) {
    const ChainSet cs = caustic(fam, seeds, trace_options(a.c, a.step));
    for (const auto& chain : cs.chains) add_chain(o, layer.curves, chain, 0.0, &fam, "caustic");
    out << "caustic: " << cs.chains.size() << " curve(s), " << cs.point_count() << " point(s)\n";
  } else {
    const auto pts = caustic_points(fam, seeds);
    for (const auto& p : pts) o.rows.push_back({fam.field()(GeneratingFamily::join(p.q, p.x)), p.x, p.q, "caustic"});
    out << "caustic: " << pts.size() << " point(s)\n";
  }
  o.layers = {layer};
}

void add_maxwell(Output& o, SvgLayer& layer, const GeneratingFamily& fam, const MaxwellResult& m) {
  for (const auto& p : m.points) o.rows.push_back({fam.field()(GeneratingFamily::join(p.q, p.x)), p.x, p.q, "maxwell"});
  for (const auto& line : m.polylines()) layer.curves.push_back(line);
}

void cmd_maxwell(const FamilyArgs& a, std::ostream& out, Output& o) {
  const FamilySpec spec = load_family(a.family);
  const GeneratingFamily& fam = spec.family;
  require_plane(a.c, fam.n(), "Maxwell set");
  const Box xb = x_box(fam);
  const MaxwellResult m = maxwell_set(fam, box_grid(xb, a.c.seed_density), spec.q_seeds,
                                      grid_spacing(xb, a.c.seed_density), trace_options(a.c, a.step));
  o.n = fam.n();
  o.k = fam.k();
  SvgLayer layer{"maxwell", {}};
  add_maxwell(o, layer, fam, m);
  o.layers = {layer};
  out << "maxwell: " << m.points.size() << " point(s), " << m.chains.size() << " curve(s)\n";
}

struct DiscriminantArgs {
  FamilyArgs f;
  std::size_t caustic_density = 7;
};

void cmd_discriminant(const DiscriminantArgs& a, std::ostream& out, Output& o) {
  const FamilySpec spec = load_family(a.f.family);
  const GeneratingFamily& fam = spec.family;
  require_plane(a.f.c, fam.n(), "discriminant");
  const Box xb = x_box(fam);
  DiscriminantInput in;
  in.caustic_seeds = box_grid(fam.box(), a.caustic_density);
  in.x_grid = box_grid(xb, a.f.c.seed_density);
  in.q_seeds = spec.q_seeds;
  in.cell_size = grid_spacing(xb, a.f.c.seed_density);
  in.trace = trace_options(a.f.c, a.f.step);
  const DiscriminantDecomposition d = discriminant(GraphLikeFamily{fam, {-kInf, kInf}}, in);
  o.n = fam.n();
  o.k = fam.k();
  SvgLayer caustic_layer{"caustic", {}}, maxwell_layer{"maxwell", {}};
  for (const auto& chain : d.caustic.chains) add_chain(o, caustic_layer.curves, chain, 0.0, &fam, "caustic");
  add_maxwell(o, maxwell_layer, fam, d.maxwell);
  o.layers = {caustic_layer, maxwell_layer};
  out << "caustic: " << d.caustic.point_count() << " point(s)\n"
      << "maxwell: " << d.maxwell.points.size() << " point(s)\n"
      << "delta: " << d.delta.size() << " point(s)\n";
}

// --- surfaces -----------------------------------------------------------

struct SurfaceArgs {
  Common c;
  std::string curve;
  std::string surface_file;
  std::optional<double> a, b, cc, radius;
  std::string r_range;
  bool no_evolute = false;
  bool density_given = false;
};

void add_surface_options(CLI::App* sub, SurfaceArgs& s) {
  sub->add_option("--curve", s.curve, "catalog kind: circle, ellipse, parabola, sphere, ellipsoid");
  sub->add_option("--surface", s.surface_file, "file with kind = ... and numeric parameters");
  sub->add_option("--a", s.a, "semi-axis a");
  sub->add_option("--b", s.b, "semi-axis b");
  sub->add_option("--c", s.cc, "semi-axis c, or the parabola coefficient");
  sub->add_option("--radius", s.radius, "circle or sphere radius");
}

ParametricHypersurface load_surface(const SurfaceArgs& s) {
  if (s.curve.empty() == s.surface_file.empty()) throw UsageError("give exactly one of --curve and --surface");
  if (!s.surface_file.empty()) return surface_from(KeyValueFile::load(s.surface_file));
  std::map<std::string, double> params;
  if (s.a) params["a"] = *s.a;
  if (s.b) params["b"] = *s.b;
  if (s.cc) params["c"] = *s.cc;
  if (s.radius) params["r"] = *s.radius;
  return surface_from(s.curve, params);
}

std::vector<Vector> u_grid(const ParametricHypersurface& surface, std::size_t per_axis) {
  std::vector<GridAxis> axes;
  for (std::size_t i = 0; i < surface.chart_dim(); ++i) {
    const Interval& d = surface.u_domain()[i];
    const bool periodic = i < surface.u_periods().size() && surface.u_periods()[i] > 0.0;
    // Periodic axes skip the duplicated endpoint.
    const double hi = periodic ? d.hi - (d.hi - d.lo) / static_cast<double>(per_axis) : d.hi;
    axes.push_back({d.lo, hi, per_axis});
  }
  return grid_points(axes);
}

bool periodic_curve(const ParametricHypersurface& s) {
  return s.ambient() == 2 && !s.u_periods().empty() && s.u_periods()[0] > 0.0;
}

// Evolute points (filtered to |kappa| >= min_kappa) as CSV rows and, for
// curves, one polyline per run of consecutive kept samples.
std::size_t add_evolute(Output& o, SvgLayer& layer, const ParametricHypersurface& surface,
                        const std::vector<Vector>& grid, double min_kappa) {
  std::size_t count = 0;
  for (std::size_t branch = 0; branch < surface.chart_dim(); ++branch) {
    const PointSet ev = evolute(surface, grid, branch);
    Polyline run;
    for (std::size_t i = 0; i < ev.points.size(); ++i) {
      const double kappa = curvature(surface, ev.u[i]).kappa[branch];
      if (std::abs(kappa) < min_kappa) continue;
      o.rows.push_back({1.0 / (kappa * kappa), ev.points[i], ev.u[i], "caustic"});
      ++count;
      run.push_back(ev.points[i]);
    }
    if (surface.ambient() == 2 && !run.empty()) {
      if (periodic_curve(surface)) run.push_back(run.front());
      layer.curves.push_back(std::move(run));
    }
  }
  return count;
}

void cmd_evolute(const SurfaceArgs& s, std::ostream& out, Output& o) {
  const ParametricHypersurface surface = load_surface(s);
  require_plane(s.c, surface.ambient(), "curve");
  o.n = surface.ambient();
  o.k = surface.chart_dim();
  SvgLayer layer{"caustic", {}};
  const std::size_t density = s.density_given || surface.chart_dim() == 1 ? s.c.seed_density : 61;
  const std::size_t count = add_evolute(o, layer, surface, u_grid(surface, density), s.c.tol);
  o.layers = {layer};
  out << "evolute of " << surface.kind() << ": " << count << " point(s)\n";
}

void cmd_parallels(const SurfaceArgs& s, std::ostream& out, Output& o) {
  const ParametricHypersurface surface = load_surface(s);
  require_plane(s.c, surface.ambient(), "curve");
  const std::vector<double> radii = parse_range(s.r_range, "--r").values();
  const std::size_t density = s.density_given || surface.chart_dim() == 1 ? s.c.seed_density : 61;
  const std::vector<Vector> grid = u_grid(surface, density);
  const std::vector<ParallelCurve> curves = parallels(surface, radii, grid);
  o.n = surface.ambient();
  o.k = surface.chart_dim();
  SvgLayer fronts{"front", {}}, evolute_layer{"caustic", {}};
  for (const auto& pc : curves) {
    for (std::size_t i = 0; i < pc.points.size(); ++i) o.rows.push_back({pc.r * pc.r, pc.points[i], pc.u[i], "front"});
    Polyline line = pc.points;
    if (periodic_curve(surface) && !line.empty()) line.push_back(line.front());
    fronts.curves.push_back(std::move(line));
  }
  if (!s.no_evolute) add_evolute(o, evolute_layer, surface, grid, 1e-9);
  out << "parallels of " << surface.kind() << ": " << curves.size() << " curve(s)\n";
  if (surface.ambient() == 2) {
    // Finer evolute polyline used as the reference for cusp distances.
    Output scratch;
    SvgLayer reference{"caustic", {}};
    add_evolute(scratch, reference, surface, u_grid(surface, std::max<std::size_t>(s.c.seed_density, 2000)), 1e-9);
    std::size_t cusps = 0, on_evolute = 0;
    double worst = 0.0;
    for (const auto& pc : curves) {
      for (const auto& p : parallel_cusps(surface, pc)) {
        const double d = distance_to_polylines(p, reference.curves);
        worst = std::max(worst, d);
        ++cusps;
        if (d <= s.c.tol) ++on_evolute;
      }
    }
    out << "cusps: " << cusps << ", on the evolute within " << format_number(s.c.tol) << ": " << on_evolute
        << " (max distance " << fmt("%.3g", worst) << ")\n";
  }
  o.layers = {fronts, evolute_layer};
}

// --- burgers ------------------------------------------------------------

struct BurgersArgs {
  Common c;
  std::string t_range = "0:1:0.001";
  double x0_lo = 0.0;
  double x0_hi = kTwoPi;
  std::string phi = "sin";
  bool report_breaking = false;
  std::string count_at;
  std::string surface_csv;
  std::size_t stride = 10;
  std::string snapshots = "0,0.25,0.5,0.75,1";
};

ScalarField initial_datum(const std::string& phi) {
  if (phi == "sin" || phi == "-sin" || phi == "cos") {
    const double sign = phi == "-sin" ? -1.0 : 1.0;
    const bool cosine = phi == "cos";
    return ScalarField(
        1, [=](const Vector& p) { return cosine ? std::cos(p(0)) : sign * std::sin(p(0)); }, {},
        [=](const Vector& p) { return Vector::Constant(1, cosine ? -std::sin(p(0)) : sign * std::cos(p(0))); });
  }
  return ScalarField::from_expression(parse_expression(phi, VariableSet::indexed("x", 1)), 1);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << text;
  if (!f.flush()) throw IoError("write to '" + path + "' failed");
}

void cmd_burgers(const BurgersArgs& a, std::ostream& out, Output& o) {
  check_writable(a.surface_csv);
  const Range range = parse_range(a.t_range, "--t");
  if (range.hi == range.lo) throw UsageError("--t: empty range");
  if (!(a.x0_hi > a.x0_lo)) throw UsageError("--x0-hi must exceed --x0-lo");
  if (a.stride == 0) throw UsageError("--stride must be positive");
  std::vector<Vector> grid;
  for (double x : linspace(a.x0_lo, a.x0_hi, a.c.seed_density)) grid.push_back(Vector::Constant(1, x));
  const QuasiLinearPDE pde = pde_catalog::burgers(initial_datum(a.phi));
  const GeometricSolutionSheet sheet = integrate_characteristics(pde, grid, {range.lo, range.hi}, range.step);
  out << "strips: " << sheet.strips.size() << ", steps: " << sheet.times.size() - 1 << ", dt = " << format_number(sheet.dt)
      << "\n";
  if (a.report_breaking) {
    const auto t_star = breaking_time(sheet, a.c.tol);
    out << (t_star ? "t* = " + fmt("%.4f", *t_star) : std::string("t* = none")) << "\n";
  }
  if (!a.count_at.empty()) {
    const std::vector<double> xt = parse_list(a.count_at, "--count-at");
    if (xt.size() != 2) throw UsageError("--count-at expects x,t");
    out << "branches at x=" << format_number(xt[0]) << ", t=" << format_number(xt[1]) << ": "
        << multivalued_count(sheet, xt[0], xt[1]) << "\n";
  }

  std::ostringstream csv, surface;
  csv << "x0,t,x,y,dxdx0\n";
  surface << "x,t,y\n";
  for (const auto& strip : sheet.strips) {
    for (std::size_t j = 0; j < strip.trajectory.size(); j += a.stride) {
      const StripSample& s = strip.trajectory[j];
      csv << format_number(strip.x0(0)) << ',' << format_number(s.t) << ',' << format_number(s.x(0)) << ','
          << format_number(s.y) << ',' << format_number(s.dx_dx0(0, 0)) << '\n';
      surface << format_number(s.x(0)) << ',' << format_number(s.t) << ',' << format_number(s.y) << '\n';
    }
  }
  if (!a.c.csv.empty()) write_text(a.c.csv, csv.str());
  if (!a.surface_csv.empty()) write_text(a.surface_csv, surface.str());

  SvgLayer snapshots{"front", {}};
  for (double t : parse_list(a.snapshots, "--snapshots")) {
    const std::size_t j = sheet.time_index(t);
    Polyline line;
    for (const auto& strip : sheet.strips) line.push_back((Vector(2) << strip.trajectory[j].x(0), strip.trajectory[j].y).finished());
    snapshots.curves.push_back(std::move(line));
  }
  o.layers = {snapshots};
}

// --- ode gallery --------------------------------------------------------

struct GalleryArgs {
  Common c;
  int germ = 0;
  std::string t_range = "-1:1:0.1";
  std::string alpha = "0";
  double step = 0.01;
  std::string u_box = "-2,2";
};

void add_gallery_chains(Output& o, SvgLayer& layer, const IntegralDiagram& d, const std::vector<GalleryChain>& chains,
                        const std::string& label, std::optional<double> t) {
  for (const auto& chain : chains) {
    for (std::size_t i = 0; i < chain.u.size(); ++i) {
      o.rows.push_back({t ? *t : d.mu(chain.u[i]), chain.curve[i], chain.u[i], label});
    }
    Polyline line = chain.curve;
    if (chain.closed && !line.empty()) line.push_back(line.front());
    layer.curves.push_back(std::move(line));
  }
}

void cmd_ode_gallery(const GalleryArgs& a, std::ostream& out, Output& o) {
  const Range range = parse_range(a.t_range, "--t");
  const std::vector<double> box = parse_list(a.u_box, "--u-box");
  if (box.size() != 2 || !(box[1] > box[0])) throw UsageError("--u-box expects lo,hi with lo < hi");
  const IntegralDiagram d = gallery_family(a.germ, a.alpha == "0" ? std::string() : a.alpha);
  GalleryOptions opts;
  opts.u_box = {{box[0], box[1]}, {box[0], box[1]}};
  opts.lines_per_axis = a.c.seed_density;
  opts.step = a.step;
  opts.tangency_tolerance = a.c.tol;
  o.n = 2;
  o.k = 2;
  out << "germ " << d.id << " (" << kind_name(d.kind) << ")\n";
  SvgLayer fronts{"front", {}};
  for (double t : range.values()) {
    const GalleryFront front = gallery_front(d, t, opts);
    add_gallery_chains(o, fronts, d, front.chains, "front", t);
    out << "t = " << format_number(t) << ": " << front.chains.size() << " curve(s), " << gallery_cusps(d, front).size()
        << " cusp(s)\n";
  }
  const GalleryDiscriminant disc = gallery_discriminant(d, {range.lo, range.hi}, opts);
  SvgLayer caustic{"caustic", {}}, maxwell{"maxwell", {}}, delta{"delta", {}};
  add_gallery_chains(o, caustic, d, disc.caustic, "caustic", std::nullopt);
  add_gallery_chains(o, maxwell, d, disc.maxwell, "maxwell", std::nullopt);
  add_gallery_chains(o, delta, d, disc.delta, "delta", std::nullopt);
  auto count = [](const std::vector<GalleryChain>& chains) {
    std::size_t n = 0;
    for (const auto& c : chains) n += c.u.size();
    return n;
  };
  out << "caustic: " << count(disc.caustic) << " point(s)\n"
      << "maxwell: " << count(disc.maxwell) << " point(s)\n"
      << "delta: " << count(disc.delta) << " point(s)\n";
  o.layers = {fronts, caustic, maxwell, delta};
}

// --- versal -------------------------------------------------------------

struct VersalArgs {
  Common c;
  std::string f;
  std::string dfdx;
  std::optional<unsigned> jet;
  std::optional<std::size_t> k;
};

std::string names_or_dash(const std::vector<std::string>& names) {
  if (names.empty()) return "-";
  std::string s;
  for (const auto& n : names) s += (s.empty() ? "" : ", ") + n;
  return s;
}

void cmd_versal(const VersalArgs& a, std::ostream& out) {
  std::vector<std::string> dfdx_text;
  {
    std::stringstream in(a.dfdx);
    std::string piece;
    while (std::getline(in, piece, ';')) {
      if (!trim(piece).empty()) dfdx_text.push_back(trim(piece));
    }
  }
  // Parse once with enough variables to find k, then again with exactly k.
  const VariableSet wide = VariableSet::indexed("q", 16);
  std::vector<PolyExpr> probe;
  for (const auto& t : dfdx_text) probe.push_back(parse_expression(t, wide));
  const std::size_t k = a.k ? *a.k : inferred_variable_count(parse_expression(a.f, wide), probe);
  if (k == 0) throw UsageError("--k must be positive");
  const VariableSet vars = VariableSet::indexed("q", k);
  const PolyExpr f = parse_expression(a.f, vars);
  std::vector<PolyExpr> dfdx;
  for (const auto& t : dfdx_text) dfdx.push_back(parse_expression(t, vars));
  const unsigned jet = a.jet ? *a.jet : default_jet_degree(f, k);

  const VersalityReport lag = lagrangian_stability_check(f, dfdx, jet, k, a.c.tol);
  const VersalityReport sp = sp_plus_versality_check(f, dfdx, jet, k, a.c.tol);
  const DeterminacyResult det = k_determinacy_dimension(f, jet, k, a.c.tol);
  out << "germ: " << print_expression(f, vars) << " (k=" << k << ", jet degree " << jet << ")\n";
  out << "lagrangian stability: " << (lag.passes ? "PASS" : "FAIL") << " (defect " << lag.codimension_defect
      << ", witnesses " << names_or_dash(lag.witness_names) << ")\n";
  out << "S.P+ versality: " << (sp.passes ? "PASS" : "FAIL") << " (defect " << sp.codimension_defect << ", witnesses "
      << names_or_dash(sp.witness_names) << ")\n";
  out << "K-determinacy dimension: " << (det.infinite ? std::string("infinite") : std::to_string(det.dimension)) << "\n";
}

// Appends `--key=value` for every config entry whose flag is absent.
std::vector<std::string> with_config(const std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  const KeyValueFile file = KeyValueFile::load(path);
  std::vector<std::string> out = args;
  for (const auto& [key, value] : file.values()) {
    if (key == "config") continue;
    const std::string flag = "--" + key;
    bool given = false;
    for (const auto& a : args) given = given || a == flag || a.rfind(flag + "=", 0) == 0;
    if (!given) out.push_back(flag + "=" + value);
  }
  return out;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fronts, caustics and discriminants of generating families", "lagfront"};
  app.require_subcommand(1);
  std::function<void(Output&)> action;
  const Common* common = nullptr;

  VerifyArgs verify;
  auto* v = app.add_subcommand("verify", "Morse-family, graph-like and non-degeneracy checks at critical points");
  add_common(v, verify.c, 9, "x-grid points per axis for the critical-point search", 1e-8, "relative rank threshold", false);
  v->add_option("--family", verify.family, "family file")->required();
  v->callback([&] {
    common = &verify.c;
    action = [&](Output&) { cmd_verify(verify, out); };
  });

  FamilyArgs front, bigf, caus, maxw;
  DiscriminantArgs disc;
  struct FamilyCommand {
    const char* name;
    const char* help;
    FamilyArgs* args;
    std::size_t density;
    const char* density_help;
    void (*fn)(const FamilyArgs&, std::ostream&, Output&);
  };
  const FamilyCommand family_commands[] = {
      {"front", "momentary front W_t", &front, 7, "seed grid points per (q, x) axis", cmd_front},
      {"big-front", "momentary fronts over a t range", &bigf, 7, "seed grid points per (q, x) axis", cmd_big_front},
      {"caustic", "caustic of the family", &caus, 7, "seed grid points per (q, x) axis", cmd_caustic},
      {"maxwell", "Maxwell set of the family", &maxw, 41, "x-grid points per axis for candidates", cmd_maxwell},
  };
  for (const auto& fc : family_commands) {
    auto* sub = app.add_subcommand(fc.name, fc.help);
    add_common(sub, fc.args->c, fc.density, fc.density_help, 1e-8, "relative rank threshold");
    sub->add_option("--family", fc.args->family, "family file")->required();
    sub->add_option("--step", fc.args->step, "continuation step")->capture_default_str()->check(CLI::PositiveNumber);
    if (std::string(fc.name) == "front") sub->add_option("--t", fc.args->t, "front level t")->required();
    if (std::string(fc.name) == "big-front") sub->add_option("--t", fc.args->t_range, "levels lo:hi:step")->required();
    FamilyArgs* args = fc.args;
    auto fn = fc.fn;
    sub->callback([&, args, fn] {
      common = &args->c;
      action = [&, args, fn](Output& o) { fn(*args, out, o); };
    });
  }
  {
    auto* sub = app.add_subcommand("discriminant", "caustic, Maxwell set and delta of the graph-like unfolding");
    add_common(sub, disc.f.c, 41, "x-grid points per axis for Maxwell candidates", 1e-8, "relative rank threshold");
    sub->add_option("--family", disc.f.family, "family file")->required();
    sub->add_option("--step", disc.f.step, "continuation step")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--caustic-density", disc.caustic_density, "caustic seed points per (q, x) axis")->capture_default_str();
    sub->callback([&] {
      common = &disc.f.c;
      action = [&](Output& o) { cmd_discriminant(disc, out, o); };
    });
  }

  SurfaceArgs evo, par;
  {
    auto* sub = app.add_subcommand("evolute", "focal set of a curve or surface");
    add_common(sub, evo.c, 721, "chart samples per axis (surfaces default to 61)", 1e-6, "points with |curvature| below this are dropped");
    add_surface_options(sub, evo);
    sub->callback([&, sub] {
      common = &evo.c;
      evo.density_given = sub->count("--seed-density") > 0;
      action = [&](Output& o) { cmd_evolute(evo, out, o); };
    });
  }
  {
    auto* sub = app.add_subcommand("parallels", "parallels X + r n over a range of signed r");
    add_common(sub, par.c, 721, "chart samples per axis (surfaces default to 61)", 1e-3, "distance within which a cusp counts as on the evolute");
    add_surface_options(sub, par);
    sub->add_option("--r", par.r_range, "offsets lo:hi:step (negative is inward)")->required();
    sub->add_flag("--no-evolute", par.no_evolute, "leave the evolute out of the outputs");
    sub->callback([&, sub] {
      common = &par.c;
      par.density_given = sub->count("--seed-density") > 0;
      action = [&](Output& o) { cmd_parallels(par, out, o); };
    });
  }

  BurgersArgs burg;
  {
    auto* sub = app.add_subcommand("burgers", "characteristics of y_t + 2 y y_x = 0");
    add_common(sub, burg.c, 400, "number of strips", 1e-9, "breaking-time bisection tolerance");
    sub->add_option("--t", burg.t_range, "times lo:hi:dt")->capture_default_str();
    sub->add_option("--x0-lo", burg.x0_lo, "first strip")->capture_default_str();
    sub->add_option("--x0-hi", burg.x0_hi, "last strip")->capture_default_str();
    sub->add_option("--phi", burg.phi, "initial datum: sin, -sin, cos or a polynomial in x1")->capture_default_str();
    sub->add_flag("--report-breaking", burg.report_breaking, "print the breaking time");
    sub->add_option("--count-at", burg.count_at, "print the number of branches at x,t");
    sub->add_option("--surface-csv", burg.surface_csv, "write x,t,y samples of the solution surface");
    sub->add_option("--stride", burg.stride, "time steps between CSV samples")->capture_default_str();
    sub->add_option("--snapshots", burg.snapshots, "times drawn in the SVG")->capture_default_str();
    sub->callback([&] {
      common = &burg.c;
      action = [&](Output& o) { cmd_burgers(burg, out, o); };
    });
  }

  GalleryArgs gal;
  {
    auto* sub = app.add_subcommand("ode-gallery", "momentary fronts and discriminant of a normal-form integral diagram");
    add_common(sub, gal.c, 21, "grid lines per axis scanned for seeds", 1e-7, "kernel tangency tolerance");
    sub->add_option("--germ", gal.germ, "normal form 1..6")->required();
    sub->add_option("--t", gal.t_range, "levels lo:hi:step")->capture_default_str();
    sub->add_option("--alpha", gal.alpha, "functional modulus in v1, v2, or 0")->capture_default_str();
    sub->add_option("--step", gal.step, "continuation step in the u-plane")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--u-box", gal.u_box, "u range lo,hi for both axes")->capture_default_str();
    sub->callback([&] {
      common = &gal.c;
      action = [&](Output& o) { cmd_ode_gallery(gal, out, o); };
    });
  }

  VersalArgs vers;
  {
    auto* sub = app.add_subcommand("versal", "Lagrangian stability and S.P+ versality of an unfolding");
    add_common(sub, vers.c, 1, "no effect for this command", 1e-8, "relative rank threshold", false);
    sub->add_option("--f", vers.f, "germ in q1..qk")->required();
    sub->add_option("--dfdx", vers.dfdx, "initial velocities dF/dx_j at 0, separated by ';'");
    sub->add_option("--jet", vers.jet, "jet degree (default: twice the degree of f)");
    sub->add_option("--k", vers.k, "number of q variables (default: inferred)");
    sub->callback([&] {
      common = &vers.c;
      action = [&](Output&) { cmd_versal(vers, out); };
    });
  }

  try {
    const std::vector<std::string> args = with_config(raw_args);
    std::vector<std::string> storage = {"lagfront"};
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : storage) argv.push_back(s.data());
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    check_outputs(*common);
    Output o;
    action(o);
    write_outputs(*common, o);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const SyntaxError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UndeclaredVariable& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}

}  // namespace lagfront::cli
