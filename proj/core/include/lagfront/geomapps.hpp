#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "lagfront/fronts.hpp"
#include "lagfront/genfam.hpp"
#include "lagfront/geometry.hpp"
#include "lagfront/poly.hpp"

namespace lagfront {

// Position and derivatives of a chart X: U in R^m -> R^n, m = n - 1.
// d2[i * m + j] holds the second partial X_ij.
struct SurfaceJet {
  Vector x;
  Matrix d1;  // n x m, columns X_i
  std::vector<Vector> d2;
};

// A parameterized curve (n = 2) or surface (n = 3). The unit normal n(u) is
// oriented away from the side the catalog shapes curve towards (outward for
// circle, ellipse, sphere and ellipsoid; downward for graphs), so a negative
// parallel offset r moves towards the centres of curvature. Curvatures are
// measured against the opposite normal, making convex catalog shapes
// positively curved.
class ParametricHypersurface {
 public:
  using JetFn = std::function<SurfaceJet(const Vector&)>;

  ParametricHypersurface() = default;
  // orientation = +1 takes n along the rotated tangent (y', -x') for curves and
  // along X_1 x X_2 for surfaces; -1 flips it.
  ParametricHypersurface(std::size_t ambient, JetFn jet, Box u_domain,
                         std::vector<double> u_periods, int orientation, std::string kind);

  std::size_t ambient() const { return impl_->ambient; }
  std::size_t chart_dim() const { return impl_->ambient - 1; }
  const Box& u_domain() const { return impl_->u_domain; }
  const std::vector<double>& u_periods() const { return impl_->periods; }
  const std::string& kind() const { return impl_->kind; }

  SurfaceJet jet(const Vector& u) const;
  Vector point(const Vector& u) const { return jet(u).x; }
  Vector normal(const Vector& u) const;
  // Derivative of the unit normal of a curve with respect to u (n = 2 only).
  Vector normal_derivative(const Vector& u) const;

 private:
  struct Impl {
    std::size_t ambient = 2;
    JetFn jet;
    Box u_domain;
    std::vector<double> periods;
    int orientation = 1;
    std::string kind;
  };
  std::shared_ptr<const Impl> impl_;
};

namespace surfaces {

ParametricHypersurface circle(double radius);
ParametricHypersurface ellipse(double a, double b);
ParametricHypersurface parabola(double c, Interval u = {-2.0, 2.0});  // y = c u^2
ParametricHypersurface sphere(double radius);
ParametricHypersurface ellipsoid(double a, double b, double c);
// z = g(u1, u2); `g` uses variables u1, u2.
ParametricHypersurface graph(const PolyExpr& g, Box u_domain);
ParametricHypersurface plane(Box u_domain);

// Builds a catalog surface from a kind name and numeric parameters:
// circle(r), ellipse(a, b), parabola(c), sphere(r), ellipsoid(a, b, c).
// Throws DomainError on unknown kinds or missing parameters.
ParametricHypersurface from_spec(const std::string& kind, const std::map<std::string, double>& params);

}  // namespace surfaces

struct CurvatureData {
  std::vector<double> kappa;  // ascending; one entry for curves
  Matrix directions;          // n = 3: unit principal directions as columns
};

// Throws DegenerateMetric when det I < 1e-14.
CurvatureData curvature(const ParametricHypersurface& surface, const Vector& u);

struct PointSet {
  std::vector<Vector> points;
  std::vector<Vector> u;  // chart parameter of each point
  std::size_t skipped = 0;
};

// Focal points X + nu / kappa_branch for the inward normal nu; points with
// |kappa| < 1e-12 are skipped and counted.
PointSet evolute(const ParametricHypersurface& surface, const std::vector<Vector>& u_grid,
                 std::size_t branch = 0);

struct ParallelCurve {
  double r = 0.0;
  Polyline points;
  std::vector<Vector> u;
};

// P_r(u) = X(u) + r n(u) per r. Throws DomainError for r = 0.
std::vector<ParallelCurve> parallels(const ParametricHypersurface& surface,
                                     const std::vector<double>& r_values,
                                     const std::vector<Vector>& u_grid);

// Cusps of a parallel curve (n = 2): reversals of the sampled polyline,
// refined by bisection on the analytic velocity X' + r n'.
std::vector<Vector> parallel_cusps(const ParametricHypersurface& surface, const ParallelCurve& curve);

struct DistanceFamilies {
  GeneratingFamily family;   // D(u, v) = |X(u) - v|^2
  GraphLikeFamily extended;  // D - t with t > 0
};

// v ranges over `v_box` (default [-10, 10]^n); periodic chart variables are
// carried as family periods.
DistanceFamilies distance_squared_family(const ParametricHypersurface& surface, Box v_box = {});

// Seeds (u, X(u) + r n(u)) for tracing the front of the extended family.
std::vector<Vector> parallel_seeds(const ParametricHypersurface& surface, double r,
                                   const std::vector<Vector>& u_values);

// Seeds (u, focal point) for tracing the caustic of the distance family.
std::vector<Vector> focal_seeds(const ParametricHypersurface& surface,
                                const std::vector<Vector>& u_values, std::size_t branch = 0);

// Momentary front of the extended family at t = r^2 (curves only), each
// curve labelled "outer" or "inner" by the side of the surface it lies on.
FrontResult distance_front(const ParametricHypersurface& surface, const DistanceFamilies& fams,
                           double r, const std::vector<Vector>& u_values,
                           const TraceOptions& options = {});

struct TangencyReport {
  std::vector<Vector> tangency_points;
  bool multiple = false;
};

// Chart points where the sphere of radius r about v touches the surface:
// grad_u D = 0 and D = r^2 (to 1e-8 relative), solved from u_grid seeds.
TangencyReport tangent_sphere_check(const ParametricHypersurface& surface, const Vector& v,
                                    double r, const std::vector<Vector>& u_grid);

}  // namespace lagfront
