#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "lagfront/field.hpp"
#include "lagfront/geometry.hpp"
#include "lagfront/linalg.hpp"
#include "lagfront/poly.hpp"

namespace lagfront {

enum class DiagramKind { kTrivial, kRegular, kClairaut, kMixed };

// "trivial", "regular", "clairaut", "mixed fold".
std::string kind_name(DiagramKind kind);

// Normal-form integral diagram (mu, g) of a completely integrable first order
// ODE, in the variables u1, u2. The modulus alpha(v1, v2) is composed with g
// and added to mu.
struct IntegralDiagram {
  int id = 1;
  DiagramKind kind = DiagramKind::kTrivial;
  PolyExpr alpha = PolyExpr::constant(0);    // in v1, v2
  PolyExpr mu_expr = PolyExpr::constant(0);  // in u1, u2, modulus included
  std::array<PolyExpr, 2> g_expr = {PolyExpr::constant(0), PolyExpr::constant(0)};
  Polynomial mu_poly;
  std::array<Polynomial, 2> g_poly;
  ScalarField mu;
  std::array<ScalarField, 2> g;

  Vector grad_mu(const Vector& u) const;
  Vector map(const Vector& u) const;
  Matrix jacobian(const Vector& u) const;  // Dg, rows are grad g_i

  static VariableSet u_variables();
  static VariableSet v_variables();
};

// Germs 1..6. Throws UnknownGerm for any other id.
IntegralDiagram gallery_family(int id);
IntegralDiagram gallery_family(int id, const PolyExpr& alpha);
// `alpha` is an expression in v1, v2; "0" or an empty string means no modulus.
IntegralDiagram gallery_family(int id, std::string_view alpha);

struct GalleryOptions {
  Box u_box = {{-2.0, 2.0}, {-2.0, 2.0}};
  std::size_t lines_per_axis = 21;  // grid lines scanned for seeds
  double step = 0.01;               // continuation step in the u-plane
  std::size_t max_points = 20000;
  std::size_t maxwell_levels = 41;  // fronts scanned for Maxwell seeds
  // |dmu(v)| / |dmu| below this marks a kernel vector v of Dg as tangent.
  double tangency_tolerance = 1e-7;
};

struct GalleryChain {
  std::vector<Vector> u;  // points of the level curve mu = t
  Polyline curve;         // their images under g
  bool closed = false;
};

std::vector<Polyline> polylines(const std::vector<GalleryChain>& chains);

struct GalleryFront {
  double t = 0.0;
  std::vector<GalleryChain> chains;

  std::vector<Polyline> polylines() const;
  std::size_t point_count() const;
};

// W_t = g(mu^-1(t)) over the u box.
GalleryFront gallery_front(const IntegralDiagram& diagram, double t, const GalleryOptions& options = {});

// Cusps of a momentary front: points where the level curve runs along the
// kernel of Dg.
std::vector<Vector> gallery_cusps(const IntegralDiagram& diagram, const GalleryFront& front);

// Critical values of g split by whether the kernel of Dg is tangent to the
// level curve of mu (caustic) or transverse to it (envelope, delta). Maxwell
// strata are pairs u != u' with g(u) = g(u') and mu(u) = mu(u'), computed for
// every germ except the mixed one. Only points with mu in t_range are kept.
// Isolated caustic points come back as one-point chains.
// Maxwell chains carry the first point of each pair as their source u.
struct GalleryDiscriminant {
  std::vector<GalleryChain> caustic;
  std::vector<GalleryChain> maxwell;
  std::vector<GalleryChain> delta;

  bool empty() const { return caustic.empty() && maxwell.empty() && delta.empty(); }
};

GalleryDiscriminant gallery_discriminant(const IntegralDiagram& diagram, Interval t_range,
                                         const GalleryOptions& options = {});

// Least-squares slope of log|p[dependent]| against log|p[independent]| over the
// points where both coordinates exceed `floor` in absolute value.
double power_law_exponent(const std::vector<Vector>& points, std::size_t independent,
                          std::size_t dependent, double floor = 1e-3);

}  // namespace lagfront
