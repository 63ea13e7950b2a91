#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lagfront/field.hpp"
#include "lagfront/linalg.hpp"

namespace lagfront {

// A generating family F(q, x) with k internal variables q and n space
// variables x. The field's arguments are ordered (q1..qk, x1..xn) and its
// domain box lives in the same coordinates.
class GeneratingFamily {
 public:
  GeneratingFamily() = default;
  // Throws DomainError on bad dimensions. When `base_point` is given the
  // family must pass morse_family_check there (DomainError otherwise).
  GeneratingFamily(std::size_t k, std::size_t n, ScalarField field, Box box = {},
                   std::optional<Vector> base_point = std::nullopt, std::string label = {});

  static GeneratingFamily from_expression(const std::string& text, std::size_t k, std::size_t n,
                                          Box box = {},
                                          std::optional<Vector> base_point = std::nullopt);

  std::size_t k() const { return impl_->k; }
  std::size_t n() const { return impl_->n; }
  std::size_t dim() const { return impl_->k + impl_->n; }
  const ScalarField& field() const { return impl_->field; }
  const Box& box() const { return impl_->box; }
  const std::string& label() const { return impl_->label; }
  const std::optional<Vector>& base_point() const { return impl_->base; }

  // The k fields dF/dq_i, i.e. the map Delta F.
  const FieldSystem& delta() const { return impl_->delta; }

  // Periodic internal variables (e.g. the angle of a closed curve). Entry i
  // is the period of q_(i+1), 0 when not periodic.
  GeneratingFamily with_periods(std::vector<double> q_periods) const;
  const std::vector<double>& q_periods() const { return impl_->periods; }
  // Periods over all (q, x) coordinates, for continuation.
  std::vector<double> qx_periods() const;
  Vector canonical_q(const Vector& q) const;
  double q_distance(const Vector& a, const Vector& b) const;

  // Box coordinate for one variable; unbounded when the box is empty.
  Interval bound(std::size_t variable) const;

  static Vector join(const Vector& q, const Vector& x);
  Vector q_of(const Vector& qx) const { return qx.head(static_cast<Eigen::Index>(k())); }
  Vector x_of(const Vector& qx) const { return qx.tail(static_cast<Eigen::Index>(n())); }

 private:
  struct Impl {
    std::size_t k = 0;
    std::size_t n = 0;
    ScalarField field;
    Box box;
    std::optional<Vector> base;
    std::string label;
    FieldSystem delta;
    std::vector<double> periods;
  };
  std::shared_ptr<const Impl> impl_;
};

// The big family F(q,x) - t with lambda fixed to 1. `t_range` restricts the
// admissible times (the extended distance-squared family uses t > 0).
struct GraphLikeFamily {
  GeneratingFamily base;
  Interval t_range;
};

struct CriticalPoint {
  Vector q;
  Vector x;
  double residual = 0.0;    // inf-norm of dF/dq
  double hess_q_det = 0.0;  // det of d2F/dq2
  std::size_t corank = 0;   // k - rank(d2F/dq2)

  Vector qx() const { return GeneratingFamily::join(q, x); }
};

struct LagrangianSample {
  Vector x;
  Vector p;
  CriticalPoint source;
};

struct GraphLikeSample {
  Vector x;
  double t = 0.0;
  Vector p;
  CriticalPoint source;
};

struct RankCheck {
  bool pass = false;
  std::size_t rank = 0;
  bool on_zero_level = true;  // hypersurface check only: |F| small at the point
};

// Jacobian of Delta F, k x (k+n): the top k rows of the Hessian.
Matrix delta_jacobian(const GeneratingFamily& fam, const Vector& qx);

// Builds a CriticalPoint record at (q,x) without solving.
CriticalPoint make_critical_point(const GeneratingFamily& fam, const Vector& qx,
                                  double rank_epsilon = kDefaultRankEpsilon);

RankCheck morse_family_check(const GeneratingFamily& fam, const Vector& qx,
                             double rank_epsilon = kDefaultRankEpsilon);

// Rank of the (k+1) x (k+n) Jacobian of (F, dF/dq). Points off the zero level
// are still ranked and flagged through `on_zero_level`.
RankCheck morse_hypersurface_check(const GeneratingFamily& fam, const Vector& qx,
                                   double rank_epsilon = kDefaultRankEpsilon);

// `qxt` is (q, x, t) on Sigma*: F = t and dF/dq = 0 within 1e-8, otherwise
// NotOnSigmaStar.
bool nondegeneracy_check(const GraphLikeFamily& gl, const Vector& qxt,
                         double rank_epsilon = kDefaultRankEpsilon);

// Residual of the Sigma* equations (F - t, dF/dq) at (q, x, t).
double sigma_star_residual(const GraphLikeFamily& gl, const Vector& qxt);

struct CriticalSet {
  std::vector<CriticalPoint> points;
  std::size_t failed_seeds = 0;
};

// For every x of the grid (frozen) Newton-solves dF/dq = 0 from each q seed.
// Solutions closer than 1e-6 are merged. Output follows grid order, then the
// order in which seeds first reached a solution.
CriticalSet solve_critical_set(const GeneratingFamily& fam, const std::vector<Vector>& x_grid,
                               const std::vector<Vector>& q_seeds);

LagrangianSample lagrangian_map(const GeneratingFamily& fam, const CriticalPoint& cp);
GraphLikeSample legendrian_unfolding_map(const GraphLikeFamily& gl, const CriticalPoint& cp);

struct RankDiagnostics {
  std::size_t space_proj_rank = 0;
  std::size_t front_proj_rank = 0;
  double space_sigma_min = 0.0;  // relative smallest singular values
  double front_sigma_min = 0.0;
  double immersion_sigma_min = 0.0;
};

// Tangent basis (columns, (k+n) x n) of C(F) at a point, from the implicit
// function chart whose dependent coordinates are the pivot columns of a
// column-pivoted QR of J_DeltaF. Throws ChartFailure when J_DeltaF has rank < k.
Matrix critical_set_tangent(const GeneratingFamily& fam, const Vector& qx,
                            double rank_epsilon = kDefaultRankEpsilon);

RankDiagnostics rank_diagnostics(const GraphLikeFamily& gl, const CriticalPoint& cp,
                                 double rank_epsilon = kDefaultRankEpsilon);

// Families used by property tests and the acceptance suite.
namespace catalog_families {

GeneratingFamily quadratic();     // q1^2 + x1*q1 + x2
GeneratingFamily fold();          // q1^3 + x1*q1 + x2
GeneratingFamily cusp();          // q1^4 + x1*q1^2 + x2*q1
GeneratingFamily swallowtail();   // q1^5 + x1*q1^3 + x2*q1^2 + x3*q1
GeneratingFamily umbilic();       // q1^3 + q2^3 + x3*q1*q2 + x1*q1 + x2*q2

std::vector<GeneratingFamily> all();

}  // namespace catalog_families

}  // namespace lagfront
