#include "lagfront/genfam.hpp"

#include <cmath>

#include "lagfront/errors.hpp"
#include "lagfront/newton.hpp"
#include "lagfront/parallel.hpp"

namespace lagfront {

namespace {

constexpr double kMembershipTolerance = 1e-8;
constexpr double kDedupRadius = 1e-6;

ScalarField catalog_poly(const char* text, std::size_t k, std::size_t n, const char* label) {
  Box box(k + n, Interval{-2.0, 2.0});
  return ScalarField::from_polynomial(
      Polynomial::from_expression(parse_family(text, k, n, false), k + n), box, label);
}

Matrix orthonormal_columns(const Matrix& m) {
  Eigen::HouseholderQR<Matrix> qr(m);
  return qr.householderQ() * Matrix::Identity(m.rows(), m.cols());
}

}  // namespace

GeneratingFamily::GeneratingFamily(std::size_t k, std::size_t n, ScalarField field, Box box,
                                   std::optional<Vector> base_point, std::string label) {
  if (k == 0 || n == 0) throw DomainError("generating family needs k >= 1 and n >= 1");
  if (field.arity() != k + n) {
    throw DomainError("field arity " + std::to_string(field.arity()) + " does not match k+n = " +
                      std::to_string(k + n));
  }
  if (!box.empty() && box.size() != k + n) throw DomainError("domain box has wrong dimension");
  if (!box.empty()) field = field.with_domain(box);
  auto impl = std::make_shared<Impl>();
  impl->k = k;
  impl->n = n;
  impl->box = std::move(box);
  impl->label = label.empty() ? field.label() : std::move(label);
  for (std::size_t i = 0; i < k; ++i) impl->delta.push_back(field.partial(i));
  impl->field = std::move(field);
  impl->base = std::move(base_point);
  impl_ = std::move(impl);
  if (impl_->base) {
    if (static_cast<std::size_t>(impl_->base->size()) != k + n) {
      throw DomainError("base point has wrong dimension");
    }
    if (!morse_family_check(*this, *impl_->base).pass) {
      throw DomainError("family is not a Morse family of functions at its base point");
    }
  }
}

GeneratingFamily GeneratingFamily::from_expression(const std::string& text, std::size_t k,
                                                   std::size_t n, Box box,
                                                   std::optional<Vector> base_point) {
  const PolyExpr expr = parse_family(text, k, n, false);
  ScalarField field =
      ScalarField::from_polynomial(Polynomial::from_expression(expr, k + n), box, text);
  return GeneratingFamily(k, n, std::move(field), std::move(box), std::move(base_point), text);
}

GeneratingFamily GeneratingFamily::with_periods(std::vector<double> q_periods) const {
  if (q_periods.size() != k()) throw DomainError("one period per internal variable expected");
  auto impl = std::make_shared<Impl>(*impl_);
  impl->periods = std::move(q_periods);
  GeneratingFamily out;
  out.impl_ = std::move(impl);
  return out;
}

std::vector<double> GeneratingFamily::qx_periods() const {
  std::vector<double> out(dim(), 0.0);
  for (std::size_t i = 0; i < impl_->periods.size(); ++i) out[i] = impl_->periods[i];
  return out;
}

Vector GeneratingFamily::canonical_q(const Vector& q) const {
  Vector out = q;
  for (std::size_t i = 0; i < impl_->periods.size(); ++i) {
    const double p = impl_->periods[i];
    const auto j = static_cast<Eigen::Index>(i);
    if (p > 0.0) out(j) -= p * std::floor(out(j) / p + 0.5);
  }
  return out;
}

double GeneratingFamily::q_distance(const Vector& a, const Vector& b) const {
  return canonical_q(a - b).norm();
}

Interval GeneratingFamily::bound(std::size_t variable) const {
  return box().empty() ? Interval{} : box().at(variable);
}

Vector GeneratingFamily::join(const Vector& q, const Vector& x) {
  Vector out(q.size() + x.size());
  out << q, x;
  return out;
}

Matrix delta_jacobian(const GeneratingFamily& fam, const Vector& qx) {
  return hessian(fam.field(), qx).topRows(static_cast<Eigen::Index>(fam.k()));
}

CriticalPoint make_critical_point(const GeneratingFamily& fam, const Vector& qx,
                                  double rank_epsilon) {
  const auto k = static_cast<Eigen::Index>(fam.k());
  CriticalPoint cp;
  cp.q = fam.q_of(qx);
  cp.x = fam.x_of(qx);
  cp.residual = inf_norm(grad(fam.field(), qx).head(k));
  const Matrix hqq = hessian(fam.field(), qx).topLeftCorner(k, k);
  cp.hess_q_det = hqq.determinant();
  cp.corank = fam.k() - numerical_rank(hqq, rank_epsilon);
  return cp;
}

RankCheck morse_family_check(const GeneratingFamily& fam, const Vector& qx, double rank_epsilon) {
  fam.field().check_in_domain(qx);
  RankCheck out;
  out.rank = numerical_rank(delta_jacobian(fam, qx), rank_epsilon);
  out.pass = out.rank == fam.k();
  return out;
}

RankCheck morse_hypersurface_check(const GeneratingFamily& fam, const Vector& qx,
                                   double rank_epsilon) {
  const auto k = static_cast<Eigen::Index>(fam.k());
  const auto m = static_cast<Eigen::Index>(fam.dim());
  Matrix j(k + 1, m);
  j.row(0) = grad(fam.field(), qx).transpose();
  j.bottomRows(k) = delta_jacobian(fam, qx);
  RankCheck out;
  out.rank = numerical_rank(j, rank_epsilon);
  out.pass = out.rank == fam.k() + 1;
  out.on_zero_level = std::abs(fam.field()(qx)) < kMembershipTolerance;
  return out;
}

double sigma_star_residual(const GraphLikeFamily& gl, const Vector& qxt) {
  const GeneratingFamily& fam = gl.base;
  const Vector qx = qxt.head(static_cast<Eigen::Index>(fam.dim()));
  const double t = qxt(qxt.size() - 1);
  const Vector g = grad(fam.field(), qx);
  return std::max(std::abs(fam.field()(qx) - t),
                  inf_norm(g.head(static_cast<Eigen::Index>(fam.k()))));
}

bool nondegeneracy_check(const GraphLikeFamily& gl, const Vector& qxt, double rank_epsilon) {
  const GeneratingFamily& fam = gl.base;
  const auto k = static_cast<Eigen::Index>(fam.k());
  const auto n = static_cast<Eigen::Index>(fam.n());
  if (static_cast<std::size_t>(qxt.size()) != fam.dim() + 1) {
    throw DomainError("Sigma* point must be (q, x, t)");
  }
  const double res = sigma_star_residual(gl, qxt);
  if (!(res <= kMembershipTolerance)) {
    throw NotOnSigmaStar("residual " + std::to_string(res));
  }
  const Vector qx = qxt.head(k + n);
  Matrix j = Matrix::Zero(k + 1, k + n);
  j.block(0, k, 1, n) = grad(fam.field(), qx).tail(n).transpose();
  j.bottomRows(k) = delta_jacobian(fam, qx);
  return numerical_rank(j, rank_epsilon) == fam.k() + 1;
}

CriticalSet solve_critical_set(const GeneratingFamily& fam, const std::vector<Vector>& x_grid,
                               const std::vector<Vector>& q_seeds) {
  std::vector<std::size_t> frozen;
  for (std::size_t i = fam.k(); i < fam.dim(); ++i) frozen.push_back(i);

  std::vector<std::vector<CriticalPoint>> per_cell(x_grid.size());
  std::vector<std::size_t> failures(x_grid.size(), 0);
  parallel_for(x_grid.size(), [&](std::size_t cell) {
    auto& found = per_cell[cell];
    for (const Vector& q0 : q_seeds) {
      Vector sol;
      try {
        sol = newton_solve(fam.delta(), GeneratingFamily::join(q0, x_grid[cell]), frozen);
      } catch (const Error&) {
        ++failures[cell];
        continue;
      }
      const Vector q = fam.canonical_q(fam.q_of(sol));
      sol.head(q.size()) = q;
      if (!box_contains(fam.box(), sol)) {
        ++failures[cell];
        continue;
      }
      bool duplicate = false;
      for (const auto& cp : found) {
        if (fam.q_distance(cp.q, q) < kDedupRadius) {
          duplicate = true;
          break;
        }
      }
      if (!duplicate) found.push_back(make_critical_point(fam, sol));
    }
  });

  CriticalSet out;
  for (std::size_t cell = 0; cell < x_grid.size(); ++cell) {
    for (auto& cp : per_cell[cell]) out.points.push_back(std::move(cp));
    out.failed_seeds += failures[cell];
  }
  return out;
}

LagrangianSample lagrangian_map(const GeneratingFamily& fam, const CriticalPoint& cp) {
  LagrangianSample s;
  s.x = cp.x;
  s.p = grad(fam.field(), cp.qx()).tail(static_cast<Eigen::Index>(fam.n()));
  s.source = cp;
  return s;
}

GraphLikeSample legendrian_unfolding_map(const GraphLikeFamily& gl, const CriticalPoint& cp) {
  const LagrangianSample lag = lagrangian_map(gl.base, cp);
  GraphLikeSample s;
  s.x = lag.x;
  s.p = lag.p;
  s.t = gl.base.field()(cp.qx());
  s.source = cp;
  return s;
}

Matrix critical_set_tangent(const GeneratingFamily& fam, const Vector& qx, double rank_epsilon) {
  const auto k = static_cast<Eigen::Index>(fam.k());
  const auto m = static_cast<Eigen::Index>(fam.dim());
  const Matrix j = delta_jacobian(fam, qx);
  if (numerical_rank(j, rank_epsilon) < fam.k()) {
    throw ChartFailure("Jacobian of dF/dq has rank below k; C(F) is not smooth here");
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(j);
  const auto& perm = qr.colsPermutation().indices();
  Matrix dep(k, k);
  for (Eigen::Index c = 0; c < k; ++c) dep.col(c) = j.col(perm(c));
  Eigen::PartialPivLU<Matrix> lu(dep);
  Matrix tangent = Matrix::Zero(m, m - k);
  for (Eigen::Index f = 0; f < m - k; ++f) {
    const Eigen::Index col = perm(k + f);
    const Vector dz = lu.solve(-j.col(col));
    tangent(col, f) = 1.0;
    for (Eigen::Index c = 0; c < k; ++c) tangent(perm(c), f) = dz(c);
  }
  if (!tangent.allFinite()) throw ChartFailure("implicit chart is singular");
  return tangent;
}

RankDiagnostics rank_diagnostics(const GraphLikeFamily& gl, const CriticalPoint& cp,
                                 double rank_epsilon) {
  const GeneratingFamily& fam = gl.base;
  const auto n = static_cast<Eigen::Index>(fam.n());
  const Vector qx = cp.qx();
  const Matrix basis = orthonormal_columns(critical_set_tangent(fam, qx, rank_epsilon));

  const Matrix space = basis.bottomRows(n);
  Matrix front(n + 1, n);
  front.topRows(n) = space;
  front.row(n) = grad(fam.field(), qx).transpose() * basis;
  Matrix immersion(2 * n, n);
  immersion.topRows(n) = space;
  immersion.bottomRows(n) = hessian(fam.field(), qx).bottomRows(n) * basis;

  RankDiagnostics d;
  d.space_proj_rank = numerical_rank(space, rank_epsilon);
  d.front_proj_rank = numerical_rank(front, rank_epsilon);
  d.space_sigma_min = relative_sigma_min(space);
  d.front_sigma_min = relative_sigma_min(front);
  const Vector s = singular_values(immersion);
  d.immersion_sigma_min = s.size() ? s(s.size() - 1) : 0.0;
  return d;
}

namespace catalog_families {

GeneratingFamily quadratic() {
  return GeneratingFamily(1, 2, catalog_poly("q1^2 + x1*q1 + x2", 1, 2, "quadratic"),
                          Box(3, Interval{-2.0, 2.0}));
}
GeneratingFamily fold() {
  return GeneratingFamily(1, 2, catalog_poly("q1^3 + x1*q1 + x2", 1, 2, "fold"),
                          Box(3, Interval{-2.0, 2.0}));
}
GeneratingFamily cusp() {
  return GeneratingFamily(1, 2, catalog_poly("q1^4 + x1*q1^2 + x2*q1", 1, 2, "cusp"),
                          Box(3, Interval{-2.0, 2.0}));
}
GeneratingFamily swallowtail() {
  return GeneratingFamily(
      1, 3, catalog_poly("q1^5 + x1*q1^3 + x2*q1^2 + x3*q1", 1, 3, "swallowtail"),
      Box(4, Interval{-2.0, 2.0}));
}
GeneratingFamily umbilic() {
  return GeneratingFamily(
      2, 3, catalog_poly("q1^3 + q2^3 + x3*q1*q2 + x1*q1 + x2*q2", 2, 3, "umbilic"),
      Box(5, Interval{-2.0, 2.0}));
}

std::vector<GeneratingFamily> all() { return {quadratic(), fold(), cusp(), swallowtail(), umbilic()}; }

}  // namespace catalog_families

}  // namespace lagfront
