#include "lagfront/field.hpp"

#include <cmath>

#include "lagfront/errors.hpp"

namespace lagfront {

namespace {

// Flat polynomial layout for fast double evaluation.
class CompiledPolynomial {
 public:
  explicit CompiledPolynomial(const Polynomial& p) : num_vars_(p.num_vars()) {
    for (const auto& [m, c] : p.terms()) {
      coefficients_.push_back(c.to_double());
      exponents_.insert(exponents_.end(), m.begin(), m.end());
    }
  }

  double operator()(const Vector& x) const {
    double total = 0.0;
    const std::uint16_t* e = exponents_.data();
    for (double c : coefficients_) {
      double term = c;
      for (std::size_t i = 0; i < num_vars_; ++i, ++e) {
        for (std::uint16_t k = 0; k < *e; ++k) term *= x(static_cast<Eigen::Index>(i));
      }
      total += term;
    }
    return total;
  }

 private:
  std::size_t num_vars_;
  std::vector<double> coefficients_;
  std::vector<std::uint16_t> exponents_;
};

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw DomainError(std::string("non-finite ") + what);
}

double step_for(double coordinate, double h) { return h * std::max(1.0, std::abs(coordinate)); }

void require_stencil(const ScalarField& f, const Vector& p, Eigen::Index i, double s) {
  const Box& box = f.domain();
  if (box.empty()) return;
  const Interval& iv = box[static_cast<std::size_t>(i)];
  if (!iv.contains(p(i) - s) || !iv.contains(p(i) + s)) {
    throw DomainError("finite-difference stencil leaves the domain in coordinate " +
                      std::to_string(i));
  }
}

}  // namespace

ScalarField::ScalarField(std::size_t arity, ValueFn value, Box domain, GradientFn gradient,
                         HessianFn hessian, std::string label) {
  if (!domain.empty() && domain.size() != arity) throw DomainError("domain dimension mismatch");
  auto impl = std::make_shared<Impl>();
  impl->arity = arity;
  impl->value = std::move(value);
  impl->gradient = std::move(gradient);
  impl->hessian = std::move(hessian);
  impl->domain = std::move(domain);
  impl->label = std::move(label);
  impl_ = std::move(impl);
}

ScalarField ScalarField::from_polynomial(Polynomial poly, Box domain, std::string label) {
  const std::size_t m = poly.num_vars();
  auto value = std::make_shared<CompiledPolynomial>(poly);
  auto first = std::make_shared<std::vector<CompiledPolynomial>>();
  auto second = std::make_shared<std::vector<CompiledPolynomial>>();
  for (std::size_t i = 0; i < m; ++i) {
    const Polynomial di = poly.derivative(i);
    first->emplace_back(di);
    for (std::size_t j = 0; j < m; ++j) second->emplace_back(di.derivative(j));
  }
  ScalarField f(
      m, [value](const Vector& x) { return (*value)(x); }, std::move(domain),
      [first](const Vector& x) {
        Vector g(static_cast<Eigen::Index>(first->size()));
        for (std::size_t i = 0; i < first->size(); ++i) g(static_cast<Eigen::Index>(i)) = (*first)[i](x);
        return g;
      },
      [second, m](const Vector& x) {
        const auto n = static_cast<Eigen::Index>(m);
        Matrix h(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
          for (Eigen::Index j = 0; j < n; ++j) h(i, j) = (*second)[static_cast<std::size_t>(i * n + j)](x);
        }
        return h;
      },
      std::move(label));
  auto impl = std::make_shared<Impl>(*f.impl_);
  impl->poly = std::move(poly);
  f.impl_ = std::move(impl);
  return f;
}

ScalarField ScalarField::from_expression(const PolyExpr& expr, std::size_t arity, Box domain) {
  return from_polynomial(Polynomial::from_expression(expr, arity), std::move(domain));
}

ScalarField ScalarField::constant(std::size_t arity, double value) {
  return ScalarField(
      arity, [value](const Vector&) { return value; }, {},
      [arity](const Vector&) { return Vector::Zero(static_cast<Eigen::Index>(arity)).eval(); },
      [arity](const Vector&) {
        const auto n = static_cast<Eigen::Index>(arity);
        return Matrix::Zero(n, n).eval();
      });
}

void ScalarField::check_in_domain(const Vector& point) const {
  if (static_cast<std::size_t>(point.size()) != impl_->arity) {
    throw DomainError("point has dimension " + std::to_string(point.size()) + ", field arity is " +
                      std::to_string(impl_->arity));
  }
  for (Eigen::Index i = 0; i < point.size(); ++i) {
    if (!std::isfinite(point(i))) throw DomainError("non-finite coordinate");
  }
  if (!box_contains(impl_->domain, point)) throw DomainError("point outside the domain box");
}

double ScalarField::operator()(const Vector& point) const {
  check_in_domain(point);
  const double v = impl_->value(point);
  require_finite(v, "field value");
  return v;
}

Vector ScalarField::closed_gradient(const Vector& point) const { return impl_->gradient(point); }
Matrix ScalarField::closed_hessian(const Vector& point) const { return impl_->hessian(point); }

ScalarField ScalarField::with_domain(Box domain) const {
  if (!domain.empty() && domain.size() != impl_->arity) throw DomainError("domain dimension mismatch");
  ScalarField f = *this;
  auto impl = std::make_shared<Impl>(*impl_);
  impl->domain = std::move(domain);
  f.impl_ = std::move(impl);
  return f;
}

ScalarField ScalarField::with_label(std::string label) const {
  ScalarField f = *this;
  auto impl = std::make_shared<Impl>(*impl_);
  impl->label = std::move(label);
  f.impl_ = std::move(impl);
  return f;
}

ScalarField ScalarField::partial(std::size_t variable) const {
  if (variable >= arity()) throw DomainError("partial derivative index out of range");
  if (const Polynomial* p = polynomial()) {
    return from_polynomial(p->derivative(variable), domain());
  }
  const auto i = static_cast<Eigen::Index>(variable);
  const ScalarField self = *this;
  if (has_closed_gradient()) {
    GradientFn gradient;
    if (has_closed_hessian()) {
      gradient = [self, i](const Vector& x) { return Vector(self.closed_hessian(x).row(i).transpose()); };
    }
    return ScalarField(
        arity(), [self, i](const Vector& x) { return self.closed_gradient(x)(i); }, domain(),
        std::move(gradient));
  }
  return ScalarField(
      arity(), [self, i](const Vector& x) { return fd_gradient(self, x)(i); }, domain(),
      [self, i](const Vector& x) { return Vector(hessian(self, x).row(i).transpose()); });
}

Vector fd_gradient(const ScalarField& field, const Vector& point, double h) {
  field.check_in_domain(point);
  Vector g(point.size());
  Vector p = point;
  for (Eigen::Index i = 0; i < point.size(); ++i) {
    const double s = step_for(point(i), h);
    require_stencil(field, point, i, s);
    p(i) = point(i) + s;
    const double up = field(p);
    p(i) = point(i) - s;
    const double down = field(p);
    p(i) = point(i);
    g(i) = (up - down) / (2.0 * s);
  }
  return g;
}

Matrix fd_hessian(const ScalarField& field, const Vector& point) {
  field.check_in_domain(point);
  const Eigen::Index m = point.size();
  Matrix h(m, m);
  Vector p = point;
  if (field.has_closed_gradient()) {
    for (Eigen::Index i = 0; i < m; ++i) {
      const double s = step_for(point(i), kGradientStep);
      require_stencil(field, point, i, s);
      p(i) = point(i) + s;
      field.check_in_domain(p);
      const Vector up = field.closed_gradient(p);
      p(i) = point(i) - s;
      field.check_in_domain(p);
      const Vector down = field.closed_gradient(p);
      p(i) = point(i);
      h.col(i) = (up - down) / (2.0 * s);
    }
  } else {
    const double f0 = field(point);
    for (Eigen::Index i = 0; i < m; ++i) {
      const double si = step_for(point(i), kHessianStep);
      require_stencil(field, point, i, si);
      p(i) = point(i) + si;
      const double up = field(p);
      p(i) = point(i) - si;
      const double down = field(p);
      p(i) = point(i);
      h(i, i) = (up - 2.0 * f0 + down) / (si * si);
      for (Eigen::Index j = 0; j < i; ++j) {
        const double sj = step_for(point(j), kHessianStep);
        double acc = 0.0;
        for (int a : {1, -1}) {
          for (int b : {1, -1}) {
            p(i) = point(i) + a * si;
            p(j) = point(j) + b * sj;
            acc += a * b * field(p);
          }
        }
        p(i) = point(i);
        p(j) = point(j);
        h(i, j) = h(j, i) = acc / (4.0 * si * sj);
      }
    }
  }
  for (Eigen::Index i = 0; i < h.size(); ++i) require_finite(h.data()[i], "hessian entry");
  return 0.5 * (h + h.transpose());
}

Vector grad(const ScalarField& field, const Vector& point) {
  if (!field.has_closed_gradient()) return fd_gradient(field, point);
  field.check_in_domain(point);
  Vector g = field.closed_gradient(point);
  for (Eigen::Index i = 0; i < g.size(); ++i) require_finite(g(i), "gradient entry");
  return g;
}

Matrix hessian(const ScalarField& field, const Vector& point) {
  if (!field.has_closed_hessian()) return fd_hessian(field, point);
  field.check_in_domain(point);
  Matrix h = field.closed_hessian(point);
  for (Eigen::Index i = 0; i < h.size(); ++i) require_finite(h.data()[i], "hessian entry");
  return h;
}

Vector evaluate_system(const FieldSystem& system, const Vector& point) {
  Vector r(static_cast<Eigen::Index>(system.size()));
  for (std::size_t i = 0; i < system.size(); ++i) r(static_cast<Eigen::Index>(i)) = system[i](point);
  return r;
}

Matrix system_jacobian(const FieldSystem& system, const Vector& point) {
  Matrix j(static_cast<Eigen::Index>(system.size()), point.size());
  for (std::size_t i = 0; i < system.size(); ++i) {
    j.row(static_cast<Eigen::Index>(i)) = grad(system[i], point).transpose();
  }
  return j;
}

namespace catalog_fields {

ScalarField sine() {
  return ScalarField(
      1, [](const Vector& x) { return std::sin(x(0)); }, {},
      [](const Vector& x) { return Vector::Constant(1, std::cos(x(0))).eval(); },
      [](const Vector& x) { return Matrix::Constant(1, 1, -std::sin(x(0))).eval(); }, "sin");
}

ScalarField cosine() {
  return ScalarField(
      1, [](const Vector& x) { return std::cos(x(0)); }, {},
      [](const Vector& x) { return Vector::Constant(1, -std::sin(x(0))).eval(); },
      [](const Vector& x) { return Matrix::Constant(1, 1, -std::cos(x(0))).eval(); }, "cos");
}

ScalarField exponential() {
  return ScalarField(
      1, [](const Vector& x) { return std::exp(x(0)); }, {},
      [](const Vector& x) { return Vector::Constant(1, std::exp(x(0))).eval(); },
      [](const Vector& x) { return Matrix::Constant(1, 1, std::exp(x(0))).eval(); }, "exp");
}

ScalarField gaussian() {
  return ScalarField(
      2, [](const Vector& x) { return std::exp(-x.squaredNorm()); }, {},
      [](const Vector& x) { return Vector(-2.0 * std::exp(-x.squaredNorm()) * x); },
      [](const Vector& x) {
        const double e = std::exp(-x.squaredNorm());
        return Matrix(e * (4.0 * x * x.transpose() - 2.0 * Matrix::Identity(2, 2)));
      },
      "gaussian");
}

ScalarField wave_mix() {
  return ScalarField(
      2,
      [](const Vector& v) { return std::sin(v(0)) * std::cos(v(1)) + v(0) * v(1) * v(1); }, {},
      [](const Vector& v) {
        Vector g(2);
        g << std::cos(v(0)) * std::cos(v(1)) + v(1) * v(1),
            -std::sin(v(0)) * std::sin(v(1)) + 2.0 * v(0) * v(1);
        return g;
      },
      [](const Vector& v) {
        Matrix h(2, 2);
        const double qx = -std::cos(v(0)) * std::sin(v(1)) + 2.0 * v(1);
        h << -std::sin(v(0)) * std::cos(v(1)), qx, qx, -std::sin(v(0)) * std::cos(v(1)) + 2.0 * v(0);
        return h;
      },
      "wave_mix");
}

std::vector<ScalarField> all() { return {sine(), cosine(), exponential(), gaussian(), wave_mix()}; }

}  // namespace catalog_fields

}  // namespace lagfront
