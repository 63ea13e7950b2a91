#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lagfront/linalg.hpp"
#include "lagfront/poly.hpp"

namespace lagfront {

inline constexpr double kGradientStep = 1e-5;
// Second differences of values lose two orders of precision per step, so they
// use a coarser step than first differences.
inline constexpr double kHessianStep = 1e-4;

// An evaluable smooth real function on a box in R^m. Closed-form gradient and
// Hessian are optional; `grad` and `hessian` fall back to central differences.
// Immutable and cheap to copy.
class ScalarField {
 public:
  using ValueFn = std::function<double(const Vector&)>;
  using GradientFn = std::function<Vector(const Vector&)>;
  using HessianFn = std::function<Matrix(const Vector&)>;

  ScalarField() = default;
  ScalarField(std::size_t arity, ValueFn value, Box domain = {}, GradientFn gradient = {},
              HessianFn hessian = {}, std::string label = {});

  static ScalarField from_polynomial(Polynomial poly, Box domain = {}, std::string label = {});
  static ScalarField from_expression(const PolyExpr& expr, std::size_t arity, Box domain = {});
  static ScalarField constant(std::size_t arity, double value);

  std::size_t arity() const { return impl_->arity; }
  const Box& domain() const { return impl_->domain; }
  const std::string& label() const { return impl_->label; }
  bool has_closed_gradient() const { return static_cast<bool>(impl_->gradient); }
  bool has_closed_hessian() const { return static_cast<bool>(impl_->hessian); }
  // Non-null when the field is backed by an exact polynomial.
  const Polynomial* polynomial() const { return impl_->poly ? &*impl_->poly : nullptr; }

  // Checked evaluation: throws DomainError outside the box or on a non-finite
  // value.
  double operator()(const Vector& point) const;

  // Raw closed forms; call only when has_closed_*() is true.
  Vector closed_gradient(const Vector& point) const;
  Matrix closed_hessian(const Vector& point) const;

  ScalarField with_domain(Box domain) const;
  ScalarField with_label(std::string label) const;

  // The field's partial derivative in `variable`, itself a field. Exact for
  // polynomials; otherwise built from the best available derivative data.
  ScalarField partial(std::size_t variable) const;

  void check_in_domain(const Vector& point) const;

 private:
  struct Impl {
    std::size_t arity = 0;
    ValueFn value;
    GradientFn gradient;
    HessianFn hessian;
    Box domain;
    std::string label;
    std::optional<Polynomial> poly;
  };
  std::shared_ptr<const Impl> impl_;
};

// Gradient at `point`: closed form when available, else central differences
// with step kGradientStep * max(1, |p_i|). Throws DomainError when a stencil
// point leaves the domain.
Vector grad(const ScalarField& field, const Vector& point);

// Symmetric Hessian. Differenced Hessians are symmetrized as (H + H^T) / 2.
Matrix hessian(const ScalarField& field, const Vector& point);

// Central-difference versions, exposed for consistency checks against the
// closed forms.
Vector fd_gradient(const ScalarField& field, const Vector& point, double h = kGradientStep);
Matrix fd_hessian(const ScalarField& field, const Vector& point);

// A vector-valued map assembled component-wise from scalar fields.
using FieldSystem = std::vector<ScalarField>;

Vector evaluate_system(const FieldSystem& system, const Vector& point);
Matrix system_jacobian(const FieldSystem& system, const Vector& point);

// Fields with closed-form derivatives used for numerics hygiene checks.
namespace catalog_fields {

ScalarField sine();          // sin(q1)
ScalarField cosine();        // cos(q1)
ScalarField exponential();   // exp(q1)
ScalarField gaussian();      // exp(-(q1^2 + q2^2))
ScalarField wave_mix();      // sin(q1) * cos(x1) + q1 * x1^2

std::vector<ScalarField> all();

}  // namespace catalog_fields

}  // namespace lagfront
