#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "lagfront/field.hpp"
#include "lagfront/linalg.hpp"

namespace lagfront {

// y_t + sum a_i(x,y,t) y_{x_i} = b(x,y,t) with y(x,0) = phi(x). The
// coefficient fields take (x1..xn, y, t); phi takes (x1..xn). `box` bounds
// (x1..xn, y) for blow-up detection.
struct QuasiLinearPDE {
  std::size_t n = 1;
  std::vector<ScalarField> a;
  ScalarField b;
  ScalarField phi;
  Box box;

  // Variables x1..xn, y, t for coefficient expressions.
  static VariableSet coefficient_variables(std::size_t n);
};

namespace pde_catalog {

// a = 2y, b = 0.
QuasiLinearPDE burgers(ScalarField phi, Box box = {{-20.0, 20.0}, {-5.0, 5.0}});
// a = speed, b = 0.
QuasiLinearPDE transport(double speed, ScalarField phi, Box box = {{-20.0, 20.0}, {-5.0, 5.0}});
// a = x, b = 0: characteristics x0 e^t.
QuasiLinearPDE stretching_transport(ScalarField phi, Box box = {{-100.0, 100.0}, {-5.0, 5.0}});

}  // namespace pde_catalog

struct StripSample {
  double t = 0.0;
  Vector x;
  double y = 0.0;
  Matrix dx_dx0;  // n x n
  Vector dy_dx0;  // n

  double jacobian_det() const { return dx_dx0.determinant(); }
};

struct CharacteristicStrip {
  Vector x0;
  std::vector<StripSample> trajectory;
};

struct GeometricSolutionSheet {
  QuasiLinearPDE pde;
  std::vector<double> times;
  std::vector<CharacteristicStrip> strips;
  double dt = 0.0;

  // min over strips of det(dx/dx0) at each stored time.
  std::vector<double> min_jacobian_det() const;
  std::size_t time_index(double t) const;
};

// Fixed-step RK4 of x' = a, y' = b together with the variational equations for
// dx/dx0 and dy/dx0. Stores every step. Throws BlowUp when |x| or |y| exceeds
// ten times the PDE box.
GeometricSolutionSheet integrate_characteristics(const QuasiLinearPDE& pde,
                                                 const std::vector<Vector>& x0_grid,
                                                 Interval t_range, double dt = 1e-3);

// First time at which det(dx/dx0) of some strip reaches zero, refined inside
// the bracketing step by bisection on re-integrated sub-steps.
std::optional<double> breaking_time(const GeometricSolutionSheet& sheet, double tolerance = 1e-9);

// Number of strips' positions x(x0, t) equal to x_hat (n = 1), counted by
// sign changes of x - x_hat along the ordered x0 grid; exact zeros count once.
// t is snapped to the nearest stored time.
std::size_t multivalued_count(const GeometricSolutionSheet& sheet, double x_hat, double t);

// max |f_t + sum a_i f_{x_i} + b f_y| over samples (x, y, t) of S = {f = 0}.
double tangency_check(const QuasiLinearPDE& pde, const ScalarField& f,
                      const std::vector<Vector>& samples);

// n = 1: the solution surface f(x, y, t) = y - Y(x, t) reconstructed from the
// sheet by bicubic Hermite interpolation in (x0, t), valid while no strip has
// folded. Closed-form gradient. Throws DomainError if the window contains a
// fold.
ScalarField solution_surface(const GeometricSolutionSheet& sheet, Interval t_window);

}  // namespace lagfront
