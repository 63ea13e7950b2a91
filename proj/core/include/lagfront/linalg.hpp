#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <limits>
#include <vector>

namespace lagfront {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kDefaultRankEpsilon = 1e-8;

// Singular values in descending order.
Vector singular_values(const Matrix& m);

// Count of singular values strictly above eps * sigma_max. The zero matrix
// (and any empty matrix) has rank 0.
std::size_t numerical_rank(const Matrix& m, double eps = kDefaultRankEpsilon);

// Smallest singular value divided by the largest (0 for a zero matrix). For a
// wide matrix this is sigma_min over its min(rows, cols) singular values.
double relative_sigma_min(const Matrix& m);

// Orthonormal basis (as columns) of the numerical null space.
Matrix null_space(const Matrix& m, double eps = kDefaultRankEpsilon);

// Minimum-norm least-squares solution of m * x = rhs.
Vector least_norm_solve(const Matrix& m, const Vector& rhs);

inline double inf_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double v) const { return v >= lo && v <= hi; }
  double width() const { return hi - lo; }
};

// Axis-aligned box; an empty box means "unbounded in every coordinate".
using Box = std::vector<Interval>;

bool box_contains(const Box& box, const Vector& p);
Box unbounded_box(std::size_t dim);

// Evenly spaced closed range lo:hi:step (hi included when it lies on the
// lattice, up to a half-step tolerance).
struct Range {
  double lo = 0.0;
  double hi = 0.0;
  double step = 1.0;

  std::vector<double> values() const;
};

// Tensor grid with `count` points per axis spanning [lo, hi]; points are
// returned in lexicographic order with the last axis varying fastest.
struct GridAxis {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 1;

  double at(std::size_t i) const;
};
std::vector<Vector> grid_points(const std::vector<GridAxis>& axes);
std::vector<double> linspace(double lo, double hi, std::size_t count);

}  // namespace lagfront
