#include "lagfront/linalg.hpp"

#include <cmath>

#include "lagfront/errors.hpp"

namespace lagfront {

Vector singular_values(const Matrix& m) {
  if (m.size() == 0) return Vector();
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues();
}

std::size_t numerical_rank(const Matrix& m, double eps) {
  const Vector s = singular_values(m);
  if (s.size() == 0 || s(0) == 0.0) return 0;
  std::size_t rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > eps * s(0)) ++rank;
  }
  return rank;
}

double relative_sigma_min(const Matrix& m) {
  const Vector s = singular_values(m);
  if (s.size() == 0 || s(0) == 0.0) return 0.0;
  return s(s.size() - 1) / s(0);
}

Matrix null_space(const Matrix& m, double eps) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const Vector s = svd.singularValues();
  std::size_t rank = 0;
  if (s.size() > 0 && s(0) > 0.0) {
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      if (s(i) > eps * s(0)) ++rank;
    }
  }
  const Matrix& v = svd.matrixV();
  return v.rightCols(v.cols() - static_cast<Eigen::Index>(rank));
}

Vector least_norm_solve(const Matrix& m, const Vector& rhs) {
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(m);
  return cod.solve(rhs);
}

bool box_contains(const Box& box, const Vector& p) {
  if (box.empty()) return true;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!box[static_cast<std::size_t>(i)].contains(p(i))) return false;
  }
  return true;
}

Box unbounded_box(std::size_t dim) { return Box(dim); }

std::vector<double> Range::values() const {
  if (!(step > 0.0) || !std::isfinite(lo) || !std::isfinite(hi) || hi < lo) {
    throw DomainError("invalid range");
  }
  std::vector<double> out;
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 0.5));
  for (std::size_t i = 0; i <= count; ++i) {
    const double v = lo + static_cast<double>(i) * step;
    if (v > hi + 0.5 * step) break;
    out.push_back(v);
  }
  return out;
}

double GridAxis::at(std::size_t i) const {
  if (count <= 1) return 0.5 * (lo + hi);
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
}

std::vector<Vector> grid_points(const std::vector<GridAxis>& axes) {
  std::vector<Vector> out;
  if (axes.empty()) return out;
  std::size_t total = 1;
  for (const auto& a : axes) total *= std::max<std::size_t>(a.count, 1);
  out.reserve(total);
  std::vector<std::size_t> idx(axes.size(), 0);
  for (std::size_t n = 0; n < total; ++n) {
    Vector p(static_cast<Eigen::Index>(axes.size()));
    for (std::size_t d = 0; d < axes.size(); ++d) p(static_cast<Eigen::Index>(d)) = axes[d].at(idx[d]);
    out.push_back(std::move(p));
    for (std::size_t d = axes.size(); d-- > 0;) {
      if (++idx[d] < std::max<std::size_t>(axes[d].count, 1)) break;
      idx[d] = 0;
    }
  }
  return out;
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  const GridAxis axis{lo, hi, count};
  std::vector<double> v;
  for (std::size_t i = 0; i < count; ++i) v.push_back(axis.at(i));
  return v;
}

}  // namespace lagfront
