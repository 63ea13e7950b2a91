#include "lagfront/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lagfront/errors.hpp"

namespace lagfront {

std::vector<std::pair<std::size_t, std::size_t>> find_reversals(const Polyline& line) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  if (line.size() < 3) return out;
  const std::size_t segments = line.size() - 1;
  auto seg = [&](std::size_t i) -> Vector { return line[i + 1] - line[i]; };
  for (std::size_t i = 0; i + 1 < segments; ++i) {
    std::size_t hi = 0;
    if (seg(i).dot(seg(i + 1)) < 0.0) {
      hi = i + 2;
    } else if (i + 2 < segments && seg(i).dot(seg(i + 2)) < 0.0) {
      hi = i + 3;
    } else {
      continue;
    }
    if (!out.empty() && i <= out.back().second) {
      out.back().second = std::max(out.back().second, hi);
    } else {
      out.emplace_back(i, hi);
    }
  }
  return out;
}

double refine_reversal(const std::function<Vector(double)>& velocity, double a, double b,
                       const Vector& direction, double tolerance) {
  double ga = velocity(a).dot(direction);
  const double gb = velocity(b).dot(direction);
  if (ga * gb > 0.0) throw DomainError("reversal is not bracketed");
  while (std::abs(b - a) > tolerance) {
    const double mid = 0.5 * (a + b);
    const double gm = velocity(mid).dot(direction);
    if (gm == 0.0) return mid;
    if ((gm > 0.0) == (ga > 0.0)) {
      a = mid;
      ga = gm;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

namespace {

double cross2(const Vector& a, const Vector& b) { return a(0) * b(1) - a(1) * b(0); }

bool disjoint_boxes(const Vector& p0, const Vector& p1, const Vector& q0, const Vector& q1) {
  return std::max(q0(0), q1(0)) < std::min(p0(0), p1(0)) ||
         std::min(q0(0), q1(0)) > std::max(p0(0), p1(0)) ||
         std::max(q0(1), q1(1)) < std::min(p0(1), p1(1)) ||
         std::min(q0(1), q1(1)) > std::max(p0(1), p1(1));
}

// Crossing point of open segments p0p1 and q0q1, if any.
bool segment_crossing(const Vector& p0, const Vector& p1, const Vector& q0, const Vector& q1,
                      Vector& out) {
  if (disjoint_boxes(p0, p1, q0, q1)) return false;
  const Vector r = p1 - p0;
  const Vector s = q1 - q0;
  const double denom = cross2(r, s);
  if (denom == 0.0) return false;
  const double a = cross2(q0 - p0, s) / denom;
  const double b = cross2(q0 - p0, r) / denom;
  if (a > 0.0 && a < 1.0 && b > 0.0 && b < 1.0) {
    out = p0 + a * r;
    return true;
  }
  return false;
}

}  // namespace

std::vector<Crossing> self_intersections(const Polyline& line, bool closed) {
  std::vector<Crossing> out;
  const std::size_t n = line.size();
  if (n < 4) return out;
  const std::size_t segments = closed ? n : n - 1;
  Vector point;
  for (std::size_t i = 0; i < segments; ++i) {
    for (std::size_t j = i + 2; j < segments; ++j) {
      if (closed && i == 0 && j == segments - 1) continue;
      if (segment_crossing(line[i], line[(i + 1) % n], line[j], line[(j + 1) % n], point)) {
        out.push_back({point, i, j});
      }
    }
  }
  return out;
}

std::vector<Crossing> mutual_intersections(const Polyline& a, const Polyline& b) {
  std::vector<Crossing> out;
  Vector point;
  for (std::size_t i = 0; i + 1 < a.size(); ++i) {
    for (std::size_t j = 0; j + 1 < b.size(); ++j) {
      if (segment_crossing(a[i], a[i + 1], b[j], b[j + 1], point)) out.push_back({point, i, j});
    }
  }
  return out;
}

double point_segment_distance(const Vector& p, const Vector& a, const Vector& b) {
  const Vector ab = b - a;
  const double len2 = ab.squaredNorm();
  const double s = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (a + s * ab - p).norm();
}

double distance_to_polylines(const Vector& p, const std::vector<Polyline>& lines) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& line : lines) {
    if (line.size() == 1) best = std::min(best, (line[0] - p).norm());
    for (std::size_t i = 0; i + 1 < line.size(); ++i) {
      best = std::min(best, point_segment_distance(p, line[i], line[i + 1]));
    }
  }
  return best;
}

double hausdorff_distance(const std::vector<Polyline>& a, const std::vector<Polyline>& b) {
  double worst = 0.0;
  for (const auto& line : a) {
    for (const auto& p : line) worst = std::max(worst, distance_to_polylines(p, b));
  }
  for (const auto& line : b) {
    for (const auto& p : line) worst = std::max(worst, distance_to_polylines(p, a));
  }
  return worst;
}

}  // namespace lagfront
