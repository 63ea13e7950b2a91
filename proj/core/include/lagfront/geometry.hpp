#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "lagfront/linalg.hpp"

namespace lagfront {

using Polyline = std::vector<Vector>;

// Vertex windows [lo, hi] of a polyline across which the direction of travel
// reverses: segments one or two apart meet at more than pi/2. Overlapping
// windows are merged, so each reversal is reported once.
std::vector<std::pair<std::size_t, std::size_t>> find_reversals(const Polyline& line);

// Bisection for the parameter in [a, b] where velocity(s) . direction changes
// sign. `velocity` must be positive along `direction` at a and negative at b.
double refine_reversal(const std::function<Vector(double)>& velocity, double a, double b,
                       const Vector& direction, double tolerance = 1e-12);

struct Crossing {
  Vector point;
  std::size_t segment_a = 0;
  std::size_t segment_b = 0;
};

// Proper crossings between non-adjacent segments of a planar polyline. For a
// closed polyline the closing segment takes part too.
std::vector<Crossing> self_intersections(const Polyline& line, bool closed = false);

// Proper crossings between segments of two different polylines.
std::vector<Crossing> mutual_intersections(const Polyline& a, const Polyline& b);

double point_segment_distance(const Vector& p, const Vector& a, const Vector& b);
// Distance to the nearest vertex or segment of any of the polylines;
// +inf when there are none.
double distance_to_polylines(const Vector& p, const std::vector<Polyline>& lines);
// Symmetric Hausdorff distance between two polyline sets, measured from the
// vertices of each set to the segments of the other.
double hausdorff_distance(const std::vector<Polyline>& a, const std::vector<Polyline>& b);

}  // namespace lagfront
