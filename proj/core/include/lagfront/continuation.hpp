#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "lagfront/field.hpp"

namespace lagfront {

enum class ChainEnd { kBoxExit, kClosed, kMaxPoints, kStalled };

struct ContinuationOptions {
  double step = 0.05;
  std::size_t max_points = 10000;
  Box box;                       // empty: unbounded
  bool both_directions = false;  // also trace backwards from the seed
  double seed_tolerance = 1e-8;  // residual allowed at the seed
  double rank_epsilon = kDefaultRankEpsilon;
  // Per-coordinate periods (0 or missing: not periodic), used for closure.
  std::vector<double> periods;
  // Extra admissibility test; a rejected point ends the chain like a box exit.
  std::function<bool(const Vector&)> inside;
};

struct CurveChain {
  std::vector<Vector> points;
  bool closed = false;
  ChainEnd forward_end = ChainEnd::kMaxPoints;
  ChainEnd backward_end = ChainEnd::kMaxPoints;
};

// Unit tangent of the solution curve of an (m-1)-equation system in R^m: the
// null vector of its Jacobian. Throws RankDeficientSeed if the Jacobian rank
// is below m-1.
Vector curve_tangent(const FieldSystem& system, const Vector& point,
                     double rank_epsilon = kDefaultRankEpsilon);

// Pseudo-arclength predictor-corrector tracing of the one-dimensional solution
// set of `system` (m-1 equations in R^m) from `seed`. The tangent sign is
// kept continuous along the chain. Tracing stops on leaving the box, on
// closure (returning within step/2 of the seed after at least 10 points) or
// after max_points points.
//
// Throws SeedNotOnCurve or RankDeficientSeed.
CurveChain continue_curve(const FieldSystem& system, const Vector& seed,
                          const ContinuationOptions& options);

}  // namespace lagfront
