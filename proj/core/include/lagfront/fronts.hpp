#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "lagfront/continuation.hpp"
#include "lagfront/genfam.hpp"
#include "lagfront/geometry.hpp"

namespace lagfront {

struct SourcedPoint {
  Vector x;
  Vector q;
};

struct TracedChain {
  std::vector<SourcedPoint> points;
  bool closed = false;

  Polyline polyline() const;
};

struct FrontCurve : TracedChain {
  double t = 0.0;
  std::string branch;
};

struct ChainSet {
  std::vector<TracedChain> chains;
  std::size_t rejected_seeds = 0;

  std::vector<Polyline> polylines() const;
  std::size_t point_count() const;
};

struct TraceOptions {
  double step = 0.02;
  std::size_t max_points = 20000;
  double rank_epsilon = kDefaultRankEpsilon;
};

struct FrontResult {
  std::vector<FrontCurve> curves;
  std::size_t rejected_seeds = 0;
  std::vector<std::string> errors;  // one message per rejected seed
};

// Tensor grid with `per_axis` points over a bounded box.
std::vector<Vector> box_grid(const Box& box, std::size_t per_axis);

// (F - t, dF/dq) as a system in (q, x).
FieldSystem level_system(const GeneratingFamily& fam, double t);

// W_t: the x-projection of {F = t, dF/dq = 0}. Seeds are (q, x) points that
// are first projected onto the level set. For n = 2 each component is traced
// into an ordered curve; for n = 3 each seed yields one point (x1, x2 frozen)
// and all points come back as a single unordered curve.
FrontResult momentary_front(const GraphLikeFamily& gl, double t, const std::vector<Vector>& seeds,
                            const TraceOptions& options = {});

// Momentary fronts stacked over t_range; `seeds(t)` supplies seeds per level.
FrontResult big_front(const GraphLikeFamily& gl, const Range& t_range,
                      const std::function<std::vector<Vector>(double)>& seeds,
                      const TraceOptions& options = {});

// Cusps of a traced n = 2 front: direction reversals of the x-projection,
// each refined by bisection on the level curve's tangent.
std::vector<SourcedPoint> front_cusps(const GeneratingFamily& fam, const FrontCurve& curve,
                                      const TraceOptions& options = {});

// (dF/dq, det d2F/dq2) as a system in (q, x). Exact for polynomial families.
FieldSystem caustic_system(const GeneratingFamily& fam);

// Caustic curves of an n = 2 family traced from seeds in (q, x).
ChainSet caustic(const GeneratingFamily& fam, const std::vector<Vector>& seeds,
                 const TraceOptions& options = {});

// Degenerate critical points reached from the seeds by least-norm Newton,
// deduplicated; works for any n.
std::vector<SourcedPoint> caustic_points(const GeneratingFamily& fam,
                                         const std::vector<Vector>& seeds);

struct MaxwellPoint {
  Vector x;
  Vector q;
  Vector q2;
};

struct MaxwellResult {
  std::vector<MaxwellPoint> points;              // every refined or traced point
  std::vector<std::vector<MaxwellPoint>> chains;  // n = 2 traced curves

  std::vector<Polyline> polylines() const;
};

// Pairs of distinct critical points with equal critical values. Candidates
// come from solve_critical_set on x_grid (cell_size is the grid spacing); each
// is refined by Newton on (dF/dq(q,x), dF/dq(q',x), F(q,x) - F(q',x)). For
// n = 2 the refined points seed curve tracing of the pairing system.
MaxwellResult maxwell_set(const GeneratingFamily& fam, const std::vector<Vector>& x_grid,
                          const std::vector<Vector>& q_seeds, double cell_size,
                          const TraceOptions& options = {});

// Self-intersections of one momentary front (all its curves share one t),
// refined to exact pairs of critical points with F = t at a common x.
std::vector<MaxwellPoint> front_self_intersections(const GeneratingFamily& fam,
                                                   const std::vector<FrontCurve>& curves);

// Samples of the big front whose front projection has full rank while the
// space projection is rank deficient (relative singular value < tolerance).
std::vector<Vector> delta_set(const GraphLikeFamily& gl, const std::vector<CriticalPoint>& samples,
                              double tolerance = 1e-6);

struct DiscriminantDecomposition {
  ChainSet caustic;
  MaxwellResult maxwell;
  std::vector<Vector> delta;
};

struct DiscriminantInput {
  std::vector<Vector> caustic_seeds;  // (q, x)
  std::vector<Vector> x_grid;
  std::vector<Vector> q_seeds;
  double cell_size = 0.05;
  TraceOptions trace;
};

// Caustic, Maxwell set and Delta of a graph-like family. Throws
// DeltaNonEmptyForGraphLike if Delta is not empty.
DiscriminantDecomposition discriminant(const GraphLikeFamily& gl, const DiscriminantInput& input);

}  // namespace lagfront
