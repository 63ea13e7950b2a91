#include "lagfront/continuation.hpp"

#include <algorithm>
#include <cmath>

#include "lagfront/errors.hpp"

namespace lagfront {

namespace {

constexpr double kCorrectorTolerance = 1e-10;
constexpr int kCorrectorIterations = 12;
constexpr double kMinStepFraction = 1.0 / 64.0;

// Difference a - b with periodic coordinates wrapped into [-P/2, P/2).
Vector wrapped_difference(const Vector& a, const Vector& b, const std::vector<double>& periods) {
  Vector d = a - b;
  for (std::size_t i = 0; i < periods.size() && static_cast<Eigen::Index>(i) < d.size(); ++i) {
    const double p = periods[i];
    if (p > 0.0) d(static_cast<Eigen::Index>(i)) -= p * std::floor(d(static_cast<Eigen::Index>(i)) / p + 0.5);
  }
  return d;
}

double point_segment_distance(const Vector& p, const Vector& a, const Vector& b) {
  const Vector ab = b - a;
  const double len2 = ab.squaredNorm();
  const double s = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (a + s * ab - p).norm();
}

// Newton on [system(y); tangent . (y - prev) - h] = 0 from the predictor.
bool correct(const FieldSystem& system, const Vector& prev, const Vector& tangent, double h,
             Vector& out) {
  const Eigen::Index m = prev.size();
  Vector y = prev + h * tangent;
  for (int iter = 0; iter < kCorrectorIterations; ++iter) {
    const Vector g = evaluate_system(system, y);
    const double arc = tangent.dot(y - prev) - h;
    if (inf_norm(g) < kCorrectorTolerance && std::abs(arc) < kCorrectorTolerance * std::max(1.0, h)) {
      if ((y - prev).norm() > 2.0 * h) return false;
      out = std::move(y);
      return true;
    }
    Matrix a(m, m);
    a.topRows(m - 1) = system_jacobian(system, y);
    a.row(m - 1) = tangent.transpose();
    Vector rhs(m);
    rhs.head(m - 1) = -g;
    rhs(m - 1) = -arc;
    Eigen::ColPivHouseholderQR<Matrix> qr(a);
    qr.setThreshold(1e-13);
    if (qr.rank() < m) return false;
    y += qr.solve(rhs);
    if (!y.allFinite()) return false;
  }
  return false;
}

struct DirectionTrace {
  std::vector<Vector> points;
  ChainEnd end = ChainEnd::kMaxPoints;
};

DirectionTrace trace(const FieldSystem& system, const Vector& seed, Vector tangent,
                     const ContinuationOptions& options, bool detect_closure) {
  DirectionTrace out;
  out.points.push_back(seed);
  double h = options.step;
  const double min_step = options.step * kMinStepFraction;
  while (out.points.size() < options.max_points) {
    const Vector& prev = out.points.back();
    Vector next;
    bool ok = false;
    bool left_domain = false;
    try {
      ok = correct(system, prev, tangent, h, next);
    } catch (const DomainError&) {
      left_domain = true;
    }
    if (!ok) {
      h *= 0.5;
      if (h < min_step) {
        out.end = left_domain ? ChainEnd::kBoxExit : ChainEnd::kStalled;
        return out;
      }
      continue;
    }
    if (!box_contains(options.box, next) || (options.inside && !options.inside(next))) {
      out.end = ChainEnd::kBoxExit;
      return out;
    }
    const Vector shifted = seed + wrapped_difference(prev, seed, options.periods);
    if (detect_closure && out.points.size() >= 10 &&
        point_segment_distance(seed, shifted, shifted + (next - prev)) < 0.5 * options.step) {
      out.end = ChainEnd::kClosed;
      return out;
    }
    Vector next_tangent;
    try {
      next_tangent = curve_tangent(system, next, options.rank_epsilon);
    } catch (const Error&) {
      // Singular point of the curve: continue along the secant.
      next_tangent = (next - prev).normalized();
    }
    if (next_tangent.dot(tangent) < 0.0) next_tangent = -next_tangent;
    out.points.push_back(std::move(next));
    tangent = std::move(next_tangent);
    h = std::min(options.step, 2.0 * h);
  }
  out.end = ChainEnd::kMaxPoints;
  return out;
}

}  // namespace

Vector curve_tangent(const FieldSystem& system, const Vector& point, double rank_epsilon) {
  const Eigen::Index m = point.size();
  if (static_cast<Eigen::Index>(system.size()) != m - 1) {
    throw DomainError("curve tracing needs m-1 equations in R^m");
  }
  const Matrix j = system_jacobian(system, point);
  Eigen::JacobiSVD<Matrix> svd(j, Eigen::ComputeFullV);
  const Vector s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0 || s(s.size() - 1) <= rank_epsilon * s(0)) {
    throw RankDeficientSeed("Jacobian rank is below m-1");
  }
  return svd.matrixV().col(m - 1);
}

CurveChain continue_curve(const FieldSystem& system, const Vector& seed,
                          const ContinuationOptions& options) {
  if (!(options.step > 0.0)) throw DomainError("continuation step must be positive");
  double residual = 0.0;
  try {
    residual = inf_norm(evaluate_system(system, seed));
  } catch (const DomainError& e) {
    throw SeedNotOnCurve(std::string("seed is not evaluable: ") + e.what());
  }
  if (!(residual <= options.seed_tolerance)) {
    throw SeedNotOnCurve("seed residual " + std::to_string(residual));
  }
  const Vector tangent = curve_tangent(system, seed, options.rank_epsilon);

  CurveChain chain;
  DirectionTrace forward = trace(system, seed, tangent, options, true);
  chain.forward_end = forward.end;
  chain.closed = forward.end == ChainEnd::kClosed;
  if (chain.closed || !options.both_directions) {
    chain.points = std::move(forward.points);
    chain.backward_end = forward.end;
    return chain;
  }
  DirectionTrace backward = trace(system, seed, -tangent, options, false);
  chain.backward_end = backward.end;
  chain.points.reserve(forward.points.size() + backward.points.size());
  for (auto it = backward.points.rbegin(); it + 1 != backward.points.rend(); ++it) {
    chain.points.push_back(*it);
  }
  for (auto& p : forward.points) chain.points.push_back(std::move(p));
  return chain;
}

}  // namespace lagfront
