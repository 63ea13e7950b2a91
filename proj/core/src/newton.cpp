#include "lagfront/newton.hpp"

#include <algorithm>
#include <string>

#include "lagfront/errors.hpp"

namespace lagfront {

Vector newton_solve(const FieldSystem& system, const Vector& seed,
                    const std::vector<std::size_t>& frozen, const NewtonOptions& options) {
  const auto m = static_cast<std::size_t>(seed.size());
  std::vector<Eigen::Index> free;
  for (std::size_t i = 0; i < m; ++i) {
    if (std::find(frozen.begin(), frozen.end(), i) == frozen.end()) {
      free.push_back(static_cast<Eigen::Index>(i));
    }
  }
  if (system.size() > free.size()) {
    throw DomainError("system has " + std::to_string(system.size()) + " equations but only " +
                      std::to_string(free.size()) + " free unknowns");
  }

  Vector x = seed;
  Vector r = evaluate_system(system, x);
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    if (inf_norm(r) < options.tolerance) return x;

    const Matrix full = system_jacobian(system, x);
    Matrix j(full.rows(), static_cast<Eigen::Index>(free.size()));
    for (std::size_t c = 0; c < free.size(); ++c) j.col(static_cast<Eigen::Index>(c)) = full.col(free[c]);

    const Vector s = singular_values(j);
    if (s.size() == 0 || s(0) == 0.0 || s(s.size() - 1) < options.singular_ratio * s(0)) {
      throw SingularJacobian("Jacobian is numerically singular at iteration " + std::to_string(iter));
    }
    const Vector delta = least_norm_solve(j, -r);

    // Backtrack when the full step leaves the domain.
    double scale = 1.0;
    for (int attempt = 0;; ++attempt) {
      Vector trial = x;
      for (std::size_t c = 0; c < free.size(); ++c) {
        trial(free[c]) += scale * delta(static_cast<Eigen::Index>(c));
      }
      try {
        r = evaluate_system(system, trial);
        x = std::move(trial);
        break;
      } catch (const DomainError&) {
        if (attempt >= 10) throw;
        scale *= 0.5;
      }
    }
  }
  if (inf_norm(r) < options.tolerance) return x;
  throw MaxIterations("no convergence after " + std::to_string(options.max_iterations) +
                      " iterations (residual " + std::to_string(inf_norm(r)) + ")");
}

}  // namespace lagfront
