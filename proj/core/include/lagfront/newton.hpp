#pragma once

#include <cstddef>
#include <vector>

#include "lagfront/field.hpp"

namespace lagfront {

struct NewtonOptions {
  double tolerance = 1e-10;      // residual infinity norm
  int max_iterations = 50;
  double singular_ratio = 1e-12; // sigma_min / sigma_max below this is singular
};

// Newton iteration for system(p) = 0 over the non-frozen coordinates of
// `seed`. Under-determined steps take the minimum-norm update. Frozen
// coordinates are returned unchanged.
//
// Throws SingularJacobian, MaxIterations or DomainError.
Vector newton_solve(const FieldSystem& system, const Vector& seed,
                    const std::vector<std::size_t>& frozen = {},
                    const NewtonOptions& options = {});

}  // namespace lagfront
