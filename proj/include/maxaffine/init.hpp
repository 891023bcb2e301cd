#pragma once

#include <cstdint>

#include "maxaffine/model.hpp"

namespace maxaffine {

/// Radius specification for oracle starting points: each block of the start
/// is placed within distance kappa * rho of the corresponding truth block.
/// rho is restricted to (0, 1/4].
struct NeighborhoodSpec {
  double rho = 0.1;
  double kappa = 0.0;

  double per_block_radius() const { return kappa * rho; }
  void validate() const;
};

/// Truth-anchored starting point: every block is the truth block plus a
/// vector with uniform direction and uniform radius at most kappa * rho.
ModelParams perturb_init(const ModelParams& truth, const NeighborhoodSpec& spec,
                         std::uint64_t seed);

/// Truth-free starting point from second-moment statistics: the slope
/// subspace is estimated from the top eigenvectors of
///   (1/n) sum_i y_i x_i x_i^T  -  mean(y) * I,
/// then k blocks are seeded by alternating per-cell least squares inside the
/// reduced subspace and lifted back. Deterministic given the data. Requires
/// n >= k(d+1); throws InitializationError when the sample covariance has
/// rank below k.
ModelParams moment_init(const Dataset& data, int k);

}  // namespace maxaffine
