#pragma once

#include <span>

#include "maxaffine/model.hpp"

namespace maxaffine {

/// Subgradient of the mean-squared loss, one row per parameter block.
/// Same shape as ModelParams.
struct Gradient {
  int k = 0;
  int d = 0;
  RowMatrix blocks;  // k x (d+1)

  Gradient() = default;
  Gradient(int k_, int d_) : k(k_), d(d_), blocks(RowMatrix::Zero(k_, d_ + 1)) {}

  Eigen::VectorXd to_vector() const;
  double norm() const { return blocks.norm(); }
};

/// Mean-squared loss (1/2n) sum_i (y_i - max_j <xi_i, block_j>)^2.
///
/// The parallel kernel accumulates per-sample terms into fixed-size blocks
/// and combines the block partials by a pairwise tree in a fixed order, so
/// the result is bit-identical for every thread count.
double loss(const ModelParams& params, const Dataset& data);
double loss_serial(const ModelParams& params, const Dataset& data);

/// Subgradient of the loss. Block j collects (1/n) sum over samples assigned
/// to cell j of residual * [x_i; 1]; at ties the smallest maximizing index
/// receives the sample, matching assign_cells. Deterministic block-pairwise
/// accumulation as in loss().
Gradient gradient(const ModelParams& params, const Dataset& data);
Gradient gradient_serial(const ModelParams& params, const Dataset& data);

/// Gradient of the single-sample loss (1/2)(y_i - max_j <xi_i, block_j>)^2.
/// Nonzero only in the row of the assigned cell.
Gradient sample_gradient(const ModelParams& params, const Dataset& data, long i);

/// Mean of single-sample gradients over a multiset of indices; duplicates
/// count with multiplicity. With batch = (0, 1, ..., n-1) this reproduces
/// gradient() bit-for-bit.
Gradient minibatch_gradient(const ModelParams& params, const Dataset& data,
                            std::span<const long> batch);

/// Loss and gradient from one fused pass; used by the solvers.
double loss_and_gradient(const ModelParams& params, const Dataset& data, Gradient& grad);

}  // namespace maxaffine
