#pragma once

#include <Eigen/Dense>
#include <vector>

#include "maxaffine/errors.hpp"

namespace maxaffine {

// Samples are streamed row-by-row in every kernel, so row-major storage keeps
// each sample contiguous.
using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Parameters of a k-piece max-affine model in d covariate dimensions.
/// Row j of `blocks` holds the j-th piece as [slope (d entries), offset].
/// The model value at x is the maximum over pieces of <x, slope_j> + offset_j.
struct ModelParams {
  int k = 0;
  int d = 0;
  RowMatrix blocks;  // k x (d+1)

  ModelParams() = default;
  ModelParams(int k_, int d_) : k(k_), d(d_), blocks(RowMatrix::Zero(k_, d_ + 1)) {}

  Eigen::Ref<const Eigen::RowVectorXd> block(int j) const { return blocks.row(j); }
  auto slope(int j) const { return blocks.row(j).head(d); }
  double offset(int j) const { return blocks(j, d); }

  /// Stacked k(d+1) parameter vector, block after block.
  Eigen::VectorXd to_vector() const;
  static ModelParams from_vector(int k, int d, const Eigen::VectorXd& v);

  /// Euclidean norm of the stacked parameter vector.
  double norm() const { return blocks.norm(); }

  void validate() const;
};

/// Observations: n covariate rows, responses, and the noise level used at
/// generation time (0 for noiseless data). `noise` keeps the realized noise
/// values y_i - model(x_i) when the dataset was synthesized with sigma > 0;
/// it is empty otherwise and is never required by any estimator.
struct Dataset {
  long n = 0;
  int d = 0;
  RowMatrix covariates;       // n x d
  Eigen::VectorXd responses;  // n
  double sigma = 0.0;
  Eigen::VectorXd noise;      // n when retained, else 0

  void validate() const;
};

/// Assignment of each sample to the affine piece attaining the maximum,
/// ties resolved to the smallest index. Cells partition the sample set.
struct Partition {
  std::vector<int> assignment;      // n entries in [0, k)
  std::vector<long> cell_counts;    // k entries summing to n
};

/// Model value at a single covariate vector.
double predict(const ModelParams& params, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Index of the maximizing piece at x, smallest index on ties.
int maximizing_piece(const ModelParams& params, const Eigen::Ref<const Eigen::RowVectorXd>& x);

/// Per-sample maximizing-piece assignment over a dataset (OpenMP kernel).
Partition assign_cells(const ModelParams& params, const Dataset& data);

/// Serial reference implementation of assign_cells, kept for testing and
/// benchmarking the parallel kernel.
Partition assign_cells_serial(const ModelParams& params, const Dataset& data);

/// r_i = max_j <[x_i; 1], block_j> - y_i for every sample.
Eigen::VectorXd max_residuals(const ModelParams& params, const Dataset& data);

namespace detail {
void check_dims(const ModelParams& params, const Dataset& data);
}

}  // namespace maxaffine
