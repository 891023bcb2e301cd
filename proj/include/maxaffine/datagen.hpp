#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "maxaffine/model.hpp"

namespace maxaffine {

/// Covariate distributions used to synthesize observations. Each choice is
/// sub-Gaussian with a polynomial small-ball bound on affine marginals, so
/// the estimators' operating assumptions hold for all of them.
///   - standard_gaussian: iid N(0, 1) coordinates.
///   - uniform_cube:      iid uniform, centered and scaled to unit variance
///                        per coordinate (support [-sqrt(3), sqrt(3)]).
///   - beta_iid:          iid Beta(a, b) coordinates on [0, 1], kept raw.
struct CovariateLaw {
  enum class Kind { StandardGaussian, UniformCube, BetaIid };

  Kind kind = Kind::StandardGaussian;
  int d = 1;
  double beta_a = 2.0;
  double beta_b = 2.0;

  static CovariateLaw standard_gaussian(int d);
  static CovariateLaw uniform_cube(int d);
  static CovariateLaw beta_iid(int d, double a, double b);

  std::string name() const;
  static CovariateLaw from_name(const std::string& name, int d, double a = 2.0, double b = 2.0);

  /// One covariate row drawn from this law.
  void sample_row(class Rng& rng, Eigen::Ref<Eigen::RowVectorXd> row) const;
};

/// Geometry of a ground-truth model under a covariate law: separation of the
/// slopes (exact) and Monte-Carlo estimates of the smallest/largest cell
/// probabilities with a 3-sigma binomial half-width.
struct GroundTruthGeometry {
  double pi_min = 0.0;
  double pi_max = 0.0;
  double kappa = 0.0;
  long mc_samples = 0;
  double ci_halfwidth = 0.0;
  std::vector<double> cell_freqs;  // one frequency per cell, counts / mc_samples
};

/// k pairwise-orthogonal unit slopes (requires k <= d), zero offsets.
/// The slope separation is sqrt(2) by construction.
ModelParams gen_truth_orthonormal(int k, int d, std::uint64_t seed);

/// k independent uniform unit-sphere slopes, zero offsets.
ModelParams gen_truth_sphere(int k, int d, std::uint64_t seed);

/// Synthetic observations: covariates iid from `law`, responses equal to the
/// model value plus iid Normal(0, sigma^2) noise. The realized noise vector
/// is retained on the dataset when sigma > 0.
Dataset gen_dataset(const ModelParams& truth, const CovariateLaw& law, long n, double sigma,
                    std::uint64_t seed);

/// Minimum pairwise distance between distinct slope vectors.
double min_slope_separation(const ModelParams& params);

/// Monte-Carlo estimate of the cell-probability range plus the exact slope
/// separation. Requires mc_samples >= 1000.
GroundTruthGeometry estimate_geometry(const ModelParams& truth, const CovariateLaw& law,
                                      long mc_samples, std::uint64_t seed);

}  // namespace maxaffine
