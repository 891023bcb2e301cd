#include "maxaffine/datagen.hpp"

#include <cmath>

#include "maxaffine/rng.hpp"

namespace maxaffine {

CovariateLaw CovariateLaw::standard_gaussian(int d) { return CovariateLaw{Kind::StandardGaussian, d}; }
CovariateLaw CovariateLaw::uniform_cube(int d) { return CovariateLaw{Kind::UniformCube, d}; }
CovariateLaw CovariateLaw::beta_iid(int d, double a, double b) {
  if (a <= 0.0 || b <= 0.0) throw InputError("beta law needs positive shape parameters");
  return CovariateLaw{Kind::BetaIid, d, a, b};
}

std::string CovariateLaw::name() const {
  switch (kind) {
    case Kind::StandardGaussian: return "standard_gaussian";
    case Kind::UniformCube: return "uniform_cube";
    case Kind::BetaIid: return "beta_iid";
  }
  return "unknown";
}

CovariateLaw CovariateLaw::from_name(const std::string& name, int d, double a, double b) {
  if (name == "standard_gaussian") return standard_gaussian(d);
  if (name == "uniform_cube") return uniform_cube(d);
  if (name == "beta_iid") return beta_iid(d, a, b);
  throw InputError("unknown covariate law: " + name);
}

void CovariateLaw::sample_row(Rng& rng, Eigen::Ref<Eigen::RowVectorXd> row) const {
  constexpr double kSqrt3 = 1.7320508075688772935;
  switch (kind) {
    case Kind::StandardGaussian:
      for (int c = 0; c < d; ++c) row(c) = rng.gaussian();
      break;
    case Kind::UniformCube:
      for (int c = 0; c < d; ++c) row(c) = kSqrt3 * (2.0 * rng.uniform() - 1.0);
      break;
    case Kind::BetaIid:
      for (int c = 0; c < d; ++c) row(c) = rng.beta(beta_a, beta_b);
      break;
  }
}

ModelParams gen_truth_orthonormal(int k, int d, std::uint64_t seed) {
  if (k > d) throw InputError("orthonormal truth requires k <= d");
  if (k < 1 || d < 1) throw InputError("invalid k or d");
  Rng rng(seed);
  Eigen::MatrixXd raw(d, k);
  for (int c = 0; c < k; ++c)
    for (int r = 0; r < d; ++r) raw(r, c) = rng.gaussian();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, k);
  // Fix the sign convention so the output is a deterministic function of the
  // Gaussian draw regardless of the QR implementation's internal choices.
  const Eigen::MatrixXd r_mat = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  for (int c = 0; c < k; ++c)
    if (r_mat(c, c) < 0.0) q.col(c) = -q.col(c);

  ModelParams truth(k, d);
  for (int j = 0; j < k; ++j) {
    truth.blocks.row(j).head(d) = q.col(j).transpose();
    truth.blocks(j, d) = 0.0;
  }
  return truth;
}

ModelParams gen_truth_sphere(int k, int d, std::uint64_t seed) {
  if (k < 1 || d < 1) throw InputError("invalid k or d");
  Rng rng(seed);
  ModelParams truth(k, d);
  for (int j = 0; j < k; ++j) {
    Eigen::RowVectorXd v(d);
    double norm = 0.0;
    do {
      for (int c = 0; c < d; ++c) v(c) = rng.gaussian();
      norm = v.norm();
    } while (norm == 0.0);
    truth.blocks.row(j).head(d) = v / norm;
    truth.blocks(j, d) = 0.0;
  }
  return truth;
}

Dataset gen_dataset(const ModelParams& truth, const CovariateLaw& law, long n, double sigma,
                    std::uint64_t seed) {
  truth.validate();
  if (law.d != truth.d) throw InputError("covariate law dimension does not match model");
  if (n < 1) throw InputError("dataset size must be positive");
  if (sigma < 0.0) throw InputError("noise level must be nonnegative");

  Rng rng(seed);
  Dataset data;
  data.n = n;
  data.d = truth.d;
  data.sigma = sigma;
  data.covariates.resize(n, truth.d);
  data.responses.resize(n);
  for (long i = 0; i < n; ++i) law.sample_row(rng, data.covariates.row(i));
  for (long i = 0; i < n; ++i) {
    const double value = predict(truth, data.covariates.row(i).transpose());
    data.responses(i) = (sigma > 0.0) ? value + sigma * rng.gaussian() : value;
  }
  if (sigma > 0.0) {
    // Store the noise as realized after rounding so that recomputing the
    // model values and subtracting reproduces it exactly.
    data.noise.resize(n);
    for (long i = 0; i < n; ++i)
      data.noise(i) = data.responses(i) - predict(truth, data.covariates.row(i).transpose());
  }
  return data;
}

double min_slope_separation(const ModelParams& params) {
  double kappa = std::numeric_limits<double>::infinity();
  for (int j = 0; j < params.k; ++j)
    for (int l = j + 1; l < params.k; ++l) {
      const double dist = (params.slope(j) - params.slope(l)).norm();
      if (dist < kappa) kappa = dist;
    }
  return params.k < 2 ? 0.0 : kappa;
}

GroundTruthGeometry estimate_geometry(const ModelParams& truth, const CovariateLaw& law,
                                      long mc_samples, std::uint64_t seed) {
  truth.validate();
  if (law.d != truth.d) throw InputError("covariate law dimension does not match model");
  if (mc_samples < 1000) throw InputError("geometry estimation needs at least 1000 samples");

  Rng rng(seed);
  std::vector<long> counts(static_cast<std::size_t>(truth.k), 0);
  Eigen::RowVectorXd row(truth.d);
  for (long s = 0; s < mc_samples; ++s) {
    law.sample_row(rng, row);
    ++counts[static_cast<std::size_t>(maximizing_piece(truth, row))];
  }

  GroundTruthGeometry geom;
  geom.kappa = min_slope_separation(truth);
  geom.mc_samples = mc_samples;
  geom.cell_freqs.resize(static_cast<std::size_t>(truth.k));
  long min_count = counts[0], max_count = counts[0];
  for (int j = 0; j < truth.k; ++j) {
    geom.cell_freqs[static_cast<std::size_t>(j)] =
        static_cast<double>(counts[static_cast<std::size_t>(j)]) / static_cast<double>(mc_samples);
    min_count = std::min(min_count, counts[static_cast<std::size_t>(j)]);
    max_count = std::max(max_count, counts[static_cast<std::size_t>(j)]);
  }
  geom.pi_min = static_cast<double>(min_count) / static_cast<double>(mc_samples);
  geom.pi_max = static_cast<double>(max_count) / static_cast<double>(mc_samples);
  // 3-sigma binomial half-width at the smallest-cell estimate.
  geom.ci_halfwidth =
      3.0 * std::sqrt(std::max(geom.pi_min * (1.0 - geom.pi_min), 1.0 / static_cast<double>(mc_samples)) /
                      static_cast<double>(mc_samples));
  return geom;
}

}  // namespace maxaffine
