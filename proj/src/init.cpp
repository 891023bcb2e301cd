#include "maxaffine/init.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "maxaffine/rng.hpp"
#include "maxaffine/solvers.hpp"

namespace maxaffine {

void NeighborhoodSpec::validate() const {
  if (!(rho > 0.0) || rho > 0.25) throw InputError("rho must lie in (0, 1/4]");
  if (kappa < 0.0) throw InputError("kappa must be nonnegative");
}

ModelParams perturb_init(const ModelParams& truth, const NeighborhoodSpec& spec,
                         std::uint64_t seed) {
  truth.validate();
  spec.validate();
  Rng rng(seed);
  ModelParams start = truth;
  const double radius = spec.per_block_radius();
  for (int j = 0; j < truth.k; ++j) {
    Eigen::RowVectorXd dir(truth.d + 1);
    double norm = 0.0;
    do {
      for (int c = 0; c <= truth.d; ++c) dir(c) = rng.gaussian();
      norm = dir.norm();
    } while (norm == 0.0);
    start.blocks.row(j) += (radius * rng.uniform() / norm) * dir;
  }
  return start;
}

namespace {

// Ordinary least squares of y on [x; 1] over a row subset, minimum-norm.
Eigen::VectorXd ols_fit(const RowMatrix& covariates, const Eigen::VectorXd& responses,
                        const std::vector<long>& rows) {
  const int d = static_cast<int>(covariates.cols());
  RowMatrix a(static_cast<long>(rows.size()), d + 1);
  Eigen::VectorXd y(static_cast<long>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    a.row(static_cast<long>(r)).head(d) = covariates.row(rows[r]);
    a(static_cast<long>(r), d) = 1.0;
    y(static_cast<long>(r)) = responses(rows[r]);
  }
  return a.completeOrthogonalDecomposition().solve(y);
}

}  // namespace

ModelParams moment_init(const Dataset& data, int k) {
  data.validate();
  if (k < 1) throw InputError("k must be at least 1");
  if (data.n < static_cast<long>(k) * (data.d + 1))
    throw InputError("moment initializer needs n >= k(d+1) samples");

  std::vector<long> all(static_cast<std::size_t>(data.n));
  std::iota(all.begin(), all.end(), 0L);

  if (k == 1) {
    ModelParams p(1, data.d);
    p.blocks.row(0) = ols_fit(data.covariates, data.responses, all).transpose();
    return p;
  }

  const double n_inv = 1.0 / static_cast<double>(data.n);
  const double y_mean = data.responses.mean();

  // Covariance rank check.
  Eigen::RowVectorXd x_mean = data.covariates.colwise().mean();
  Eigen::MatrixXd centered = data.covariates.rowwise() - x_mean;
  Eigen::MatrixXd cov = n_inv * centered.transpose() * centered;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> cov_eig(cov);
  const double cov_tol = 1e-12 * std::max(1.0, cov_eig.eigenvalues().maxCoeff());
  int rank = 0;
  for (int c = 0; c < data.d; ++c)
    if (cov_eig.eigenvalues()(c) > cov_tol) ++rank;
  if (rank < k) throw InitializationError("sample covariance rank below k");

  // Response-weighted second moment, recentered by the mean response.
  Eigen::MatrixXd moment = n_inv * data.covariates.transpose() *
                               data.responses.asDiagonal() * Eigen::MatrixXd(data.covariates) -
                           y_mean * Eigen::MatrixXd::Identity(data.d, data.d);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(moment);

  // k eigenvectors of largest magnitude span the slope estimate.
  std::vector<int> order(static_cast<std::size_t>(data.d));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(eig.eigenvalues()(a)) > std::abs(eig.eigenvalues()(b));
  });
  Eigen::MatrixXd basis(data.d, k);
  for (int c = 0; c < k; ++c) basis.col(c) = eig.eigenvectors().col(order[static_cast<std::size_t>(c)]);

  // Reduced-space seeding: split samples into k groups by response level,
  // fit each group, then polish with a few alternating refits.
  Dataset reduced;
  reduced.n = data.n;
  reduced.d = k;
  reduced.covariates = data.covariates * basis;
  reduced.responses = data.responses;

  std::vector<long> by_response = all;
  std::sort(by_response.begin(), by_response.end(),
            [&](long a, long b) { return data.responses(a) < data.responses(b); });

  ModelParams reduced_params(k, k);
  for (int j = 0; j < k; ++j) {
    const long lo = data.n * j / k;
    const long hi = data.n * (j + 1) / k;
    std::vector<long> group(by_response.begin() + lo, by_response.begin() + hi);
    reduced_params.blocks.row(j) = ols_fit(reduced.covariates, reduced.responses, group).transpose();
  }
  for (int round = 0; round < 30; ++round) {
    ModelParams next = am_step(reduced, reduced_params);
    const double delta = (next.blocks - reduced_params.blocks).norm();
    reduced_params = std::move(next);
    if (delta <= 1e-10) break;
  }

  ModelParams out(k, data.d);
  for (int j = 0; j < k; ++j) {
    out.blocks.row(j).head(data.d) =
        (basis * reduced_params.blocks.row(j).head(k).transpose()).transpose();
    out.blocks(j, data.d) = reduced_params.blocks(j, k);
  }
  return out;
}

}  // namespace maxaffine
