#include "maxaffine/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "maxaffine/rng.hpp"

namespace maxaffine {
namespace {

Eigen::MatrixXd block_cost_matrix(const ModelParams& estimate, const ModelParams& truth) {
  Eigen::MatrixXd cost(truth.k, truth.k);
  for (int j = 0; j < truth.k; ++j)       // truth block
    for (int l = 0; l < truth.k; ++l)     // estimate block
      cost(j, l) = (estimate.blocks.row(l) - truth.blocks.row(j)).squaredNorm();
  return cost;
}

std::pair<std::vector<int>, double> enumerate_assignment(const Eigen::MatrixXd& cost) {
  const int k = static_cast<int>(cost.rows());
  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double c = 0.0;
    for (int j = 0; j < k; ++j) c += cost(j, perm[static_cast<std::size_t>(j)]);
    if (c < best_cost) {
      best_cost = c;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return {best, best_cost};
}

}  // namespace

std::pair<std::vector<int>, double> min_cost_assignment(const Eigen::MatrixXd& cost) {
  const int k = static_cast<int>(cost.rows());
  if (cost.cols() != k || k < 1) throw InputError("cost matrix must be square and nonempty");

  // Jonker-Volgenant style shortest augmenting path, 1-based internal arrays.
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<std::size_t>(k) + 1, 0.0);
  std::vector<double> v(static_cast<std::size_t>(k) + 1, 0.0);
  std::vector<int> match(static_cast<std::size_t>(k) + 1, 0);  // column -> row
  std::vector<int> way(static_cast<std::size_t>(k) + 1, 0);

  for (int i = 1; i <= k; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(k) + 1, kInf);
    std::vector<char> used(static_cast<std::size_t>(k) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = match[static_cast<std::size_t>(j0)];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= k; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= k; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(match[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (match[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      match[static_cast<std::size_t>(j0)] = match[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> row_to_col(static_cast<std::size_t>(k), -1);
  double total = 0.0;
  for (int j = 1; j <= k; ++j) {
    row_to_col[static_cast<std::size_t>(match[static_cast<std::size_t>(j)] - 1)] = j - 1;
    total += cost(match[static_cast<std::size_t>(j)] - 1, j - 1);
  }
  return {row_to_col, total};
}

ErrorReport relative_error(const ModelParams& estimate, const ModelParams& truth) {
  if (estimate.k != truth.k || estimate.d != truth.d)
    throw InputError("estimate and truth must share k and d");
  const double truth_sq = truth.blocks.squaredNorm();
  if (truth_sq == 0.0) throw InputError("relative error undefined for a zero-norm truth");

  const Eigen::MatrixXd cost = block_cost_matrix(estimate, truth);
  auto [perm, total] = truth.k <= 8 ? enumerate_assignment(cost) : min_cost_assignment(cost);

  ErrorReport report;
  report.best_permutation = std::move(perm);
  report.rel_error = total / truth_sq;
  report.log10_rel_error = report.rel_error > 0.0 ? std::log10(report.rel_error)
                                                  : -std::numeric_limits<double>::infinity();
  return report;
}

double prediction_error(const ModelParams& estimate, const ModelParams& truth,
                        const CovariateLaw& law, long mc_samples, std::uint64_t seed) {
  if (estimate.k != truth.k || estimate.d != truth.d)
    throw InputError("estimate and truth must share k and d");
  if (law.d != truth.d) throw InputError("covariate law dimension does not match model");
  if (mc_samples < 1000) throw InputError("prediction error needs at least 1000 samples");

  Rng rng(seed);
  Eigen::RowVectorXd row(truth.d);
  double sum = 0.0;
  for (long s = 0; s < mc_samples; ++s) {
    law.sample_row(rng, row);
    const double diff =
        predict(estimate, row.transpose()) - predict(truth, row.transpose());
    sum += diff * diff;
  }
  return sum / static_cast<double>(mc_samples);
}

bool classify_success(const ErrorReport& report, double threshold_log10) {
  return report.log10_rel_error <= threshold_log10;
}

}  // namespace maxaffine
