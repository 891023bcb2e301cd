#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "maxaffine/datagen.hpp"
#include "maxaffine/model.hpp"

namespace maxaffine {

/// Permutation-invariant estimation error of a fitted model against the
/// ground truth. `rel_error` is the ratio
///   min over permutations p of sum_j ||estimate_{p(j)} - truth_j||^2
///   divided by sum_j ||truth_j||^2,
/// and `best_permutation[j]` names the estimate block matched to truth
/// block j at the minimum.
struct ErrorReport {
  double rel_error = 0.0;
  double log10_rel_error = 0.0;  // -inf when rel_error == 0
  std::vector<int> best_permutation;
  double prediction_error = std::numeric_limits<double>::quiet_NaN();  // optional
};

/// Exact minimum-cost assignment on a square cost matrix (shortest augmenting
/// path with potentials, O(k^3)). Returns the column assigned to each row and
/// the total cost.
std::pair<std::vector<int>, double> min_cost_assignment(const Eigen::MatrixXd& cost);

/// Relative estimation error minimized over block permutations. Exhaustive
/// enumeration for k <= 8, assignment solver above; the two agree exactly.
ErrorReport relative_error(const ModelParams& estimate, const ModelParams& truth);

/// Monte-Carlo estimate of E(max_j <xi, estimate_j> - max_j <xi, truth_j>)^2
/// with xi = [x; 1] and x drawn from `law`. Requires mc_samples >= 1000.
double prediction_error(const ModelParams& estimate, const ModelParams& truth,
                        const CovariateLaw& law, long mc_samples, std::uint64_t seed);

/// Success flag for phase grids: log10 relative error at or below the
/// threshold (default -6).
bool classify_success(const ErrorReport& report, double threshold_log10 = -6.0);

}  // namespace maxaffine
