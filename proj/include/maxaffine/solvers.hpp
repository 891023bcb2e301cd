#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "maxaffine/model.hpp"
#include "maxaffine/objective.hpp"

namespace maxaffine {

enum class Algorithm { GD, SGD, AM };

std::string algorithm_name(Algorithm a);
Algorithm algorithm_from_name(const std::string& name);

/// Solver configuration shared by all three estimators.
///   step_size   <= 0 selects the default: 0.5 for GD, min(1, m/d)/2 for SGD.
///   batch_size  SGD only; indices are drawn uniformly with replacement, so
///               any m >= 1 is legal.
///   tol         stop when the parameter change norm drops to tol or below.
///   seed        SGD batch stream; ignored by GD and AM.
///   trace_every record a trace row every this many iterations (the initial
///               state and the final iterate are always recorded).
///   measure_time when false all reported times are 0, which makes output
///               files byte-reproducible; timing excludes trace evaluation
///               either way.
struct SolverConfig {
  Algorithm algorithm = Algorithm::GD;
  double step_size = -1.0;
  long batch_size = 64;
  long max_iters = 1000;
  double tol = 1e-12;
  std::uint64_t seed = 0;
  long trace_every = 1;
  bool measure_time = true;

  double effective_step(int d) const;
  void validate() const;
};

/// One trace row. Metrics are evaluated outside the timed region, at the
/// current iterate. dist_to_truth and rel_error are NaN when no ground truth
/// was supplied.
struct TraceEntry {
  long iter = 0;
  double loss = 0.0;
  double time_ms = 0.0;        // cumulative solver time, trace work excluded
  double dist_to_truth = 0.0;  // stacked-vector distance ||beta - truth||
  double rel_error = 0.0;      // permutation-minimized squared-error ratio
};

struct SolverRun {
  ModelParams final_params;
  std::vector<TraceEntry> trace;
  bool converged = false;
  long iterations_used = 0;
};

/// Thrown when the loss becomes non-finite or exceeds 1e12 times its initial
/// value; carries the last finite iterate.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::string message, ModelParams last)
      : std::runtime_error(std::move(message)), last_iterate(std::move(last)) {}
  ModelParams last_iterate;
};

/// Constant-step full-batch descent on the mean-squared loss.
SolverRun run_gd(const Dataset& data, const ModelParams& init, const SolverConfig& config,
                 const ModelParams* truth = nullptr);

/// Mini-batch stochastic descent. Every iteration draws batch_size indices
/// uniformly with replacement from the config seed; identical seed and
/// config reproduce the trace bit-for-bit.
SolverRun run_sgd(const Dataset& data, const ModelParams& init, const SolverConfig& config,
                  const ModelParams* truth = nullptr);

/// run_sgd with the batch source replaced; used by tests to inject
/// deterministic batches.
using BatchSampler = std::function<std::vector<long>(long iter)>;
SolverRun run_sgd_with_sampler(const Dataset& data, const ModelParams& init,
                               const SolverConfig& config, const ModelParams* truth,
                               const BatchSampler& sampler);

/// Alternating minimization: classify samples by their maximizing piece,
/// then refit each nonempty cell by least squares; empty cells carry their
/// block over unchanged.
SolverRun run_am(const Dataset& data, const ModelParams& init, const SolverConfig& config,
                 const ModelParams* truth = nullptr);

/// Dispatch on config.algorithm.
SolverRun run_solver(const Dataset& data, const ModelParams& init, const SolverConfig& config,
                     const ModelParams* truth = nullptr);

/// One alternating-minimization parameter update (classification plus
/// per-cell least squares). Rank-deficient cells receive the minimum-norm
/// solution; empty cells keep their current block.
ModelParams am_step(const Dataset& data, const ModelParams& current);

}  // namespace maxaffine
