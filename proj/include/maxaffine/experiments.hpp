#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "maxaffine/datagen.hpp"
#include "maxaffine/metrics.hpp"
#include "maxaffine/solvers.hpp"
#include "maxaffine/theory.hpp"

namespace maxaffine {

/// Knobs for one synthetic estimation problem plus the solver sweep run on
/// it. Every trial derives its own seed path from (master seed, problem
/// shape, algorithm, trial index), so results are independent of scheduling
/// and of the total trial count.
struct ExperimentConfig {
  int k = 3;
  int d = 50;
  long n = 6000;
  double sigma = 0.0;
  CovariateLaw law = CovariateLaw::standard_gaussian(50);
  std::string truth_kind = "orthonormal";  // "orthonormal" or "sphere"
  std::vector<Algorithm> algorithms = {Algorithm::GD, Algorithm::SGD, Algorithm::AM};
  long trials = 50;
  long batch_size = 64;
  double step_size_gd = -1.0;   // <= 0 selects the documented default
  double step_size_sgd = -1.0;
  long max_iters = 2000;
  double tol = 1e-12;
  double init_rho = 0.1;        // perturbation radius multiplier
  std::uint64_t seed = 1;
  double success_threshold_log10 = -6.0;
  long trace_every_gd = 1;
  long trace_every_sgd = 20;
  long trace_every_am = 1;
  bool measure_time = true;

  SolverConfig solver_config(Algorithm algo) const;
};

/// Outcome of one seeded trial.
struct TrialOutcome {
  double rel_error = std::numeric_limits<double>::infinity();
  double log10_rel_error = std::numeric_limits<double>::infinity();
  bool success = false;
  bool diverged = false;
  double solver_time_ms = 0.0;
  long iterations = 0;
  std::vector<TraceEntry> trace;  // kept only when requested
};

/// Generates truth/data/start for the given shape and runs one solver.
/// Divergence is recorded in the outcome, never thrown.
TrialOutcome run_trial(const ExperimentConfig& cfg, Algorithm algo, long trial,
                       bool keep_trace);

/// Aggregated convergence curve of one algorithm across trials, aligned by
/// iteration index: each trial's trace is carried forward onto the regular
/// iteration grid, then times are averaged and errors median-ed per row.
struct TraceCurve {
  Algorithm algorithm = Algorithm::GD;
  std::vector<long> iters;
  std::vector<double> mean_time_ms;
  std::vector<double> median_log10_rel_error;
};

std::vector<TraceCurve> run_trace_experiment(const ExperimentConfig& cfg);

/// Phase-transition sweep over n crossed with either d or k (exactly one of
/// d_values / k_values may be nonempty; the other dimension is fixed).
struct PhaseGridConfig {
  std::vector<long> n_values;
  std::vector<int> d_values;
  std::vector<int> k_values;
  ExperimentConfig base;  // k/d/n fields are overwritten per cell
};

struct GridCell {
  long n = 0;
  int d = 0;
  int k = 0;
  Algorithm algorithm = Algorithm::GD;
  long trials = 0;
  double median_log10_rel_error = 0.0;
  double p90_log10_rel_error = 0.0;
  double success_rate = 0.0;
  double mean_time_ms = 0.0;
};

struct GridThreshold {
  int d = 0;
  int k = 0;
  Algorithm algorithm = Algorithm::GD;
  long n_star = -1;  // smallest n with success rate >= 0.5; -1 when absent
};

struct PhaseGridResult {
  std::vector<GridCell> cells;
  std::vector<GridThreshold> thresholds;
};

PhaseGridResult run_phase_grid(const PhaseGridConfig& cfg);

/// Inputs of the diagnostics report. The existential constants nu, C and
/// c_prime have no defaults; callers must supply them.
struct DiagnoseConfig {
  int k = 3;
  int d = 50;
  double n = 6000.0;
  double sigma = 0.0;
  double delta = 0.05;
  double zeta = 0.5;
  double gamma = 1.0;
  double R = 1.0;
  CovariateLaw law = CovariateLaw::standard_gaussian(50);
  long mc_samples = 100000;
  std::uint64_t seed = 1;
  double nu = 0.0;       // required, in (0,1)
  double C = 0.0;        // required, > 0
  double c_prime = 0.0;  // required, > 0
  std::vector<double> bound_iters = {0, 1, 2, 5, 10, 20, 50, 100, 200, 500, 1000};
  std::vector<double> floor_batch_sizes = {8, 16, 32, 64, 128, 256, 512, 1024};
  double init_dist = 1.0;
  long subset_n = 0;  // > 0 adds the exhaustive subset eigenvalue diagnostic
  double subset_alpha = 0.5;
  int subset_d = 2;   // dimension of the toy data fed to the subset scan
};

struct DiagnoseReport {
  GroundTruthGeometry geometry;
  double rho = 0.0;
  double sample_complexity = 0.0;
  std::vector<double> gd_bound;   // aligned with cfg.bound_iters
  std::vector<double> sgd_floor;  // aligned with cfg.floor_batch_sizes
  std::optional<SubsetEigResult> subset_eig;
  long subset_n = 0;
};

DiagnoseReport run_diagnose(const DiagnoseConfig& cfg);

/// Sort-based order statistics used by all aggregations. The p90 picks the
/// order statistic of rank ceil(0.9 * count); the median averages the two
/// central order statistics for even counts.
double median_of(std::vector<double> values);
double percentile90_of(std::vector<double> values);

/// log10 clamped below at -320 so aggregated CSV columns stay finite when a
/// trial recovers the truth exactly.
double clamped_log10(double value);

/// Applies the MAXAFFINE_THREADS override (when set) to the OpenMP runtime
/// and pins nested parallelism off so per-trial parallelism composes with
/// the kernels. Returns the worker count in effect.
int configure_workers();

}  // namespace maxaffine
