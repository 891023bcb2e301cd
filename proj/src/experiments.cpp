#include "maxaffine/experiments.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>

#include "maxaffine/init.hpp"
#include "maxaffine/rng.hpp"

namespace maxaffine {
namespace {

// Seed-path tags. Values are arbitrary but frozen: changing them changes
// every derived stream.
enum SeedTag : std::uint64_t { kTruth = 1, kData = 2, kInit = 3, kSolver = 4 };

// Instance streams (truth, data, start) depend only on the problem shape and
// the trial index, so every algorithm in a trial sees the same instance and
// comparisons are paired. Only the solver stream is per-algorithm.
std::uint64_t trial_seed(const ExperimentConfig& cfg, Algorithm algo, long trial,
                         SeedTag tag) {
  const std::uint64_t algo_key =
      tag == kSolver ? static_cast<std::uint64_t>(algo) + 1 : 0;
  return derive_seed(cfg.seed, {static_cast<std::uint64_t>(tag),
                                static_cast<std::uint64_t>(cfg.k),
                                static_cast<std::uint64_t>(cfg.d),
                                static_cast<std::uint64_t>(cfg.n),
                                algo_key,
                                static_cast<std::uint64_t>(trial)});
}

long trace_every_for(const ExperimentConfig& cfg, Algorithm algo) {
  switch (algo) {
    case Algorithm::GD: return cfg.trace_every_gd;
    case Algorithm::SGD: return cfg.trace_every_sgd;
    case Algorithm::AM: return cfg.trace_every_am;
  }
  return 1;
}

}  // namespace

SolverConfig ExperimentConfig::solver_config(Algorithm algo) const {
  SolverConfig sc;
  sc.algorithm = algo;
  sc.step_size = (algo == Algorithm::GD) ? step_size_gd
               : (algo == Algorithm::SGD) ? step_size_sgd
                                          : -1.0;
  sc.batch_size = batch_size;
  sc.max_iters = max_iters;
  sc.tol = tol;
  sc.trace_every = trace_every_for(*this, algo);
  sc.measure_time = measure_time;
  return sc;
}

TrialOutcome run_trial(const ExperimentConfig& cfg, Algorithm algo, long trial,
                       bool keep_trace) {
  ModelParams truth = cfg.truth_kind == "sphere"
                          ? gen_truth_sphere(cfg.k, cfg.d, trial_seed(cfg, algo, trial, kTruth))
                          : gen_truth_orthonormal(cfg.k, cfg.d, trial_seed(cfg, algo, trial, kTruth));
  CovariateLaw law = cfg.law;
  law.d = cfg.d;
  Dataset data = gen_dataset(truth, law, cfg.n, cfg.sigma, trial_seed(cfg, algo, trial, kData));

  NeighborhoodSpec spec{cfg.init_rho, min_slope_separation(truth)};
  ModelParams start = perturb_init(truth, spec, trial_seed(cfg, algo, trial, kInit));

  SolverConfig sc = cfg.solver_config(algo);
  sc.seed = trial_seed(cfg, algo, trial, kSolver);

  TrialOutcome outcome;
  try {
    SolverRun run = run_solver(data, start, sc, &truth);
    const ErrorReport report = relative_error(run.final_params, truth);
    outcome.rel_error = report.rel_error;
    outcome.log10_rel_error = clamped_log10(report.rel_error);
    outcome.success = classify_success(report, cfg.success_threshold_log10);
    outcome.diverged = false;
    outcome.iterations = run.iterations_used;
    outcome.solver_time_ms = run.trace.empty() ? 0.0 : run.trace.back().time_ms;
    if (keep_trace) outcome.trace = std::move(run.trace);
  } catch (const DivergenceError&) {
    outcome.diverged = true;  // scored as a failed trial, sweep continues
  }
  return outcome;
}

std::vector<TraceCurve> run_trace_experiment(const ExperimentConfig& cfg) {
  if (cfg.trials < 1) throw InputError("trials must be at least 1");
  std::vector<TraceCurve> curves;
  for (Algorithm algo : cfg.algorithms) {
    std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(cfg.trials));
#pragma omp parallel for schedule(dynamic)
    for (long t = 0; t < cfg.trials; ++t)
      outcomes[static_cast<std::size_t>(t)] = run_trial(cfg, algo, t, true);

    // Regular iteration grid; carry each trial's last row forward so every
    // trial contributes to every grid point.
    const long step = trace_every_for(cfg, algo);
    long max_iter = 0;
    for (const auto& o : outcomes)
      if (!o.trace.empty()) max_iter = std::max(max_iter, o.trace.back().iter);

    TraceCurve curve;
    curve.algorithm = algo;
    for (long g = 0; g <= max_iter; g += step) curve.iters.push_back(g);
    if (curve.iters.empty() || curve.iters.back() != max_iter) curve.iters.push_back(max_iter);

    for (long g : curve.iters) {
      std::vector<double> times, errors;
      for (const auto& o : outcomes) {
        if (o.trace.empty()) continue;  // diverged before the first record
        const TraceEntry* last = &o.trace.front();
        for (const auto& e : o.trace) {
          if (e.iter > g) break;
          last = &e;
        }
        times.push_back(last->time_ms);
        errors.push_back(clamped_log10(last->rel_error));
      }
      if (times.empty()) throw InputError("all trials diverged; nothing to aggregate");
      curve.mean_time_ms.push_back(
          std::accumulate(times.begin(), times.end(), 0.0) / static_cast<double>(times.size()));
      curve.median_log10_rel_error.push_back(median_of(std::move(errors)));
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

PhaseGridResult run_phase_grid(const PhaseGridConfig& cfg) {
  if (cfg.n_values.empty()) throw InputError("phase grid needs at least one n value");
  if (cfg.d_values.empty() == cfg.k_values.empty())
    throw InputError("phase grid needs exactly one of d_values or k_values");
  if (cfg.base.trials < 1) throw InputError("trials must be at least 1");

  const bool sweep_d = !cfg.d_values.empty();
  const std::vector<int>& axis = sweep_d ? cfg.d_values : cfg.k_values;

  struct CellSpec {
    ExperimentConfig cfg;
    Algorithm algo;
  };
  std::vector<CellSpec> cells;
  for (int axis_value : axis)
    for (long n : cfg.n_values)
      for (Algorithm algo : cfg.base.algorithms) {
        ExperimentConfig c = cfg.base;
        if (sweep_d) c.d = axis_value;
        else c.k = axis_value;
        c.n = n;
        cells.push_back(CellSpec{std::move(c), algo});
      }

  const long trials = cfg.base.trials;
  const long total = static_cast<long>(cells.size()) * trials;
  std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(total));
#pragma omp parallel for schedule(dynamic)
  for (long task = 0; task < total; ++task) {
    const auto& cell = cells[static_cast<std::size_t>(task / trials)];
    outcomes[static_cast<std::size_t>(task)] =
        run_trial(cell.cfg, cell.algo, task % trials, false);
  }

  PhaseGridResult result;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto& spec = cells[c];
    std::vector<double> log_errors, times;
    long successes = 0;
    for (long t = 0; t < trials; ++t) {
      const auto& o = outcomes[c * static_cast<std::size_t>(trials) + static_cast<std::size_t>(t)];
      log_errors.push_back(o.diverged ? std::numeric_limits<double>::infinity()
                                      : o.log10_rel_error);
      times.push_back(o.solver_time_ms);
      if (o.success) ++successes;
    }
    GridCell cell;
    cell.n = spec.cfg.n;
    cell.d = spec.cfg.d;
    cell.k = spec.cfg.k;
    cell.algorithm = spec.algo;
    cell.trials = trials;
    cell.median_log10_rel_error = median_of(log_errors);
    cell.p90_log10_rel_error = percentile90_of(std::move(log_errors));
    cell.success_rate = static_cast<double>(successes) / static_cast<double>(trials);
    cell.mean_time_ms =
        std::accumulate(times.begin(), times.end(), 0.0) / static_cast<double>(trials);
    result.cells.push_back(cell);
  }

  for (int axis_value : axis)
    for (Algorithm algo : cfg.base.algorithms) {
      GridThreshold th;
      th.d = sweep_d ? axis_value : cfg.base.d;
      th.k = sweep_d ? cfg.base.k : axis_value;
      th.algorithm = algo;
      long best = -1;
      for (const auto& cell : result.cells) {
        if (cell.algorithm != algo) continue;
        if ((sweep_d ? cell.d : cell.k) != axis_value) continue;
        if (cell.success_rate >= 0.5 && (best < 0 || cell.n < best)) best = cell.n;
      }
      th.n_star = best;
      result.thresholds.push_back(th);
    }
  return result;
}

DiagnoseReport run_diagnose(const DiagnoseConfig& cfg) {
  if (!(cfg.nu > 0.0 && cfg.nu < 1.0)) throw InputError("diagnose requires nu in (0, 1)");
  if (!(cfg.C > 0.0)) throw InputError("diagnose requires C > 0");
  if (!(cfg.c_prime > 0.0)) throw InputError("diagnose requires c_prime > 0");

  DiagnoseReport report;
  ModelParams truth =
      gen_truth_orthonormal(cfg.k, cfg.d, derive_seed(cfg.seed, {kTruth}));
  CovariateLaw law = cfg.law;
  law.d = cfg.d;
  report.geometry = estimate_geometry(truth, law, cfg.mc_samples, derive_seed(cfg.seed, {kData}));

  TheoryInputs inputs;
  inputs.k = cfg.k;
  inputs.d = cfg.d;
  inputs.n = cfg.n;
  inputs.sigma = cfg.sigma;
  inputs.delta = cfg.delta;
  inputs.pi_min = std::min(report.geometry.pi_min, 1.0 / static_cast<double>(cfg.k));
  if (inputs.pi_min <= 0.0) inputs.pi_min = 1.0 / (2.0 * static_cast<double>(cfg.mc_samples));
  inputs.kappa = report.geometry.kappa;
  inputs.zeta = cfg.zeta;
  inputs.gamma = cfg.gamma;
  inputs.R = cfg.R;

  report.rho = compute_rho(inputs);
  report.sample_complexity = sample_complexity_gd(inputs, cfg.C);
  for (double t : cfg.bound_iters)
    report.gd_bound.push_back(gd_error_bound(inputs, t, cfg.init_dist, cfg.nu, cfg.c_prime));
  for (double m : cfg.floor_batch_sizes)
    report.sgd_floor.push_back(sgd_error_floor(inputs, m, cfg.c_prime));

  if (cfg.subset_n > 0) {
    // Toy-scale data in its own low dimension; the exhaustive scan is only
    // meaningful when subsets can span the lifted space.
    ModelParams toy_truth = gen_truth_sphere(cfg.k, cfg.subset_d, derive_seed(cfg.seed, {kTruth, 99}));
    Dataset tiny = gen_dataset(toy_truth, CovariateLaw::standard_gaussian(cfg.subset_d),
                               cfg.subset_n, cfg.sigma, derive_seed(cfg.seed, {kData, 99}));
    report.subset_eig = worst_subset_min_eig(tiny, cfg.subset_alpha);
    report.subset_n = cfg.subset_n;
  }
  return report;
}

double median_of(std::vector<double> values) {
  if (values.empty()) throw InputError("median of empty list");
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size() / 2;
  if (values.size() % 2 == 1) return values[m];
  return 0.5 * (values[m - 1] + values[m]);
}

double percentile90_of(std::vector<double> values) {
  if (values.empty()) throw InputError("percentile of empty list");
  std::sort(values.begin(), values.end());
  const std::size_t rank =
      static_cast<std::size_t>(std::ceil(0.9 * static_cast<double>(values.size())));
  return values[std::max<std::size_t>(rank, 1) - 1];
}

double clamped_log10(double value) {
  if (value <= 0.0) return -320.0;
  return std::max(std::log10(value), -320.0);
}

int configure_workers() {
  omp_set_max_active_levels(1);
  if (const char* env = std::getenv("MAXAFFINE_THREADS")) {
    const int workers = std::atoi(env);
    if (workers >= 1) omp_set_num_threads(workers);
  }
  return omp_get_max_threads();
}

}  // namespace maxaffine
