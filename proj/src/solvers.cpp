#include "maxaffine/solvers.hpp"

#include <chrono>
#include <cmath>

#include "maxaffine/metrics.hpp"
#include "maxaffine/rng.hpp"

namespace maxaffine {
namespace {

using Clock = std::chrono::steady_clock;

double ms_between(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double, std::milli>(b - a).count();
}

// Trace bookkeeping shared by the three solvers. Metric evaluation happens
// outside the timed region so reported times cover solver work only.
class Tracer {
 public:
  Tracer(const Dataset& data, const ModelParams* truth, SolverRun& run)
      : data_(data), truth_(truth), run_(run) {}

  void record(long iter, const ModelParams& params, double elapsed_ms) {
    TraceEntry e;
    e.iter = iter;
    e.loss = loss(params, data_);
    e.time_ms = elapsed_ms;
    if (truth_ != nullptr) {
      e.dist_to_truth = (params.blocks - truth_->blocks).norm();
      e.rel_error = relative_error(params, *truth_).rel_error;
    } else {
      e.dist_to_truth = std::numeric_limits<double>::quiet_NaN();
      e.rel_error = std::numeric_limits<double>::quiet_NaN();
    }
    run_.trace.push_back(e);
    last_loss_ = e.loss;
  }

  double last_loss() const { return last_loss_; }

 private:
  const Dataset& data_;
  const ModelParams* truth_;
  SolverRun& run_;
  double last_loss_ = 0.0;
};

// Update rule abstraction: step(params, iter) applies one in-place update and
// returns the parameter change norm.
template <typename StepFn>
SolverRun iterate(const Dataset& data, const ModelParams& init, const SolverConfig& config,
                  const ModelParams* truth, StepFn step) {
  config.validate();
  init.validate();
  detail::check_dims(init, data);

  SolverRun run;
  run.final_params = init;
  Tracer tracer(data, truth, run);
  tracer.record(0, run.final_params, 0.0);
  const double initial_loss = tracer.last_loss();

  ModelParams last_finite = run.final_params;
  double elapsed_ms = 0.0;
  long t = 0;
  for (; t < config.max_iters; ++t) {
    const auto t0 = config.measure_time ? Clock::now() : Clock::time_point{};
    const double delta = step(run.final_params, t);
    if (config.measure_time) elapsed_ms += ms_between(t0, Clock::now());

    const bool stopped = std::isfinite(delta) && delta <= config.tol;
    const bool last_iter = (t + 1 == config.max_iters);
    const bool scheduled = ((t + 1) % config.trace_every == 0);
    if (!std::isfinite(delta) || !run.final_params.blocks.allFinite())
      throw DivergenceError("solver produced a non-finite iterate", std::move(last_finite));

    if (scheduled || stopped || last_iter) {
      tracer.record(t + 1, run.final_params, elapsed_ms);
      if (!std::isfinite(tracer.last_loss()) ||
          (initial_loss > 0.0 && tracer.last_loss() > 1e12 * initial_loss))
        throw DivergenceError("loss diverged past 1e12 times its initial value",
                              std::move(last_finite));
      last_finite = run.final_params;
    }
    if (stopped) {
      run.converged = true;
      run.iterations_used = t;
      return run;
    }
  }
  run.iterations_used = t;
  return run;
}

std::vector<long> draw_batch(Rng& rng, long n, long m) {
  std::vector<long> batch(static_cast<std::size_t>(m));
  for (long p = 0; p < m; ++p) batch[static_cast<std::size_t>(p)] = rng.uniform_index(n);
  return batch;
}

}  // namespace

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::GD: return "gd";
    case Algorithm::SGD: return "sgd";
    case Algorithm::AM: return "am";
  }
  return "unknown";
}

Algorithm algorithm_from_name(const std::string& name) {
  if (name == "gd" || name == "GD") return Algorithm::GD;
  if (name == "sgd" || name == "SGD") return Algorithm::SGD;
  if (name == "am" || name == "AM") return Algorithm::AM;
  throw InputError("unknown algorithm: " + name);
}

double SolverConfig::effective_step(int d) const {
  if (step_size > 0.0) return step_size;
  if (algorithm == Algorithm::SGD)
    return 0.5 * std::min(1.0, static_cast<double>(batch_size) / static_cast<double>(d));
  return 0.5;
}

void SolverConfig::validate() const {
  if (algorithm != Algorithm::AM && step_size <= 0.0 && step_size != -1.0)
    throw InputError("step size must be positive");
  if (algorithm == Algorithm::SGD && batch_size < 1)
    throw InputError("batch size must be at least 1");
  if (max_iters < 1) throw InputError("iteration budget must be at least 1");
  if (tol < 0.0) throw InputError("tolerance must be nonnegative");
  if (trace_every < 1) throw InputError("trace_every must be at least 1");
}

SolverRun run_gd(const Dataset& data, const ModelParams& init, const SolverConfig& config,
                 const ModelParams* truth) {
  if (config.algorithm != Algorithm::GD) throw InputError("config.algorithm must be GD");
  const double mu = config.effective_step(data.d);
  Gradient g;
  return iterate(data, init, config, truth, [&](ModelParams& params, long) {
    loss_and_gradient(params, data, g);
    params.blocks -= mu * g.blocks;
    return mu * g.norm();
  });
}

SolverRun run_sgd_with_sampler(const Dataset& data, const ModelParams& init,
                               const SolverConfig& config, const ModelParams* truth,
                               const BatchSampler& sampler) {
  if (config.algorithm != Algorithm::SGD) throw InputError("config.algorithm must be SGD");
  const double mu = config.effective_step(data.d);
  return iterate(data, init, config, truth, [&](ModelParams& params, long t) {
    const std::vector<long> batch = sampler(t);
    const Gradient g = minibatch_gradient(params, data, batch);
    params.blocks -= mu * g.blocks;
    return mu * g.norm();
  });
}

SolverRun run_sgd(const Dataset& data, const ModelParams& init, const SolverConfig& config,
                  const ModelParams* truth) {
  Rng rng(config.seed);
  return run_sgd_with_sampler(data, init, config, truth, [&rng, &data, &config](long) {
    return draw_batch(rng, data.n, config.batch_size);
  });
}

ModelParams am_step(const Dataset& data, const ModelParams& current) {
  detail::check_dims(current, data);
  const Partition part = assign_cells(current, data);
  ModelParams next = current;
  for (int j = 0; j < current.k; ++j) {
    const long count = part.cell_counts[static_cast<std::size_t>(j)];
    if (count == 0) continue;  // carry the block over unchanged
    RowMatrix a(count, current.d + 1);
    Eigen::VectorXd y(count);
    long r = 0;
    for (long i = 0; i < data.n; ++i) {
      if (part.assignment[static_cast<std::size_t>(i)] != j) continue;
      a.row(r).head(current.d) = data.covariates.row(i);
      a(r, current.d) = 1.0;
      y(r) = data.responses(i);
      ++r;
    }
    // Minimum-norm least squares; well defined for rank-deficient cells.
    next.blocks.row(j) = a.completeOrthogonalDecomposition().solve(y).transpose();
  }
  return next;
}

SolverRun run_am(const Dataset& data, const ModelParams& init, const SolverConfig& config,
                 const ModelParams* truth) {
  if (config.algorithm != Algorithm::AM) throw InputError("config.algorithm must be AM");
  return iterate(data, init, config, truth, [&](ModelParams& params, long) {
    ModelParams next = am_step(data, params);
    const double delta = (next.blocks - params.blocks).norm();
    params = std::move(next);
    return delta;
  });
}

SolverRun run_solver(const Dataset& data, const ModelParams& init, const SolverConfig& config,
                     const ModelParams* truth) {
  switch (config.algorithm) {
    case Algorithm::GD: return run_gd(data, init, config, truth);
    case Algorithm::SGD: return run_sgd(data, init, config, truth);
    case Algorithm::AM: return run_am(data, init, config, truth);
  }
  throw InputError("unknown algorithm");
}

}  // namespace maxaffine
