// Command-line harness for max-affine regression experiments.
//
// Subcommands: generate, fit, trace, phase-grid, diagnose. Every command is
// driven by a JSON config file (see README for the schemas) and a master
// seed; outputs are CSV files plus JSON summaries. Exit codes: 0 success,
// 2 input error, 3 divergence, 4 formula-domain error.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "maxaffine/experiments.hpp"
#include "maxaffine/init.hpp"
#include "maxaffine/io.hpp"
#include "maxaffine/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace maxaffine;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitDivergence = 3;
constexpr int kExitFormulaDomain = 4;

json load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config: " + path.string());
  json cfg;
  try {
    in >> cfg;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed config: ") + e.what());
  }
  return cfg;
}

CovariateLaw law_from_config(const json& cfg, int d) {
  return CovariateLaw::from_name(cfg.value("law", std::string("standard_gaussian")), d,
                                 cfg.value("beta_a", 2.0), cfg.value("beta_b", 2.0));
}

std::vector<Algorithm> algorithms_from_config(const json& cfg) {
  std::vector<Algorithm> algos;
  for (const auto& name : cfg.value("algorithms", std::vector<std::string>{"gd", "sgd", "am"}))
    algos.push_back(algorithm_from_name(name));
  if (algos.empty()) throw InputError("config lists no algorithms");
  return algos;
}

ExperimentConfig experiment_from_config(const json& cfg, bool timing) {
  ExperimentConfig e;
  e.k = cfg.value("k", 3);
  e.d = cfg.value("d", 50);
  e.n = cfg.value("n", 6000L);
  e.sigma = cfg.value("sigma", 0.0);
  e.law = law_from_config(cfg, e.d);
  e.truth_kind = cfg.value("truth", std::string("orthonormal"));
  e.algorithms = algorithms_from_config(cfg);
  e.trials = cfg.value("trials", 50L);
  e.batch_size = cfg.value("batch_size", 64L);
  e.step_size_gd = cfg.value("step_size_gd", -1.0);
  e.step_size_sgd = cfg.value("step_size_sgd", -1.0);
  e.max_iters = cfg.value("max_iters", 2000L);
  e.tol = cfg.value("tol", 1e-12);
  e.init_rho = cfg.value("init_rho", 0.1);
  e.seed = cfg.value("seed", 1ULL);
  e.success_threshold_log10 = cfg.value("success_threshold_log10", -6.0);
  e.trace_every_gd = cfg.value("trace_every_gd", 1L);
  e.trace_every_sgd = cfg.value("trace_every_sgd", 20L);
  e.trace_every_am = cfg.value("trace_every_am", 1L);
  e.measure_time = timing;
  return e;
}

std::string timestamp_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open for writing: " + path.string());
  out << text;
  if (!out.good()) throw InputError("failed writing: " + path.string());
}

// ---------------------------------------------------------------- generate

int cmd_generate(const fs::path& config_path, const fs::path& out_csv) {
  const json cfg = load_config(config_path);
  const int k = cfg.at("k").get<int>();
  const int d = cfg.at("d").get<int>();
  const long n = cfg.at("n").get<long>();
  const double sigma = cfg.value("sigma", 0.0);
  const std::uint64_t seed = cfg.value("seed", 1ULL);
  const std::string truth_kind = cfg.value("truth", std::string("orthonormal"));

  ModelParams truth = truth_kind == "sphere"
                          ? gen_truth_sphere(k, d, derive_seed(seed, {1}))
                          : gen_truth_orthonormal(k, d, derive_seed(seed, {1}));
  const CovariateLaw law = law_from_config(cfg, d);
  Dataset data = gen_dataset(truth, law, n, sigma, derive_seed(seed, {2}));

  DatasetInfo info;
  info.k = k;
  info.d = d;
  info.n = n;
  info.sigma = sigma;
  info.law = law;
  info.seed = seed;
  info.truth = truth;
  save_dataset(out_csv, data, info);
  std::cout << "wrote " << out_csv.string() << " and " << sidecar_path(out_csv).string() << "\n";
  return kExitOk;
}

// --------------------------------------------------------------------- fit

std::string trace_csv(const std::vector<TraceEntry>& trace, bool have_truth) {
  std::string out = "iter,loss,time_ms,rel_error_log10\n";
  for (const auto& e : trace) {
    out += std::to_string(e.iter);
    out += ',';
    out += format_double(e.loss);
    out += ',';
    out += format_double(e.time_ms);
    out += ',';
    if (have_truth) out += format_double(clamped_log10(e.rel_error));
    out += '\n';
  }
  return out;
}

int cmd_fit(const fs::path& data_path, const fs::path& config_path, const fs::path& out_dir,
            bool timing) {
  const json cfg = load_config(config_path);
  auto [data, info] = load_dataset(data_path);

  SolverConfig sc;
  sc.algorithm = algorithm_from_name(cfg.value("algorithm", std::string("gd")));
  sc.step_size = cfg.value("step_size", -1.0);
  sc.batch_size = cfg.value("batch_size", 64L);
  sc.max_iters = cfg.value("max_iters", 2000L);
  sc.tol = cfg.value("tol", 1e-12);
  sc.seed = cfg.value("seed", 1ULL);
  sc.trace_every = cfg.value("trace_every", 1L);
  sc.measure_time = timing;

  const std::string init_kind = cfg.value("init", std::string("perturb"));
  ModelParams start;
  if (init_kind == "perturb") {
    if (!info.has_truth())
      throw InputError("perturb init needs a dataset sidecar with ground-truth blocks");
    NeighborhoodSpec spec{cfg.value("init_rho", 0.1), min_slope_separation(info.truth)};
    start = perturb_init(info.truth, spec, derive_seed(sc.seed, {3}));
  } else if (init_kind == "moment") {
    start = moment_init(data, info.k);
  } else if (init_kind == "file") {
    start = load_params(fs::path(cfg.at("init_file").get<std::string>()));
  } else {
    throw InputError("unknown init kind: " + init_kind);
  }

  const ModelParams* truth = info.has_truth() ? &info.truth : nullptr;
  SolverRun run = run_solver(data, start, sc, truth);

  fs::create_directories(out_dir);
  save_params(out_dir / "params.json", run.final_params);
  write_text(out_dir / "trace.csv", trace_csv(run.trace, truth != nullptr));
  std::cout << "converged=" << (run.converged ? "true" : "false")
            << " iterations=" << run.iterations_used
            << " final_loss=" << format_double(run.trace.back().loss) << "\n";
  return kExitOk;
}

// ------------------------------------------------------------------- trace

int cmd_trace(const fs::path& config_path, const fs::path& out_dir, bool timing) {
  const json cfg = load_config(config_path);
  const ExperimentConfig e = experiment_from_config(cfg, timing);
  const std::vector<TraceCurve> curves = run_trace_experiment(e);

  fs::create_directories(out_dir);
  json summary;
  summary["schema_version"] = 1;
  summary["generated_at"] = timestamp_now();
  summary["config"] = cfg;
  json files = json::array();
  for (const auto& curve : curves) {
    std::string csv = "iter,mean_time_ms,median_log10_rel_error\n";
    for (std::size_t r = 0; r < curve.iters.size(); ++r) {
      csv += std::to_string(curve.iters[r]);
      csv += ',';
      csv += format_double(curve.mean_time_ms[r]);
      csv += ',';
      csv += format_double(curve.median_log10_rel_error[r]);
      csv += '\n';
    }
    const std::string name = "trace_" + algorithm_name(curve.algorithm) + ".csv";
    write_text(out_dir / name, csv);
    files.push_back(name);
  }
  summary["files"] = files;
  write_text(out_dir / "summary.json", summary.dump(2) + "\n");
  std::cout << "wrote " << files.size() << " trace files to " << out_dir.string() << "\n";
  return kExitOk;
}

// -------------------------------------------------------------- phase-grid

int cmd_phase_grid(const fs::path& config_path, const fs::path& out_dir, bool timing) {
  const json cfg = load_config(config_path);
  PhaseGridConfig grid;
  grid.base = experiment_from_config(cfg, timing);
  for (const auto& v : cfg.at("n_values")) grid.n_values.push_back(v.get<long>());
  if (cfg.contains("d_values"))
    for (const auto& v : cfg.at("d_values")) grid.d_values.push_back(v.get<int>());
  if (cfg.contains("k_values"))
    for (const auto& v : cfg.at("k_values")) grid.k_values.push_back(v.get<int>());

  const PhaseGridResult result = run_phase_grid(grid);

  fs::create_directories(out_dir);
  std::string csv =
      "n,d,k,algorithm,trials,median_log10_rel_error,p90_log10_rel_error,success_rate,"
      "mean_time_ms\n";
  for (const auto& cell : result.cells) {
    csv += std::to_string(cell.n) + ',' + std::to_string(cell.d) + ',' + std::to_string(cell.k) +
           ',' + algorithm_name(cell.algorithm) + ',' + std::to_string(cell.trials) + ',' +
           format_double(cell.median_log10_rel_error) + ',' +
           format_double(cell.p90_log10_rel_error) + ',' + format_double(cell.success_rate) +
           ',' + format_double(cell.mean_time_ms) + '\n';
  }
  write_text(out_dir / "grid.csv", csv);

  json summary;
  summary["schema_version"] = 1;
  summary["generated_at"] = timestamp_now();
  summary["config"] = cfg;
  json thresholds = json::array();
  for (const auto& th : result.thresholds) {
    json row;
    row["d"] = th.d;
    row["k"] = th.k;
    row["algorithm"] = algorithm_name(th.algorithm);
    if (th.n_star >= 0) row["n_star"] = th.n_star;
    else row["n_star"] = nullptr;
    thresholds.push_back(row);
  }
  summary["thresholds"] = thresholds;
  write_text(out_dir / "summary.json", summary.dump(2) + "\n");
  std::cout << "wrote grid.csv and summary.json to " << out_dir.string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- diagnose

int cmd_diagnose(const fs::path& config_path, const fs::path& out_path) {
  const json cfg = load_config(config_path);
  DiagnoseConfig d;
  d.k = cfg.value("k", 3);
  d.d = cfg.value("d", 50);
  d.n = cfg.value("n", 6000.0);
  d.sigma = cfg.value("sigma", 0.0);
  d.delta = cfg.value("delta", 0.05);
  d.zeta = cfg.value("zeta", 0.5);
  d.gamma = cfg.value("gamma", 1.0);
  d.R = cfg.value("R", 1.0);
  d.law = law_from_config(cfg, d.d);
  d.mc_samples = cfg.value("mc_samples", 100000L);
  d.seed = cfg.value("seed", 1ULL);
  // Existential constants have no defaults; the config must pin them.
  d.nu = cfg.at("nu").get<double>();
  d.C = cfg.at("C").get<double>();
  d.c_prime = cfg.at("c_prime").get<double>();
  d.init_dist = cfg.value("init_dist", 1.0);
  if (cfg.contains("bound_iters"))
    d.bound_iters = cfg.at("bound_iters").get<std::vector<double>>();
  if (cfg.contains("floor_batch_sizes"))
    d.floor_batch_sizes = cfg.at("floor_batch_sizes").get<std::vector<double>>();
  d.subset_n = cfg.value("subset_n", 0L);
  d.subset_alpha = cfg.value("subset_alpha", 0.5);
  d.subset_d = cfg.value("subset_d", 2);

  const DiagnoseReport report = run_diagnose(d);

  json doc;
  doc["schema_version"] = 1;
  doc["config"] = cfg;
  doc["rho"] = report.rho;
  doc["sample_complexity"] = report.sample_complexity;
  doc["geometry"] = {{"kappa", report.geometry.kappa},
                     {"pi_min", report.geometry.pi_min},
                     {"pi_max", report.geometry.pi_max},
                     {"ci_halfwidth", report.geometry.ci_halfwidth},
                     {"mc_samples", report.geometry.mc_samples},
                     {"cell_freqs", report.geometry.cell_freqs}};
  doc["gd_bound"] = {{"iters", d.bound_iters}, {"values", report.gd_bound}};
  doc["sgd_floor"] = {{"batch_sizes", d.floor_batch_sizes}, {"values", report.sgd_floor}};
  if (report.subset_eig.has_value()) {
    doc["worst_subset_min_eig"] = {
        {"n", report.subset_n},
        {"alpha", d.subset_alpha},
        {"subset_size", report.subset_eig->subset_size},
        {"empty_family", report.subset_eig->empty_family},
        {"value", report.subset_eig->empty_family
                      ? json("inf")
                      : json(report.subset_eig->min_eigenvalue)}};
  }
  write_text(out_path, doc.dump(2) + "\n");
  std::cout << "rho=" << format_double(report.rho)
            << " sample_complexity=" << format_double(report.sample_complexity)
            << " kappa=" << format_double(report.geometry.kappa) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"max-affine regression benchmark harness"};
  app.require_subcommand(1);

  std::string config_path, data_path, out_path = "out";
  bool timing_wall = true;
  app.add_flag("--timing,!--no-timing", timing_wall,
               "measure solver wall time (disable for byte-reproducible output files)");

  auto* gen = app.add_subcommand("generate", "synthesize a dataset CSV plus JSON sidecar");
  gen->add_option("--config", config_path, "JSON config")->required();
  gen->add_option("--out", out_path, "output CSV path")->required();

  auto* fit = app.add_subcommand("fit", "run one solver on a dataset");
  fit->add_option("--data", data_path, "dataset CSV (sidecar derived)")->required();
  fit->add_option("--config", config_path, "JSON config")->required();
  fit->add_option("--out-dir", out_path, "output directory");

  auto* trace = app.add_subcommand("trace", "median error-vs-time curves across trials");
  trace->add_option("--config", config_path, "JSON config")->required();
  trace->add_option("--out-dir", out_path, "output directory");

  auto* grid = app.add_subcommand("phase-grid", "success-rate sweep over n x (d or k)");
  grid->add_option("--config", config_path, "JSON config")->required();
  grid->add_option("--out-dir", out_path, "output directory");

  auto* diag = app.add_subcommand("diagnose", "closed-form bounds and geometry report");
  diag->add_option("--config", config_path, "JSON config")->required();
  diag->add_option("--out", out_path, "output JSON path");

  CLI11_PARSE(app, argc, argv);
  configure_workers();

  try {
    if (gen->parsed()) return cmd_generate(config_path, out_path);
    if (fit->parsed()) return cmd_fit(data_path, config_path, out_path, timing_wall);
    if (trace->parsed()) return cmd_trace(config_path, out_path, timing_wall);
    if (grid->parsed()) return cmd_phase_grid(config_path, out_path, timing_wall);
    if (diag->parsed()) return cmd_diagnose(config_path, out_path);
  } catch (const DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const FormulaDomainError& e) {
    std::cerr << "formula domain error: " << e.what() << "\n";
    return kExitFormulaDomain;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const InitializationError& e) {
    std::cerr << "initialization error: " << e.what() << "\n";
    return kExitInput;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitOk;
}
