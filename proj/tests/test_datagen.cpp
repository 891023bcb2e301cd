#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "maxaffine/datagen.hpp"
#include "maxaffine/io.hpp"
#include "maxaffine/rng.hpp"

using namespace maxaffine;

TEST_CASE("orthonormal truth: identity Gram matrix and sqrt(2) separation") {
  for (auto [k, d] : {std::pair{3, 8}, {2, 2}, {5, 5}}) {
    const ModelParams truth = gen_truth_orthonormal(k, d, 99);
    Eigen::MatrixXd slopes(k, d);
    for (int j = 0; j < k; ++j) slopes.row(j) = truth.blocks.row(j).head(d);
    const Eigen::MatrixXd gram = slopes * slopes.transpose();
    CHECK((gram - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff() <= 1e-12);
    if (k >= 2)
      CHECK(min_slope_separation(truth) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    for (int j = 0; j < k; ++j) CHECK(truth.offset(j) == 0.0);
    if (k == d) CHECK(std::abs(std::abs(slopes.determinant()) - 1.0) <= 1e-12);
  }
}

TEST_CASE("orthonormal truth rejects k > d") {
  CHECK_THROWS_AS(gen_truth_orthonormal(4, 3, 1), InputError);
}

TEST_CASE("sphere truth: unit slopes, distinct seeds differ") {
  const ModelParams a = gen_truth_sphere(4, 7, 1);
  const ModelParams b = gen_truth_sphere(4, 7, 2);
  for (int j = 0; j < 4; ++j) {
    CHECK(a.slope(j).norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(a.offset(j) == 0.0);
  }
  CHECK((a.blocks - b.blocks).norm() > 1e-6);
}

TEST_CASE("sphere truth: pairwise inner products average to zero") {
  // Symmetry of the uniform sphere: over many draws the mean inner product
  // between two independent slopes vanishes. 3-sigma Monte-Carlo band with
  // Var(<u,v>) = 1/d for unit-sphere u, v.
  const int d = 6;
  const int reps = 4000;
  double sum = 0.0;
  for (int r = 0; r < reps; ++r) {
    const ModelParams t = gen_truth_sphere(2, d, 1000 + static_cast<std::uint64_t>(r));
    sum += t.slope(0).dot(t.slope(1));
  }
  const double mean = sum / reps;
  const double band = 3.0 / std::sqrt(static_cast<double>(d) * reps);
  CHECK(std::abs(mean) <= band);
}

TEST_CASE("gen_dataset: noiseless responses equal the model exactly") {
  const ModelParams truth = gen_truth_orthonormal(3, 5, 7);
  const Dataset data = gen_dataset(truth, CovariateLaw::standard_gaussian(5), 200, 0.0, 8);
  for (long i = 0; i < data.n; ++i)
    CHECK(data.responses(i) == predict(truth, data.covariates.row(i).transpose()));
  CHECK(data.noise.size() == 0);
}

TEST_CASE("gen_dataset: stored noise reproduces response minus model exactly") {
  const ModelParams truth = gen_truth_orthonormal(2, 4, 17);
  const Dataset data = gen_dataset(truth, CovariateLaw::standard_gaussian(4), 500, 0.25, 18);
  REQUIRE(data.noise.size() == data.n);
  for (long i = 0; i < data.n; ++i) {
    const double recomputed = data.responses(i) - predict(truth, data.covariates.row(i).transpose());
    CHECK(recomputed == data.noise(i));  // bitwise
  }
}

TEST_CASE("gen_dataset: noise variance matches sigma^2 at large n") {
  const ModelParams truth = gen_truth_orthonormal(2, 3, 27);
  const double sigma = 0.1;
  const Dataset data = gen_dataset(truth, CovariateLaw::standard_gaussian(3), 100000, sigma, 28);
  const double mean = data.noise.mean();
  const double var = (data.noise.array() - mean).square().sum() / (data.n - 1);
  CHECK(var == doctest::Approx(sigma * sigma).epsilon(0.05));
}

TEST_CASE("gen_dataset: fixed seed reproduces the dataset bit for bit") {
  const ModelParams truth = gen_truth_sphere(3, 4, 5);
  const CovariateLaw law = CovariateLaw::uniform_cube(4);
  const Dataset a = gen_dataset(truth, law, 300, 0.2, 77);
  const Dataset b = gen_dataset(truth, law, 300, 0.2, 77);
  CHECK((a.covariates - b.covariates).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.responses - b.responses).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("covariate laws: uniform cube is centered with unit variance") {
  CovariateLaw law = CovariateLaw::uniform_cube(2);
  Rng rng(31);
  double sum = 0.0, sq = 0.0;
  const long reps = 200000;
  Eigen::RowVectorXd row(2);
  for (long r = 0; r < reps; ++r) {
    law.sample_row(rng, row);
    sum += row(0);
    sq += row(0) * row(0);
  }
  CHECK(std::abs(sum / reps) < 0.02);
  CHECK(sq / reps == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("covariate laws: beta coordinates stay inside (0, 1)") {
  CovariateLaw law = CovariateLaw::beta_iid(3, 2.0, 5.0);
  Rng rng(41);
  Eigen::RowVectorXd row(3);
  for (int r = 0; r < 1000; ++r) {
    law.sample_row(rng, row);
    for (int c = 0; c < 3; ++c) {
      CHECK(row(c) > 0.0);
      CHECK(row(c) < 1.0);
    }
  }
}

TEST_CASE("estimate_geometry: k=1 has unit cell mass") {
  const ModelParams truth = gen_truth_orthonormal(1, 3, 2);
  const GroundTruthGeometry geom =
      estimate_geometry(truth, CovariateLaw::standard_gaussian(3), 2000, 3);
  CHECK(geom.pi_min == 1.0);
  CHECK(geom.pi_max == 1.0);
  CHECK(geom.kappa == 0.0);
}

TEST_CASE("estimate_geometry: orthonormal k=3 cells are balanced near 1/3") {
  const ModelParams truth = gen_truth_orthonormal(3, 10, 11);
  const GroundTruthGeometry geom =
      estimate_geometry(truth, CovariateLaw::standard_gaussian(10), 60000, 12);
  CHECK(geom.kappa == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  for (double f : geom.cell_freqs) CHECK(f == doctest::Approx(1.0 / 3.0).epsilon(0.05));
  CHECK(geom.pi_min <= 1.0 / 3.0 + 1e-15);
  CHECK(geom.pi_max >= 1.0 / 3.0 - 1e-15);
  double total = 0.0;
  for (double f : geom.cell_freqs) total += f;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("estimate_geometry: interval estimate covers 1/k in almost every repetition") {
  // Calibration of the reported half-width: with a 3-sigma band the true
  // cell mass 1/3 should land inside it in at least 99% of repetitions.
  const ModelParams truth = gen_truth_orthonormal(3, 6, 13);
  const CovariateLaw law = CovariateLaw::standard_gaussian(6);
  int covered = 0;
  const int reps = 200;
  for (int r = 0; r < reps; ++r) {
    const GroundTruthGeometry geom =
        estimate_geometry(truth, law, 2000, 500 + static_cast<std::uint64_t>(r));
    if (std::abs(geom.pi_min - 1.0 / 3.0) <= geom.ci_halfwidth) ++covered;
  }
  CHECK(covered >= static_cast<int>(0.99 * reps));
}

TEST_CASE("estimate_geometry rejects tiny sample budgets") {
  const ModelParams truth = gen_truth_orthonormal(2, 3, 2);
  CHECK_THROWS_AS(estimate_geometry(truth, CovariateLaw::standard_gaussian(3), 500, 3),
                  InputError);
}

TEST_CASE("dataset CSV round trip is exact") {
  namespace fs = std::filesystem;
  const ModelParams truth = gen_truth_sphere(2, 3, 19);
  const Dataset data = gen_dataset(truth, CovariateLaw::standard_gaussian(3), 50, 0.3, 20);
  DatasetInfo info;
  info.k = 2;
  info.d = 3;
  info.n = 50;
  info.sigma = 0.3;
  info.law = CovariateLaw::standard_gaussian(3);
  info.seed = 20;
  info.truth = truth;

  const fs::path dir = fs::temp_directory_path() / "maxaffine_io_test";
  fs::create_directories(dir);
  const fs::path csv = dir / "data.csv";
  save_dataset(csv, data, info);
  auto [loaded, loaded_info] = load_dataset(csv);

  CHECK(loaded.n == data.n);
  CHECK((loaded.covariates - data.covariates).cwiseAbs().maxCoeff() == 0.0);
  CHECK((loaded.responses - data.responses).cwiseAbs().maxCoeff() == 0.0);
  CHECK(loaded_info.has_truth());
  CHECK((loaded_info.truth.blocks - truth.blocks).cwiseAbs().maxCoeff() == 0.0);
  CHECK(loaded_info.law.name() == "standard_gaussian");
  fs::remove_all(dir);
}

TEST_CASE("params JSON round trip is exact") {
  namespace fs = std::filesystem;
  const ModelParams truth = gen_truth_sphere(3, 5, 23);
  const fs::path dir = fs::temp_directory_path() / "maxaffine_io_test2";
  fs::create_directories(dir);
  save_params(dir / "p.json", truth);
  const ModelParams loaded = load_params(dir / "p.json");
  CHECK((loaded.blocks - truth.blocks).cwiseAbs().maxCoeff() == 0.0);
  fs::remove_all(dir);
}
