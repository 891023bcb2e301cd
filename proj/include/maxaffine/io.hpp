#pragma once

#include <filesystem>
#include <string>

#include "maxaffine/datagen.hpp"
#include "maxaffine/model.hpp"

namespace maxaffine {

/// Shortest round-trip decimal representation of a double. Locale-free and
/// byte-stable, so files written from the same values compare equal.
std::string format_double(double value);

/// Dataset metadata that travels in the JSON sidecar next to the CSV.
struct DatasetInfo {
  int k = 0;
  int d = 0;
  long n = 0;
  double sigma = 0.0;
  CovariateLaw law;
  std::uint64_t seed = 0;
  ModelParams truth;      // empty (k == 0) when no ground truth is recorded
  bool has_truth() const { return truth.k > 0; }
};

/// Writes covariates and responses as CSV with header x_1,...,x_d,y and the
/// sidecar <path>.json with {k, d, n, sigma, law, seed, truth blocks}.
void save_dataset(const std::filesystem::path& csv_path, const Dataset& data,
                  const DatasetInfo& info);

/// Reads a dataset CSV plus its sidecar. The sidecar path is derived from
/// the CSV path by appending ".json".
std::pair<Dataset, DatasetInfo> load_dataset(const std::filesystem::path& csv_path);

void save_params(const std::filesystem::path& path, const ModelParams& params);
ModelParams load_params(const std::filesystem::path& path);

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

}  // namespace maxaffine
