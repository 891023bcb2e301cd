#include "maxaffine/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace maxaffine {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw std::runtime_error("failed to format double");
  return std::string(buf, ptr);
}

fs::path sidecar_path(const fs::path& csv_path) {
  fs::path p = csv_path;
  p += ".json";
  return p;
}

namespace {

json blocks_to_json(const ModelParams& params) {
  json rows = json::array();
  for (int j = 0; j < params.k; ++j) {
    json row = json::array();
    for (int c = 0; c <= params.d; ++c) row.push_back(params.blocks(j, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

ModelParams blocks_from_json(int k, int d, const json& rows) {
  ModelParams params(k, d);
  if (static_cast<int>(rows.size()) != k) throw InputError("truth blocks have wrong row count");
  for (int j = 0; j < k; ++j) {
    const auto& row = rows.at(static_cast<std::size_t>(j));
    if (static_cast<int>(row.size()) != d + 1) throw InputError("truth block has wrong length");
    for (int c = 0; c <= d; ++c) params.blocks(j, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  return params;
}

double parse_double(const std::string& field) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) throw InputError("malformed numeric field: " + field);
  return value;
}

}  // namespace

void save_dataset(const fs::path& csv_path, const Dataset& data, const DatasetInfo& info) {
  data.validate();
  std::ofstream csv(csv_path);
  if (!csv) throw InputError("cannot open for writing: " + csv_path.string());
  for (int c = 0; c < data.d; ++c) csv << "x_" << (c + 1) << ",";
  csv << "y\n";
  for (long i = 0; i < data.n; ++i) {
    for (int c = 0; c < data.d; ++c) csv << format_double(data.covariates(i, c)) << ",";
    csv << format_double(data.responses(i)) << "\n";
  }
  csv.close();
  if (!csv) throw InputError("failed writing: " + csv_path.string());

  json side;
  side["schema_version"] = 1;
  side["k"] = info.k;
  side["d"] = data.d;
  side["n"] = data.n;
  side["sigma"] = data.sigma;
  side["law"] = info.law.name();
  if (info.law.kind == CovariateLaw::Kind::BetaIid) {
    side["beta_a"] = info.law.beta_a;
    side["beta_b"] = info.law.beta_b;
  }
  side["seed"] = info.seed;
  if (info.has_truth()) side["truth_blocks"] = blocks_to_json(info.truth);

  std::ofstream out(sidecar_path(csv_path));
  if (!out) throw InputError("cannot open for writing: " + sidecar_path(csv_path).string());
  out << side.dump(2) << "\n";
}

std::pair<Dataset, DatasetInfo> load_dataset(const fs::path& csv_path) {
  std::ifstream side_in(sidecar_path(csv_path));
  if (!side_in) throw InputError("missing dataset sidecar: " + sidecar_path(csv_path).string());
  json side;
  try {
    side_in >> side;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed dataset sidecar: ") + e.what());
  }

  DatasetInfo info;
  try {
    info.k = side.at("k").get<int>();
    info.d = side.at("d").get<int>();
    info.n = side.at("n").get<long>();
    info.sigma = side.at("sigma").get<double>();
    info.seed = side.at("seed").get<std::uint64_t>();
    info.law = CovariateLaw::from_name(side.at("law").get<std::string>(), info.d,
                                       side.value("beta_a", 2.0), side.value("beta_b", 2.0));
    if (side.contains("truth_blocks"))
      info.truth = blocks_from_json(info.k, info.d, side.at("truth_blocks"));
  } catch (const json::exception& e) {
    throw InputError(std::string("dataset sidecar misses fields: ") + e.what());
  }

  std::ifstream csv(csv_path);
  if (!csv) throw InputError("missing dataset file: " + csv_path.string());
  std::string line;
  if (!std::getline(csv, line)) throw InputError("dataset file is empty: " + csv_path.string());

  Dataset data;
  data.d = info.d;
  data.n = info.n;
  data.sigma = info.sigma;
  data.covariates.resize(info.n, info.d);
  data.responses.resize(info.n);
  for (long i = 0; i < info.n; ++i) {
    if (!std::getline(csv, line)) throw InputError("dataset file truncated");
    std::stringstream row(line);
    std::string field;
    for (int c = 0; c < info.d; ++c) {
      if (!std::getline(row, field, ',')) throw InputError("dataset row too short");
      data.covariates(i, c) = parse_double(field);
    }
    if (!std::getline(row, field, ',')) throw InputError("dataset row misses response");
    data.responses(i) = parse_double(field);
  }
  data.validate();
  return {std::move(data), std::move(info)};
}

void save_params(const fs::path& path, const ModelParams& params) {
  params.validate();
  json doc;
  doc["schema_version"] = 1;
  doc["k"] = params.k;
  doc["d"] = params.d;
  doc["blocks"] = blocks_to_json(params);
  std::ofstream out(path);
  if (!out) throw InputError("cannot open for writing: " + path.string());
  out << doc.dump(2) << "\n";
}

ModelParams load_params(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("missing parameter file: " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed parameter file: ") + e.what());
  }
  try {
    return blocks_from_json(doc.at("k").get<int>(), doc.at("d").get<int>(), doc.at("blocks"));
  } catch (const json::exception& e) {
    throw InputError(std::string("parameter file misses fields: ") + e.what());
  }
}

}  // namespace maxaffine
