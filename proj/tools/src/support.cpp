#include "support.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <system_error>

#include "excerptlab/csv.hpp"
#include "excerptlab/errors.hpp"

namespace excerptlab::cli {

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_json_atomic(const std::string& path, const nlohmann::json& j) {
  write_file_atomic(path, j.dump(2) + "\n");
}

void emit_json(const std::string& path, const nlohmann::json& j) {
  if (path.empty())
    std::cout << j.dump(2) << "\n";
  else
    write_json_atomic(path, j);
}

nlohmann::json coef_json(const EstimateResult& result) {
  nlohmann::json coefs = nlohmann::json::object();
  for (Eigen::Index i = 0; i < result.coef.size(); ++i) {
    const double est = result.coef(i);
    const double se = result.se(i);
    coefs[result.names[static_cast<std::size_t>(i)]] = {
        {"est", est},
        {"se", se},
        {"ci95", {est - 1.96 * se, est + 1.96 * se}},
    };
  }
  return coefs;
}

nlohmann::json result_json(const nlohmann::json& spec,
                           const EstimateResult& result) {
  nlohmann::json out;
  out["version"] = kVersion;
  out["spec"] = spec;
  out["coef"] = coef_json(result);
  out["nobs"] = result.nobs;
  out["clusters"] = result.cluster_count;
  if (result.reference.empty())
    out["reference"] = nullptr;
  else
    out["reference"] = result.reference;
  out["dropped"] = result.dropped;
  return out;
}

std::string bin_table_csv(const EstimateResult& result,
                          const std::string& prefix) {
  struct Row {
    int k;
    std::string line;
  };
  std::vector<Row> rows;
  rows.reserve(result.names.size());
  for (Eigen::Index i = 0; i < result.coef.size(); ++i) {
    const std::string& name = result.names[static_cast<std::size_t>(i)];
    if (name.rfind(prefix, 0) != 0)
      throw DataError("coefficient '" + name +
                      "' does not belong to a binned design");
    const int k = std::stoi(name.substr(prefix.size()));
    const double est = result.coef(i);
    const double se = result.se(i);
    const long treated =
        result.n_treated_in_bin.empty()
            ? 0
            : result.n_treated_in_bin[static_cast<std::size_t>(i)];
    rows.push_back({k, std::to_string(k) + "," + format_double(est) + "," +
                           format_double(est - 1.96 * se) + "," +
                           format_double(est + 1.96 * se) + "," +
                           std::to_string(treated)});
  }
  std::sort(rows.begin(), rows.end(),
            [](const Row& a, const Row& b) { return a.k < b.k; });
  std::string csv = "k,estimate,lo95,hi95,n_treated_in_bin\n";
  for (const Row& r : rows) csv += r.line + "\n";
  return csv;
}

std::vector<std::string> wav_files_sorted(const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::directory_iterator it(dir, ec);
  if (ec)
    throw DataError("cannot read directory '" + dir + "': " + ec.message());
  std::vector<std::string> paths;
  for (const fs::directory_entry& entry : it) {
    if (entry.is_regular_file() && entry.path().extension() == ".wav")
      paths.push_back(entry.path().string());
  }
  if (paths.empty())
    throw DataError("directory '" + dir + "' holds no .wav files");
  std::sort(paths.begin(), paths.end());
  return paths;
}

std::string unit_id_from_path(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

}  // namespace excerptlab::cli
