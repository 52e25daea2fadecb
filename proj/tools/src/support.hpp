// Shared plumbing for the excerptlab command-line tool: JSON/CSV result
// emission, run-configuration echoing, and audio directory scanning.
#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "excerptlab/estimators.hpp"

namespace excerptlab::cli {

#ifndef EXCERPTLAB_VERSION
#define EXCERPTLAB_VERSION "0.0.0"
#endif

inline constexpr const char* kVersion = EXCERPTLAB_VERSION;

// Serializes with a trailing newline and writes atomically (temp file +
// rename); identical inputs produce byte-identical files.
void write_json_atomic(const std::string& path, const nlohmann::json& j);

// Writes `j` to the file when `path` is nonempty, else to stdout.
void emit_json(const std::string& path, const nlohmann::json& j);

// {"<name>": {"est": ..., "se": ..., "ci95": [lo, hi]}, ...} using the
// conventional 1.96 normal interval.
nlohmann::json coef_json(const EstimateResult& result);

// Estimation result wrapper: version, echoed run spec, coefficient map,
// nobs, clusters, reference (null when none), dropped columns.
nlohmann::json result_json(const nlohmann::json& spec,
                           const EstimateResult& result);

// Plot-ready table for binned designs, rows sorted by bin index:
//   k,estimate,lo95,hi95,n_treated_in_bin
// with lo95/hi95 = estimate -/+ 1.96*se.  `prefix` is the coefficient
// name prefix to strip ("k=" or "decile=").
std::string bin_table_csv(const EstimateResult& result,
                          const std::string& prefix);

// All *.wav paths directly inside `dir`, sorted by filename for a
// deterministic scan order.  DataError when the directory cannot be read
// or holds no wav files.
std::vector<std::string> wav_files_sorted(const std::string& dir);

// Filename without directory or .wav extension; the unit id in reports.
std::string unit_id_from_path(const std::string& path);

}  // namespace excerptlab::cli
