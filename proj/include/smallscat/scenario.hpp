// Copyright The smallscat Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SMALLSCAT_SCENARIO_HPP
#define SMALLSCAT_SCENARIO_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "smallscat/types.hpp"

namespace smallscat
{

extern const char *const version_string;

// Column-oriented numeric table written as CSV with 17 significant digits.
struct Table
{
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::string to_csv() const;
  static Table from_csv(const std::string &text, const std::string &origin);
};

struct OutputFile
{
  std::string name;
  std::string content;
};

struct RunOptions
{
  std::optional<std::uint64_t> seed;
  int threads = 0;
};

struct RunResult
{
  std::string mode;
  std::vector<OutputFile> files;
  nlohmann::json manifest;
  // Text the command line prints on success (may be empty).
  std::string summary;
};

const std::vector<std::string> &scenario_modes();

// Validates and runs a scenario held in memory. `base_dir` resolves relative file paths.
// Nothing is written; the caller decides where the files go.
RunResult run_scenario(const std::string &mode, nlohmann::json scenario,
                       const RunOptions &options, const std::string &base_dir = ".");

// Reads the scenario file, runs it and writes every output plus manifest.json into
// `out_dir` only after the whole run succeeded.
RunResult run_scenario_file(const std::string &mode, const std::string &scenario_path,
                            const std::string &out_dir, const RunOptions &options);

struct ColumnError
{
  std::string file;
  std::string column;
  double error = 0.0;
};

struct CompareReport
{
  double tolerance = 0.0;
  double max_error = 0.0;
  bool passed = true;
  std::vector<ColumnError> columns;

  nlohmann::json to_json() const;
};

// Pairs every CSV file of `dir_a` with the same file in `dir_b`; re_X/im_X column pairs are
// compared as complex columns. Error per column: max_i |a_i - b_i| / max_i |b_i| (absolute when
// the reference column vanishes). Throws ValidationError "schema_mismatch" on differing files,
// headers or row counts.
CompareReport compare_runs(const std::string &dir_a, const std::string &dir_b, double tolerance);

}  // namespace smallscat

#endif  // SMALLSCAT_SCENARIO_HPP
