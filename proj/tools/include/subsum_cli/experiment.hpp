// Copyright 2026 The subsum Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef SUBSUM_CLI_EXPERIMENT_HPP_
#define SUBSUM_CLI_EXPERIMENT_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "subsum/achiever.hpp"
#include "subsum/numerics.hpp"
#include "subsum/sequences.hpp"
#include "subsum/serialize.hpp"

namespace subsum::cli {

inline constexpr int kSchemaVersion = 1;

// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitNotCertified = 1,  // ran, but no tolerance_met + passing certificate
  kExitUsage = 2,
  kExitError = 3,         // an error raised by a library module
};

struct ExperimentConfig {
  SequenceSpec sequence;
  // Exact rational or decimal literal.
  std::string target = "1";
  // Sweep grid; cmd_sweep ignores `target`.
  std::vector<std::string> targets;
  Backend backend = Backend::rational;
  StopPolicy stop;
  std::vector<double> alphas{0.5, 1.0, 2.0};
  std::optional<double> epsilon;
  std::optional<double> declared_L;
  // Certify against this rate instead of the one derived from L_tilde.
  std::optional<double> theta;
  // Prefix length checked before a run, and by cmd_validate.
  Index validate_n = 10'000;
  // Report directory; empty means nothing is written.
  std::filesystem::path out_dir;
  // Sweep worker threads; 0 picks the hardware concurrency.
  unsigned jobs = 0;
};

struct RunResult {
  int exit_code = kExitOk;
  Json report;
};

// validate_prefix, achieve, certify and alpha_tail for config.target.
// Writes report.json, selection.csv, certificate.csv and alpha.csv into
// out_dir when set.
RunResult cmd_achieve(const ExperimentConfig& config);

// cmd_achieve for every target with one shared theta: config.theta when
// given, otherwise the slowest rate derived across the grid. Each run is
// written to out_dir/run-<i>/ and the aggregate to out_dir/sweep.json.
RunResult cmd_sweep(const ExperimentConfig& config);

// validate_prefix over the first config.validate_n terms.
RunResult cmd_validate(const ExperimentConfig& config);

Json config_to_json(const ExperimentConfig& config);

// Canonical report text: two-space indentation and a trailing newline.
std::string dump_report(const Json& report);

// Writes through a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// Comma-separated list of positive numbers ("0.5,1,2").
std::vector<double> parse_alpha_list(std::string_view text);

}  // namespace subsum::cli

#endif  // SUBSUM_CLI_EXPERIMENT_HPP_
