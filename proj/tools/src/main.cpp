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


// subsum: greedy subseries construction with rate certificates.
//
//   subsum achieve  --seq harmonic --target 1
//   subsum sweep    --seq harmonic --targets 0.1,1,2.5,10 --theta 0.9
//   subsum validate --seq primes --N 100000

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "subsum/errors.hpp"
#include "subsum_cli/experiment.hpp"

namespace {

using subsum::cli::ExperimentConfig;

struct Options {
  std::string seq;  // harmonic, or file when --file is given
  std::string ratio = "1/2";
  std::string file;
  std::string backend = "rational";
  std::string tol;
  std::string abs_tol;
  std::optional<long long> max_blocks;
  std::optional<long long> max_index;
  std::string alphas;
  std::optional<double> epsilon;
  std::optional<double> declared_l;
  std::optional<double> theta;
  std::string out;
  bool json = false;
};

void add_sequence_options(CLI::App& cmd, Options& o) {
  cmd.add_option("--seq", o.seq, "harmonic|log-harmonic|step-geometric|primes|file")
      ->check(CLI::IsMember({"harmonic", "log-harmonic", "step-geometric", "primes", "file"}));
  cmd.add_option("--ratio", o.ratio, "step-geometric ratio r in (0,1), e.g. 3/5");
  cmd.add_option("--file", o.file, "term list; implies --seq file");
  cmd.add_option("--declared-l", o.declared_l, "liminf of x_{n+1}/x_n to trust");
  cmd.add_option("--backend", o.backend, "rational|float")
      ->check(CLI::IsMember({"rational", "float"}));
  cmd.add_option("--out", o.out, "report directory");
  cmd.add_flag("--json", o.json, "print the full report on stdout");
}

void add_run_options(CLI::App& cmd, Options& o) {
  cmd.add_option("--tol", o.tol, "relative residual tolerance (default 1e-12)");
  cmd.add_option("--abs-tol", o.abs_tol, "absolute residual tolerance (default 0)");
  cmd.add_option("--max-blocks", o.max_blocks, "block limit, 0 for none (default 64)");
  cmd.add_option("--max-index", o.max_index, "index limit, 0 for none (default 1e7)");
  cmd.add_option("--alphas", o.alphas, "exponents for tail tables (default 0.5,1,2)");
  cmd.add_option("--epsilon", o.epsilon, "margin below L (default min(0.01,(L-1/2)/2))");
  cmd.add_option("--theta", o.theta, "certify against this rate");
}

std::optional<subsum::Index> limit(std::optional<long long> v, const char* name) {
  if (*v < 0) throw subsum::ParseError(std::string(name) + " must be >= 0");
  if (*v == 0) return std::nullopt;
  return static_cast<subsum::Index>(*v);
}

ExperimentConfig make_config(const Options& o) {
  ExperimentConfig config;
  const std::string seq = !o.seq.empty() ? o.seq : o.file.empty() ? "harmonic" : "file";
  if (!o.file.empty() && seq != "file") throw subsum::ParseError("--file needs --seq file");
  const subsum::Family family = subsum::parse_family(seq);
  switch (family) {
    case subsum::Family::harmonic:
      config.sequence = subsum::SequenceSpec::harmonic();
      break;
    case subsum::Family::log_harmonic:
      config.sequence = subsum::SequenceSpec::log_harmonic();
      break;
    case subsum::Family::step_geometric:
      config.sequence = subsum::SequenceSpec::step_geometric(subsum::parse_rational(o.ratio));
      break;
    case subsum::Family::prime_reciprocal:
      config.sequence = subsum::SequenceSpec::primes();
      break;
    case subsum::Family::file_backed:
      if (o.file.empty()) throw subsum::ParseError("--seq file needs --file");
      config.sequence = subsum::SequenceSpec::file(o.file);
      break;
  }
  if (o.declared_l) config.sequence.declared_L = *o.declared_l;
  config.sequence.validate();
  config.backend = subsum::parse_backend(o.backend);
  if (!o.tol.empty()) {
    config.stop.relative_tolerance = subsum::parse_rational(o.tol).get_d();
  }
  if (!o.abs_tol.empty()) config.stop.absolute_tolerance = subsum::parse_rational(o.abs_tol);
  if (o.max_blocks) config.stop.max_blocks = limit(o.max_blocks, "--max-blocks");
  if (o.max_index) config.stop.max_index = limit(o.max_index, "--max-index");
  config.stop.validate();
  if (!o.alphas.empty()) config.alphas = subsum::cli::parse_alpha_list(o.alphas);
  config.epsilon = o.epsilon;
  config.declared_L = o.declared_l;
  config.theta = o.theta;
  if (config.theta && !(*config.theta > 0.0 && *config.theta < 1.0)) {
    throw subsum::DomainError("--theta must lie in (0, 1)");
  }
  config.out_dir = o.out;
  return config;
}

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> items;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string item = text.substr(start, comma - start);
    if (!item.empty()) items.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return items;
}

int emit(const subsum::cli::RunResult& result, const Options& o) {
  const auto& r = result.report;
  if (o.json || o.out.empty()) {
    std::cout << subsum::cli::dump_report(r);
  } else {
    std::cout << r.value("status", "") << ": " << r.value("reason", "") << "\n";
  }
  if (result.exit_code != subsum::cli::kExitOk && r.contains("error") && !r["error"].is_null()) {
    const auto& e = r["error"];
    std::cerr << "subsum: " << e.value("module", "") << ": " << e.value("kind", "") << ": "
              << e.value("message", "") << "\n";
  }
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Greedy subseries construction with geometric rate certificates"};
  app.require_subcommand(1);
  Options o;

  std::string target = "1";
  auto* achieve = app.add_subcommand("achieve", "select a subseries summing to a target");
  add_sequence_options(*achieve, o);
  add_run_options(*achieve, o);
  achieve->add_option("--target", target, "target sum, decimal or p/q (default 1)");

  std::string targets;
  auto* sweep = app.add_subcommand("sweep", "run achieve over a target grid with a shared rate");
  add_sequence_options(*sweep, o);
  add_run_options(*sweep, o);
  sweep->add_option("--targets", targets, "comma-separated target grid")->required();
  unsigned jobs = 0;
  sweep->add_option("--jobs", jobs, "worker threads (default: all cores)");

  long long n = 10000;
  auto* validate = app.add_subcommand("validate", "check positivity and monotonicity of a prefix");
  add_sequence_options(*validate, o);
  validate->add_option("--N", n, "prefix length (default 10000)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : subsum::cli::kExitUsage;
  }

  ExperimentConfig config;
  try {
    config = make_config(o);
    config.target = target;
    config.targets = split(targets);
    config.jobs = jobs;
    if (n < 2) throw subsum::DomainError("--N must be at least 2");
    config.validate_n = static_cast<subsum::Index>(n);
  } catch (const subsum::Error& e) {
    std::cerr << "subsum: cli: " << e.what() << "\n";
    return subsum::cli::kExitUsage;
  }

  try {
    if (achieve->parsed()) return emit(subsum::cli::cmd_achieve(config), o);
    if (sweep->parsed()) return emit(subsum::cli::cmd_sweep(config), o);
    return emit(subsum::cli::cmd_validate(config), o);
  } catch (const std::exception& e) {
    std::cerr << "subsum: " << e.what() << "\n";
    return subsum::cli::kExitError;
  }
}
