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


#include "subsum_cli/experiment.hpp"

#include <sys/resource.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <system_error>
#include <thread>
#include <utility>

#include "subsum/analysis.hpp"
#include "subsum/sieve.hpp"
#include "subsum/errors.hpp"

namespace subsum::cli {

namespace {

namespace fs = std::filesystem;

// Larger selections keep their blocks in the report; the full index list
// lives in selection.csv.
constexpr std::size_t kMaxReportedIndices = 100'000;

// An exception raised inside a library module, tagged with that module.
class ModuleError : public std::runtime_error {
 public:
  explicit ModuleError(Json detail)
      : std::runtime_error(detail.value("message", "")), detail_(std::move(detail)) {}
  const Json& detail() const noexcept { return detail_; }

 private:
  Json detail_;
};

Json describe(std::string_view module, const Error& e) {
  Json j{{"module", module}, {"message", e.what()}};
  if (const auto* v = dynamic_cast<const ValidationError*>(&e)) {
    j["kind"] = "validation_error";
    j["index"] = v->index();
  } else if (const auto* r = dynamic_cast<const ResourceLimitError*>(&e)) {
    j["kind"] = "resource_limit";
    j["largest_served"] = r->largest_served();
  } else if (const auto* s = dynamic_cast<const SequenceExhausted*>(&e)) {
    j["kind"] = "sequence_exhausted";
    j["length"] = s->length();
  } else if (const auto* a = dynamic_cast<const AchievementFailure*>(&e)) {
    j["kind"] = "achievement_failure";
    j["partial_selection"] = to_json(a->partial());
  } else if (dynamic_cast<const ParseError*>(&e) != nullptr) {
    j["kind"] = "parse_error";
  } else if (dynamic_cast<const DomainError*>(&e) != nullptr) {
    j["kind"] = "domain_error";
  } else {
    j["kind"] = "error";
  }
  return j;
}

template <typename F>
auto in_module(std::string_view module, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw ModuleError(describe(module, e));
  }
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

long peak_rss_kb() {
  rusage usage{};
  getrusage(RUSAGE_SELF, &usage);
  return usage.ru_maxrss;
}

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

// One target carried through the pipeline. Stages fill the optionals in
// order; `error` stops the pipeline.
struct Run {
  std::string target_text;
  std::string started_at;
  std::optional<Json> error;
  SequenceHandle seq;
  std::optional<Value> target;
  std::optional<ValidationReport> validation;
  std::optional<SelectionResult> selection;
  std::optional<RateEstimate> rate;
  std::optional<RateCertificate> certificate;
  std::vector<AlphaTail> tails;
  std::vector<std::pair<std::string, double>> timings;
};

Value parse_target(const std::string& text, Backend backend) {
  Rational q = in_module("cli", [&] { return parse_rational(text); });
  if (sgn(q) <= 0) {
    throw ModuleError(Json{{"module", "cli"},
                           {"kind", "domain_error"},
                           {"message", "target must be positive, got " + text}});
  }
  return Value(std::move(q)).to_backend(backend);
}

// Sequence, validation, selection and rate estimate.
void start_run(Run& run, const ExperimentConfig& config) {
  run.started_at = utc_timestamp();
  Stopwatch clock;
  try {
    run.target = parse_target(run.target_text, config.backend);
    in_module("cli", [&] { config.stop.validate(); });
    run.seq = in_module("sequences", [&] { return build_sequence(config.sequence, config.backend); });
    run.timings.emplace_back("build", clock.lap());
    run.validation = in_module("sequences", [&] { return validate_prefix(*run.seq, config.validate_n); });
    run.timings.emplace_back("validate", clock.lap());
    if (!run.validation->passed) return;
    run.selection = in_module("achiever", [&] { return achieve(*run.seq, *run.target, config.stop); });
    run.timings.emplace_back("achieve", clock.lap());
    RateOptions options;
    options.epsilon = config.epsilon;
    options.declared_L = config.declared_L;
    run.rate = in_module("analysis", [&] { return estimate_rate_for(*run.seq, *run.selection, options); });
    run.timings.emplace_back("estimate", clock.lap());
  } catch (const ModuleError& e) {
    run.error = e.detail();
  }
}

// Certificate and alpha tails.
void finish_run(Run& run, const ExperimentConfig& config, std::optional<double> theta) {
  if (run.error || !run.rate) return;
  Stopwatch clock;
  try {
    CertifyOptions options;
    options.theta = theta;
    run.certificate =
        in_module("analysis", [&] { return certify(*run.selection, *run.rate, *run.seq, options); });
    run.timings.emplace_back("certify", clock.lap());
    run.tails = in_module("analysis", [&] {
      return alpha_tail(*run.selection, *run.seq, *run.certificate, config.alphas);
    });
    run.timings.emplace_back("alpha_tail", clock.lap());
  } catch (const ModuleError& e) {
    run.error = e.detail();
  }
}

int exit_code_of(const Run& run) {
  if (run.error) return (*run.error)["module"] == "cli" ? kExitUsage : kExitError;
  if (!run.certificate) return kExitNotCertified;
  const bool ok = run.certificate->verdict == Verdict::pass &&
                  run.selection->termination == Termination::tolerance_met;
  return ok ? kExitOk : kExitNotCertified;
}

std::string status_of(const Run& run) {
  if (run.error) return "error";
  if (run.validation && !run.validation->passed) return "invalid_sequence";
  if (!run.certificate) return "incomplete";
  if (run.certificate->verdict == Verdict::refused) return "refused";
  return exit_code_of(run) == kExitOk ? "pass" : "not_certified";
}

std::string reason_of(const Run& run) {
  if (run.error) return (*run.error)["message"].get<std::string>();
  if (run.validation && !run.validation->passed) {
    return run.validation->problem + " at index " + std::to_string(*run.validation->offending_index);
  }
  if (!run.certificate) return "";
  if (run.certificate->verdict != Verdict::pass) return run.certificate->reason;
  if (run.selection->termination != Termination::tolerance_met) {
    return "stopped by " + std::string(to_string(run.selection->termination)) + ": " +
           run.selection->diagnostic;
  }
  return "certificate passed and residual within tolerance";
}

Json residual_bits(const SelectionResult& s) {
  if (!s.final_residual.is_exact()) return nullptr;
  Json per_block = Json::array();
  std::size_t max_num = 0;
  std::size_t max_den = 0;
  for (std::size_t i = 0; i < s.blocks.size(); ++i) {
    const Rational& r = s.blocks[i].residual_after.rational();
    const std::size_t num = bit_length(r.get_num());
    const std::size_t den = bit_length(r.get_den());
    max_num = std::max(max_num, num);
    max_den = std::max(max_den, den);
    per_block.push_back(Json{{"n", i + 1}, {"num", num}, {"den", den}});
  }
  return Json{{"max_num", max_num}, {"max_den", max_den}, {"per_block", std::move(per_block)}};
}

Json run_info(const Run& run) {
  Json timings = Json::object();
  for (const auto& [stage, seconds] : run.timings) timings[stage] = seconds;
  return Json{{"started_at", run.started_at},
              {"timings_s", std::move(timings)},
              {"peak_rss_kb", peak_rss_kb()}};
}

Json selection_json(const SelectionResult& s) {
  Json j = to_json(s);
  if (s.indices.size() > kMaxReportedIndices) {
    j["indices"] = nullptr;
    j["indices_omitted"] = s.indices.size();
  }
  return j;
}

Json build_report(const Run& run, const ExperimentConfig& config, std::string_view command) {
  Json config_json = config_to_json(config);
  config_json["target"] = run.target_text;
  config_json.erase("targets");
  Json report{{"schema_version", kSchemaVersion},
              {"command", command},
              {"config", std::move(config_json)},
              {"status", status_of(run)},
              {"exit_code", exit_code_of(run)},
              {"reason", reason_of(run)}};
  report["error"] = run.error ? *run.error : Json(nullptr);
  report["validation"] = run.validation ? to_json(*run.validation) : Json(nullptr);
  report["selection"] = run.selection ? selection_json(*run.selection) : Json(nullptr);
  report["residual_bits"] = run.selection ? residual_bits(*run.selection) : Json(nullptr);
  report["rate"] = run.rate ? to_json(*run.rate) : Json(nullptr);
  report["certificate"] = run.certificate ? to_json(*run.certificate) : Json(nullptr);
  Json tails = Json::array();
  for (const AlphaTail& t : run.tails) tails.push_back(to_json(t));
  report["alpha_tails"] = std::move(tails);
  report["run_info"] = run_info(run);
  return report;
}

template <typename Writer>
std::string render(Writer&& writer) {
  std::ostringstream out;
  writer(out);
  return out.str();
}

void write_run(const Run& run, const Json& report, const fs::path& dir) {
  fs::create_directories(dir);
  if (run.selection && run.seq) {
    const std::vector<SelectedTerm> terms = flatten(*run.selection, *run.seq);
    write_file_atomic(dir / "selection.csv",
                      render([&](std::ostream& o) { write_selection_csv(o, terms); }));
    if (run.certificate) {
      write_file_atomic(dir / "certificate.csv", render([&](std::ostream& o) {
                          write_certificate_csv(o, *run.certificate, terms);
                        }));
    }
    if (!run.tails.empty()) {
      write_file_atomic(dir / "alpha.csv",
                        render([&](std::ostream& o) { write_alpha_csv(o, run.tails); }));
    }
  }
  write_file_atomic(dir / "report.json", dump_report(report));
}

template <typename F>
void parallel_for(std::size_t count, unsigned jobs, F&& body) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, count));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) body(i);
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
}

}  // namespace

Json config_to_json(const ExperimentConfig& config) {
  Json stop{{"max_blocks", config.stop.max_blocks ? Json(*config.stop.max_blocks) : Json(nullptr)},
            {"max_index", config.stop.max_index ? Json(*config.stop.max_index) : Json(nullptr)},
            {"absolute_tolerance", config.stop.absolute_tolerance.get_str()},
            {"relative_tolerance", config.stop.relative_tolerance}};
  Json sequence = to_json(config.sequence);
  if (config.sequence.family == Family::prime_reciprocal && config.sequence.sieve_cap == 0) {
    sequence["sieve_cap"] = default_sieve_cap();
  }
  return Json{{"sequence", std::move(sequence)},
              {"target", config.target},
              {"targets", config.targets},
              {"backend", std::string(to_string(config.backend))},
              {"stop", std::move(stop)},
              {"alphas", config.alphas},
              {"epsilon", config.epsilon ? Json(*config.epsilon) : Json(nullptr)},
              {"declared_L", config.declared_L ? Json(*config.declared_L) : Json(nullptr)},
              {"theta", config.theta ? Json(*config.theta) : Json(nullptr)},
              {"validate_n", config.validate_n}};
}

std::string dump_report(const Json& report) { return report.dump(2) + "\n"; }

void write_file_atomic(const fs::path& path, std::string_view content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::vector<double> parse_alpha_list(std::string_view text) {
  std::vector<double> alphas;
  while (!text.empty()) {
    const std::size_t comma = text.find(',');
    const std::string item(text.substr(0, comma));
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || !(value > 0.0) || !std::isfinite(value)) {
      throw ParseError("alpha must be a positive number, got '" + item + "'");
    }
    alphas.push_back(value);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  if (alphas.empty()) throw ParseError("empty alpha list");
  return alphas;
}

RunResult cmd_achieve(const ExperimentConfig& config) {
  Run run;
  run.target_text = config.target;
  start_run(run, config);
  finish_run(run, config, config.theta);
  RunResult result{exit_code_of(run), build_report(run, config, "achieve")};
  if (!config.out_dir.empty()) write_run(run, result.report, config.out_dir);
  return result;
}

RunResult cmd_sweep(const ExperimentConfig& config) {
  if (config.targets.empty()) {
    Json report{{"schema_version", kSchemaVersion},
                {"command", "sweep"},
                {"config", config_to_json(config)},
                {"status", "error"},
                {"exit_code", kExitUsage},
                {"reason", "sweep needs a nonempty target grid"},
                {"error", {{"module", "cli"},
                           {"kind", "usage_error"},
                           {"message", "sweep needs a nonempty target grid"}}}};
    return {kExitUsage, std::move(report)};
  }

  std::vector<Run> runs(config.targets.size());
  for (std::size_t i = 0; i < runs.size(); ++i) runs[i].target_text = config.targets[i];
  parallel_for(runs.size(), config.jobs, [&](std::size_t i) { start_run(runs[i], config); });

  // The shared rate: the slowest theta any run's own estimate supports.
  std::optional<double> shared = config.theta;
  if (!shared) {
    for (const Run& run : runs) {
      if (!run.rate || !(run.rate->L_tilde > 0.5 && run.rate->L_tilde < 1.0)) continue;
      const double t = theta(run.rate->L_tilde, kappa_bound(run.rate->L_tilde));
      shared = shared ? std::max(*shared, t) : t;
    }
  }

  std::vector<Json> reports(runs.size());
  parallel_for(runs.size(), config.jobs, [&](std::size_t i) {
    finish_run(runs[i], config, shared);
    reports[i] = build_report(runs[i], config, "sweep");
    if (!config.out_dir.empty()) {
      write_run(runs[i], reports[i], config.out_dir / ("run-" + std::to_string(i)));
    }
  });

  Json per_target = Json::array();
  std::map<Index, std::size_t> histogram;
  std::optional<double> min_log10_c;
  std::optional<double> max_log10_c;
  std::size_t passed = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const Run& run = runs[i];
    const int code = exit_code_of(run);
    if (code == kExitOk) ++passed;
    Json entry{{"target", run.target_text},
               {"status", status_of(run)},
               {"exit_code", code},
               {"reason", reason_of(run)}};
    entry["termination"] =
        run.selection ? Json(std::string(to_string(run.selection->termination))) : Json(nullptr);
    entry["blocks"] = run.selection ? Json(run.selection->blocks.size()) : Json(nullptr);
    entry["log10_C"] = nullptr;
    entry["C"] = nullptr;
    if (run.certificate && run.certificate->verdict != Verdict::refused &&
        std::isfinite(run.certificate->log10_C)) {
      const double lc = run.certificate->log10_C;
      entry["log10_C"] = lc;
      entry["C"] = format_log10(lc);
      min_log10_c = min_log10_c ? std::min(*min_log10_c, lc) : lc;
      max_log10_c = max_log10_c ? std::max(*max_log10_c, lc) : lc;
    }
    if (run.selection) {
      for (const Block& b : run.selection->blocks) ++histogram[b.length()];
    }
    per_target.push_back(std::move(entry));
  }
  Json kappa = Json::object();
  for (const auto& [length, count] : histogram) kappa[std::to_string(length)] = count;

  const int code = passed == runs.size() ? kExitOk : kExitNotCertified;
  Json report{{"schema_version", kSchemaVersion},
              {"command", "sweep"},
              {"config", config_to_json(config)},
              {"status", code == kExitOk ? "pass" : "not_certified"},
              {"exit_code", code},
              {"reason", std::to_string(passed) + " of " + std::to_string(runs.size()) +
                             " runs passed"},
              {"theta", shared ? Json(*shared) : Json(nullptr)},
              {"runs", std::move(per_target)},
              {"log10_C_min", min_log10_c ? Json(*min_log10_c) : Json(nullptr)},
              {"log10_C_max", max_log10_c ? Json(*max_log10_c) : Json(nullptr)},
              {"kappa_histogram", std::move(kappa)}};
  if (!config.out_dir.empty()) write_file_atomic(config.out_dir / "sweep.json", dump_report(report));
  report["run_reports"] = std::move(reports);
  return {code, std::move(report)};
}

RunResult cmd_validate(const ExperimentConfig& config) {
  Json report{{"schema_version", kSchemaVersion},
              {"command", "validate"},
              {"config", {{"sequence", to_json(config.sequence)},
                          {"backend", std::string(to_string(config.backend))},
                          {"validate_n", config.validate_n}}}};
  int code = kExitOk;
  Stopwatch clock;
  try {
    // A term list is loaded unchecked so the report can name the offending
    // index instead of failing at load time.
    SequenceHandle seq = in_module("sequences", [&] {
      if (config.sequence.family != Family::file_backed) {
        return build_sequence(config.sequence, config.backend);
      }
      return make_term_list_sequence(parse_sequence_file(config.sequence.path), config.backend,
                                     false, config.sequence.declared_L);
    });
    const ValidationReport v =
        in_module("sequences", [&] { return validate_prefix(*seq, config.validate_n); });
    code = v.passed ? kExitOk : kExitNotCertified;
    report["status"] = v.passed ? "pass" : "fail";
    report["reason"] = v.passed ? std::to_string(v.checked) + " terms checked"
                                : v.problem + " at index " + std::to_string(*v.offending_index);
    report["validation"] = to_json(v);
    report["error"] = nullptr;
  } catch (const ModuleError& e) {
    code = kExitError;
    report["status"] = "error";
    report["reason"] = e.detail()["message"];
    report["validation"] = nullptr;
    report["error"] = e.detail();
  }
  report["exit_code"] = code;
  report["run_info"] = Json{{"started_at", utc_timestamp()},
                            {"timings_s", {{"validate", clock.lap()}}},
                            {"peak_rss_kb", peak_rss_kb()}};
  if (!config.out_dir.empty()) {
    fs::create_directories(config.out_dir);
    write_file_atomic(config.out_dir / "validation.json", dump_report(report));
  }
  return {code, std::move(report)};
}

}  // namespace subsum::cli
