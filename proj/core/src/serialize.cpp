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

#include "subsum/serialize.hpp"

#include <cmath>
#include <cstdio>

namespace subsum {

namespace {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Json optional_number(const std::optional<double>& v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return *v;
}

std::string_view to_string(CertificateRow::Check c) {
  switch (c) {
    case CertificateRow::Check::pass:
      return "pass";
    case CertificateRow::Check::fail:
      return "fail";
    case CertificateRow::Check::pre_tail:
      break;
  }
  return "pre_tail";
}

}  // namespace

Json to_json(const Value& v) {
  if (v.is_exact()) {
    return Json{{"num", v.rational().get_num().get_str()},
                {"den", v.rational().get_den().get_str()}};
  }
  return Json{{"est", v.approx().estimate}, {"err", v.approx().error_bound}};
}

Value value_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("value must be a JSON object");
  if (j.contains("num") && j.contains("den")) {
    return Value(parse_rational(j.at("num").get<std::string>() + "/" +
                                j.at("den").get<std::string>()));
  }
  if (j.contains("est") && j.contains("err")) {
    return Value(Approx{j.at("est").get<double>(), j.at("err").get<double>()});
  }
  throw ParseError("value needs {num, den} or {est, err}");
}

Json to_json(const Block& b) {
  return Json{{"a", b.a}, {"b", b.b}, {"S", to_json(b.sum)},
              {"residual_after", to_json(b.residual_after)}};
}

Json to_json(const SelectionResult& s) {
  Json blocks = Json::array();
  for (const Block& b : s.blocks) blocks.push_back(to_json(b));
  Json j{{"target", to_json(s.target)},
         {"blocks", std::move(blocks)},
         {"indices", s.indices},
         {"termination", std::string(to_string(s.termination))},
         {"final_residual", to_json(s.final_residual)},
         {"diagnostic", s.diagnostic}};
  j["stopped_at"] = s.stopped_at ? Json(*s.stopped_at) : Json(nullptr);
  if (s.final_residual.is_exact()) {
    const Rational& r = s.final_residual.rational();
    j["residual_bits"] = Json{{"num", bit_length(r.get_num())},
                              {"den", bit_length(r.get_den())}};
  }
  return j;
}

Json to_json(const RateEstimate& r) {
  return Json{{"L_declared", optional_number(r.L_declared)},
              {"L_hat", r.L_hat},
              {"L_hat_at", r.L_hat_at},
              {"window", {r.window_begin, r.window_end}},
              {"heuristic", r.heuristic},
              {"epsilon", r.epsilon},
              {"L_tilde", r.L_tilde},
              {"N_epsilon", r.N_epsilon}};
}

Json to_json(const RateCertificate& c) {
  Json decay = Json::array();
  for (const DecayCheck& d : c.decay) {
    decay.push_back(Json{{"n", d.n}, {"lhs", d.lhs}, {"rhs", d.rhs},
                         {"holds", std::string(to_string(d.holds))}});
  }
  Json j{{"verdict", std::string(to_string(c.verdict))},
         {"reason", c.reason},
         {"L_tilde", c.L_tilde},
         {"epsilon", c.epsilon},
         {"L_declared", optional_number(c.L_declared)},
         {"heuristic", c.heuristic},
         {"K", c.K},
         {"theta", c.theta},
         {"theta_formula", c.theta_formula},
         {"theta_overridden", c.theta_overridden},
         {"theta_single_term", optional_number(c.theta_single_term)},
         {"N_epsilon", c.N_epsilon},
         {"k0", c.k0},
         {"N_block", c.N_block},
         {"log10_C", std::isfinite(c.log10_C) ? Json(c.log10_C) : Json(nullptr)},
         {"C", std::isfinite(c.log10_C) ? Json(format_log10(c.log10_C)) : Json(nullptr)},
         {"table_rows", c.rows.size()},
         {"kappa_series", c.kappa},
         {"kappa_violations", c.kappa_violations},
         {"block_decay", std::move(decay)},
         {"block_decay_violations", c.decay_violations},
         {"block_decay_unverified", c.decay_unverified},
         {"log10_C_block", optional_number(c.log10_C_block)},
         {"empirical_rate", optional_number(c.empirical_rate)}};
  return j;
}

Json to_json(const AlphaTail& t) {
  Json j{{"alpha", t.alpha},
         {"terms", t.partial_sums.size()},
         {"partial_sum", t.partial_sums.empty() ? 0.0 : t.partial_sums.back()},
         {"tail_bound", optional_number(t.tail_bound)},
         {"upper_bound", optional_number(t.upper_bound)}};
  j["exact_sum"] = t.exact_sum ? to_json(*t.exact_sum) : Json(nullptr);
  return j;
}

Json to_json(const ValidationReport& v) {
  Json j{{"passed", v.passed},
         {"checked", v.checked},
         {"problem", v.problem},
         {"unverifiable", v.unverifiable}};
  j["offending_index"] = v.offending_index ? Json(*v.offending_index) : Json(nullptr);
  if (v.min_ratio) {
    j["min_ratio"] = Json{{"value", to_json(v.min_ratio->ratio)}, {"at", v.min_ratio->at}};
  } else {
    j["min_ratio"] = nullptr;
  }
  return j;
}

Json to_json(const SequenceSpec& s) {
  Json j{{"family", std::string(to_string(s.family))},
         {"declared_L", optional_number(s.declared_L)}};
  if (s.family == Family::step_geometric) j["ratio"] = s.ratio.get_str();
  if (s.family == Family::file_backed) j["path"] = s.path.string();
  if (s.family == Family::prime_reciprocal) j["sieve_cap"] = s.sieve_cap;
  return j;
}

std::string decimal_string(const Value& v, int digits) {
  if (v.is_exact()) return to_decimal_string(v.rational(), digits);
  return format_double(v.approx().estimate);
}

std::string format_log10(double log10_value, int digits) {
  if (!std::isfinite(log10_value)) return log10_value > 0 ? "inf" : "0";
  double exponent = std::floor(log10_value);
  double mantissa = std::pow(10.0, log10_value - exponent);
  const double scale = std::pow(10.0, digits - 1);
  mantissa = std::round(mantissa * scale) / scale;
  if (mantissa >= 10.0) {
    mantissa /= 10.0;
    exponent += 1.0;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*fe%+03.0f", digits - 1, mantissa, exponent);
  return buf;
}

void write_selection_csv(std::ostream& out, std::span<const SelectedTerm> terms) {
  out << "k,n_k,x_nk\n";
  for (const SelectedTerm& t : terms) {
    out << t.k << ',' << t.n << ',' << decimal_string(t.x) << '\n';
  }
}

void write_certificate_csv(std::ostream& out, const RateCertificate& c,
                           std::span<const SelectedTerm> terms) {
  out << "k,n_k,x_nk,bound,pass\n";
  for (std::size_t i = 0; i < c.rows.size(); ++i) {
    const CertificateRow& row = c.rows[i];
    const std::string x = i < terms.size() ? decimal_string(terms[i].x) : format_double(row.x);
    out << row.k << ',' << row.n << ',' << x << ',' << format_log10(row.log10_bound, 17)
        << ',' << to_string(row.check) << '\n';
  }
}

void write_alpha_csv(std::ostream& out, std::span<const AlphaTail> tails) {
  out << 'k';
  std::size_t rows = 0;
  for (const AlphaTail& t : tails) {
    out << ",alpha=" << format_double(t.alpha);
    rows = std::max(rows, t.partial_sums.size());
  }
  out << '\n';
  for (std::size_t k = 0; k < rows; ++k) {
    out << (k + 1);
    for (const AlphaTail& t : tails) {
      out << ',';
      if (k < t.partial_sums.size()) out << format_double(t.partial_sums[k]);
    }
    out << '\n';
  }
}

}  // namespace subsum
