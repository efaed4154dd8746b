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

#ifndef SUBSUM_SERIALIZE_HPP_
#define SUBSUM_SERIALIZE_HPP_

#include <ostream>
#include <span>
#include <string>

#include <nlohmann/json.hpp>
#include "subsum/achiever.hpp"
#include "subsum/analysis.hpp"
#include "subsum/numerics.hpp"
#include "subsum/sequences.hpp"

namespace subsum {

using Json = nlohmann::json;

// {"num": "...", "den": "..."} or {"est": x, "err": e}.
Json to_json(const Value& v);
Value value_from_json(const Json& j);

Json to_json(const Block& b);
// {target, blocks, indices, termination, residual_bits, ...}
Json to_json(const SelectionResult& s);
Json to_json(const RateEstimate& r);
// Summary fields; the per-k table goes to CSV.
Json to_json(const RateCertificate& c);
Json to_json(const AlphaTail& t);
Json to_json(const ValidationReport& v);
Json to_json(const SequenceSpec& s);

// Decimal rendering of a term: exact digits for rationals, %.17g otherwise.
std::string decimal_string(const Value& v, int digits = 17);

// Scientific rendering of 10^log10_value without going through a double
// that might overflow.
std::string format_log10(double log10_value, int digits = 6);

// k,n_k,x_nk
void write_selection_csv(std::ostream& out, std::span<const SelectedTerm> terms);
// k,n_k,x_nk,bound,pass (pass is pass/fail/pre_tail)
void write_certificate_csv(std::ostream& out, const RateCertificate& c,
                           std::span<const SelectedTerm> terms);
// k, then one partial-sum column per alpha
void write_alpha_csv(std::ostream& out, std::span<const AlphaTail> tails);

}  // namespace subsum

#endif  // SUBSUM_SERIALIZE_HPP_
