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

#ifndef SUBSUM_SEQUENCES_HPP_
#define SUBSUM_SEQUENCES_HPP_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "subsum/errors.hpp"
#include "subsum/numerics.hpp"

namespace subsum {

enum class Family { harmonic, log_harmonic, step_geometric, prime_reciprocal, file_backed };

std::string_view to_string(Family family);
// Accepts the CLI spellings (harmonic, log-harmonic, step-geometric, primes,
// file) as well as the underscore names.
Family parse_family(std::string_view text);

// Description of a positive nonincreasing sequence x_1, x_2, ...
struct SequenceSpec {
  Family family = Family::harmonic;
  // step_geometric: ratio r in (0, 1).
  Rational ratio{1, 2};
  // file_backed: path to the term list.
  std::filesystem::path path;
  // Known liminf of x_{n+1}/x_n, when the family has one.
  std::optional<double> declared_L;
  // prime_reciprocal: largest magnitude the sieve may cover.
  std::uint64_t sieve_cap = 0;  // 0 selects default_sieve_cap()

  static SequenceSpec harmonic();
  static SequenceSpec log_harmonic();
  static SequenceSpec step_geometric(Rational r);
  static SequenceSpec primes(std::uint64_t cap = 0);
  static SequenceSpec file(std::filesystem::path path,
                           std::optional<double> declared_L = std::nullopt);

  // Throws DomainError / ParseError on invalid parameters.
  void validate() const;
};

// Result of scanning for the first index whose term undercuts a bound.
struct SearchOutcome {
  enum class Status { found, limit_reached, undecidable, exhausted, cap_exceeded };
  Status status = Status::found;
  // found: the index; limit_reached/undecidable: the index that stopped the
  // scan; exhausted/cap_exceeded: the last index that could be served.
  Index index = 0;
};

// Smallest ratio x_{n+1}/x_n over a window and where it occurs.
struct RatioExtreme {
  Value ratio;
  Index at = 0;
};

// A SequenceHandle: lazily evaluated terms of one SequenceSpec in one backend.
//
// Terms are deterministic. Expensive state (sieved primes, plateau
// boundaries, file contents) is memoized inside the handle; closed-form terms
// are recomputed. Handles are not synchronized: use one handle per thread.
class Sequence {
 public:
  virtual ~Sequence() = default;

  const SequenceSpec& spec() const noexcept { return spec_; }
  Backend backend() const noexcept { return backend_; }

  // x_n in the handle's backend. n >= 1.
  Value term(Index n);

  // x_n as an exact rational. Throws DomainError for float-only families.
  virtual Rational exact_term(Index n) = 0;
  // x_n as an enclosure; the default converts exact_term.
  virtual Approx approx_term(Index n);

  // Number of terms for finite sequences.
  virtual std::optional<Index> length() const { return std::nullopt; }

  // Smallest a in (after, limit] with x_a < bound. The default gallops
  // (exponential then binary search), which is valid because the predicate
  // is monotone in a for nonincreasing terms.
  virtual SearchOutcome first_index_below(Index after, const Value& bound, Index limit);

  // Exact sum of x_a..x_b (a <= b).
  virtual Rational exact_range_sum(Index a, Index b);

  // One past the last n < n_max with x_{n+1} < L * x_n, or 1 if there is none:
  // the ratio bound x_{n+1} >= L x_n holds for every n in [result, n_max).
  virtual Index ratio_holds_from(double L, Index n_max);

  // min over n in [n0, n1) of x_{n+1}/x_n (n1 > n0 >= 1).
  virtual RatioExtreme min_ratio(Index n0, Index n1);

 protected:
  Sequence(SequenceSpec spec, Backend backend);

 private:
  SequenceSpec spec_;
  Backend backend_;
};

using SequenceHandle = std::unique_ptr<Sequence>;

// Builds and validates a handle. Float-only families (log_harmonic) reject
// the rational backend with DomainError; bad files throw ParseError or
// ValidationError carrying the first offending index.
SequenceHandle build_sequence(const SequenceSpec& spec, Backend backend);

// One decimal or "p/q" per line; blank lines and '#' comments are ignored.
std::vector<Rational> parse_sequence_file(const std::filesystem::path& path);
std::vector<Rational> parse_sequence_text(std::string_view text);

// File-backed handle over in-memory terms. With validate = false the terms
// are taken as given (used to exercise validate_prefix on bad input).
SequenceHandle make_term_list_sequence(std::vector<Rational> terms, Backend backend,
                                       bool validate = true,
                                       std::optional<double> declared_L = std::nullopt);

struct ValidationReport {
  bool passed = true;
  Index checked = 0;
  std::optional<Index> offending_index;
  std::string problem;
  std::optional<RatioExtreme> min_ratio;
  // Hypotheses that no finite prefix can confirm.
  std::vector<std::string> unverifiable;
};

// Positivity, monotone nonincrease and min ratio over x_1..x_N (N >= 2).
// Resource limits propagate as ResourceLimitError.
ValidationReport validate_prefix(Sequence& seq, Index N);

}  // namespace subsum

#endif  // SUBSUM_SEQUENCES_HPP_
