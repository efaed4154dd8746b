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

#ifndef SUBSUM_ACHIEVER_HPP_
#define SUBSUM_ACHIEVER_HPP_

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "subsum/errors.hpp"
#include "subsum/numerics.hpp"
#include "subsum/sequences.hpp"

namespace subsum {

// One greedy block: the consecutive indices a..b, their sum, and the target
// minus all block sums up to and including this one.
struct Block {
  Index a = 0;
  Index b = 0;
  Value sum;
  Value residual_after;

  Index length() const noexcept { return b - a + 1; }
};

enum class Termination {
  tolerance_met,
  max_blocks,
  max_index,
  sieve_cap,
  comparison_undecidable,
};

std::string_view to_string(Termination t);

// Truncation of the (infinite) greedy process.
struct StopPolicy {
  std::optional<std::uint64_t> max_blocks = 64;
  std::optional<Index> max_index = 10'000'000;
  // Stop once residual <= max(absolute_tolerance, relative_tolerance * target).
  Rational absolute_tolerance{0};
  double relative_tolerance = 1e-12;

  // Throws DomainError unless some bound is finite and tolerances are >= 0.
  void validate() const;
};

// How find_block_start locates the first term below the residual. Both give
// the same index on nonincreasing sequences; galloping uses the sequence's
// search hook (closed forms for harmonic terms and primes).
enum class StartSearch { galloping, linear };

struct SelectionResult {
  Value target;
  std::vector<Block> blocks;
  // Increasing enumeration of the union of [a_n, b_n].
  std::vector<Index> indices;
  Termination termination = Termination::max_blocks;
  Value final_residual;
  // Index at which a truncation or undecidable comparison stopped the run.
  std::optional<Index> stopped_at;
  std::string diagnostic;
};

// The sequence ran out (finite file) before the residual fell below the
// tolerance. Carries everything selected so far.
class AchievementFailure : public Error {
 public:
  AchievementFailure(SelectionResult partial, const std::string& what)
      : Error(what), partial_(std::move(partial)) {}
  const SelectionResult& partial() const noexcept { return partial_; }

 private:
  SelectionResult partial_;
};

// Smallest a in (after, limit] with x_a < residual (strict).
SearchOutcome find_block_start(Sequence& seq, Index after, const Value& residual,
                               Index limit = std::numeric_limits<Index>::max(),
                               StartSearch mode = StartSearch::galloping);

struct BlockEnd {
  SearchOutcome::Status status = SearchOutcome::Status::found;
  Index b = 0;
  Value sum;
  // For non-found outcomes: the index that stopped the scan.
  Index stopped_at = 0;
};

// Greatest b in [a, limit] with x_a + ... + x_b < residual (strict).
// Requires x_a < residual. In rational mode the scan is filtered through
// error-bounded floating sums and only the undecided boundary is resolved
// with exact arithmetic, so decisions are exact either way.
BlockEnd find_block_end(Sequence& seq, Index a, const Value& residual,
                        Index limit = std::numeric_limits<Index>::max());

// Greedy block construction for target > 0: repeatedly take the first term
// below the residual and extend the block while the sum stays strictly below
// it. Throws DomainError for target <= 0, AchievementFailure when a finite
// sequence runs out.
SelectionResult achieve(Sequence& seq, const Value& target, const StopPolicy& stop = {},
                        StartSearch mode = StartSearch::galloping);

// The stopping threshold max(absolute, relative * target) in target's backend.
Value tolerance_value(const StopPolicy& stop, const Value& target);

struct SelectedTerm {
  Index k = 0;  // 1-based position in the subseries
  Index n = 0;  // index in the original sequence
  Value x;
};

std::vector<SelectedTerm> flatten(const SelectionResult& selection, Sequence& seq);

}  // namespace subsum

#endif  // SUBSUM_ACHIEVER_HPP_
