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

#include "subsum/achiever.hpp"

#include <cmath>
#include <utility>

namespace subsum {

namespace {

using Status = SearchOutcome::Status;

constexpr Index kIndexMax = std::numeric_limits<Index>::max();

BlockEnd stopped(Status status, Index at) {
  BlockEnd end;
  end.status = status;
  end.stopped_at = at;
  return end;
}

BlockEnd closed(Index b, Value sum) {
  BlockEnd end;
  end.b = b;
  end.sum = std::move(sum);
  return end;
}

SearchOutcome linear_start(Sequence& seq, Index after, const Value& residual, Index limit) {
  for (Index i = after + 1; i <= limit && i != 0; ++i) {
    Value x;
    try {
      x = seq.term(i);
    } catch (const ResourceLimitError& e) {
      return {Status::cap_exceeded, e.largest_served()};
    } catch (const SequenceExhausted& e) {
      return {Status::exhausted, e.length()};
    }
    switch (strictly_less(x, residual)) {
      case Decision::yes:
        return {Status::found, i};
      case Decision::undecidable:
        return {Status::undecidable, i};
      case Decision::no:
        break;
    }
  }
  return {Status::limit_reached, limit == kIndexMax ? limit : limit + 1};
}

BlockEnd float_block_end(Sequence& seq, Index a, const Value& residual, Index limit) {
  Accumulator acc(Backend::floating);
  acc.add(seq.term(a));
  Index b = a;
  for (;;) {
    if (b >= limit) return stopped(Status::limit_reached, b + 1);
    const Index n = b + 1;
    Value t;
    try {
      t = seq.term(n);
    } catch (const ResourceLimitError& e) {
      return stopped(Status::cap_exceeded, e.largest_served());
    } catch (const SequenceExhausted& e) {
      return stopped(Status::exhausted, e.length());
    }
    Accumulator trial = acc;
    trial.add(t);
    switch (strictly_less(trial.value(), residual)) {
      case Decision::yes:
        acc = std::move(trial);
        b = n;
        break;
      case Decision::no:
        return closed(b, acc.value());
      case Decision::undecidable:
        return stopped(Status::undecidable, n);
    }
  }
}

BlockEnd exact_block_end(Sequence& seq, Index a, const Value& residual, Index limit) {
  const Rational& target = residual.rational();
  const Value bound(approx_from_rational(target));

  // Filter: error-bounded floating partial sums decide most positions.
  Accumulator filter(Backend::floating);
  filter.add(Value(seq.approx_term(a)));
  Index known_below = a;  // S(a..known_below) < residual, certified
  std::optional<Index> known_above;  // S(a..known_above) >= residual, certified
  Index scanned = a;
  Status end_status = Status::limit_reached;
  Index end_at = 0;
  while (!known_above) {
    if (scanned >= limit) {
      end_at = scanned == kIndexMax ? scanned : scanned + 1;
      break;
    }
    const Index n = scanned + 1;
    try {
      filter.add(Value(seq.approx_term(n)));
    } catch (const ResourceLimitError& e) {
      end_status = Status::cap_exceeded;
      end_at = e.largest_served();
      break;
    } catch (const SequenceExhausted& e) {
      end_status = Status::exhausted;
      end_at = e.length();
      break;
    }
    scanned = n;
    switch (strictly_less(filter.value(), bound)) {
      case Decision::yes:
        known_below = n;
        break;
      case Decision::no:
        known_above = n;
        break;
      case Decision::undecidable:
        break;
    }
  }
  if (!known_above && known_below == scanned) {
    // Every served partial sum stays below the residual: the block cannot
    // be closed inside the allowed range.
    return stopped(end_status, end_at);
  }

  // Resolve the undecided stretch (known_below, known_above) exactly.
  Rational sum = seq.exact_range_sum(a, known_below);
  Index b = known_below;
  const Index stop = known_above ? *known_above : scanned + 1;
  for (Index n = known_below + 1; n < stop; ++n) {
    Rational next = sum + seq.exact_term(n);
    if (!(next < target)) return closed(b, Value(std::move(sum)));
    sum = std::move(next);
    b = n;
  }
  if (known_above) return closed(b, Value(std::move(sum)));
  return stopped(end_status, end_at);
}

Termination termination_for(Status s) {
  switch (s) {
    case Status::limit_reached:
      return Termination::max_index;
    case Status::cap_exceeded:
      return Termination::sieve_cap;
    case Status::undecidable:
      return Termination::comparison_undecidable;
    default:
      break;
  }
  return Termination::max_index;
}

}  // namespace

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::tolerance_met:
      return "tolerance_met";
    case Termination::max_blocks:
      return "max_blocks";
    case Termination::max_index:
      return "max_index";
    case Termination::sieve_cap:
      return "sieve_cap";
    case Termination::comparison_undecidable:
      break;
  }
  return "comparison_undecidable";
}

void StopPolicy::validate() const {
  if (!max_blocks && !max_index && sgn(absolute_tolerance) <= 0 &&
      !(relative_tolerance > 0.0)) {
    throw DomainError("stop policy needs at least one finite bound");
  }
  if (sgn(absolute_tolerance) < 0 || !(relative_tolerance >= 0.0) ||
      !std::isfinite(relative_tolerance)) {
    throw DomainError("tolerances must be finite and non-negative");
  }
}

Value tolerance_value(const StopPolicy& stop, const Value& target) {
  if (target.is_exact()) {
    Rational rel = rational_from_double(stop.relative_tolerance) * target.rational();
    return Value(rel > stop.absolute_tolerance ? rel : stop.absolute_tolerance);
  }
  const Value rel = Value(approx_exact(stop.relative_tolerance)) * target;
  const Value abs = Value(stop.absolute_tolerance).to_backend(Backend::floating);
  return rel.to_double() > abs.to_double() ? rel : abs;
}

SearchOutcome find_block_start(Sequence& seq, Index after, const Value& residual,
                               Index limit, StartSearch mode) {
  if (residual.certain_sign() <= 0) {
    throw DomainError("find_block_start needs a positive residual");
  }
  if (mode == StartSearch::linear) return linear_start(seq, after, residual, limit);
  return seq.first_index_below(after, residual, limit);
}

BlockEnd find_block_end(Sequence& seq, Index a, const Value& residual, Index limit) {
  const Decision head = strictly_less(seq.term(a), residual);
  if (head == Decision::undecidable) return stopped(Status::undecidable, a);
  if (head == Decision::no) {
    throw DomainError("find_block_end needs x_a < residual");
  }
  if (residual.is_exact()) return exact_block_end(seq, a, residual, limit);
  return float_block_end(seq, a, residual, limit);
}

SelectionResult achieve(Sequence& seq, const Value& target, const StopPolicy& stop,
                        StartSearch mode) {
  if (target.backend() != seq.backend()) {
    throw DomainError("target and sequence use different backends");
  }
  if (target.certain_sign() <= 0) throw DomainError("target must be positive");
  stop.validate();

  SelectionResult result;
  result.target = target;
  result.final_residual = target;
  const Value tolerance = tolerance_value(stop, target);
  const Index limit = stop.max_index.value_or(kIndexMax);
  Value residual = target;
  Index after = 0;

  auto finish = [&](Termination why, std::optional<Index> at, std::string diagnostic) {
    result.termination = why;
    result.stopped_at = at;
    result.diagnostic = std::move(diagnostic);
    result.final_residual = residual;
    return result;
  };
  auto exhausted = [&](Index length) {
    result.final_residual = residual;
    result.termination = Termination::max_index;
    result.stopped_at = length;
    result.diagnostic = "sequence exhausted after " + std::to_string(length) +
                        " terms with the residual above tolerance";
    return AchievementFailure(result, result.diagnostic);
  };

  for (;;) {
    if (stop.max_blocks && result.blocks.size() >= *stop.max_blocks) {
      return finish(Termination::max_blocks, std::nullopt, "block budget reached");
    }
    const SearchOutcome start = find_block_start(seq, after, residual, limit, mode);
    if (start.status == Status::exhausted) throw exhausted(start.index);
    if (start.status != Status::found) {
      return finish(termination_for(start.status), start.index,
                    "block start search stopped at index " + std::to_string(start.index));
    }
    BlockEnd end = find_block_end(seq, start.index, residual, limit);
    if (end.status == Status::exhausted) throw exhausted(end.stopped_at);
    if (end.status != Status::found) {
      return finish(termination_for(end.status), end.stopped_at,
                    "block starting at " + std::to_string(start.index) +
                        " could not be closed (stopped at index " +
                        std::to_string(end.stopped_at) + ")");
    }

    residual = residual - end.sum;
    for (Index i = start.index; i <= end.b; ++i) result.indices.push_back(i);
    result.blocks.push_back(Block{start.index, end.b, std::move(end.sum), residual});
    result.final_residual = residual;
    after = result.blocks.back().b;

    switch (strictly_less(tolerance, residual)) {
      case Decision::no:
        return finish(Termination::tolerance_met, std::nullopt, "residual within tolerance");
      case Decision::undecidable:
        return finish(Termination::comparison_undecidable, after,
                      "tolerance test undecidable after index " + std::to_string(after));
      case Decision::yes:
        break;
    }
  }
}

std::vector<SelectedTerm> flatten(const SelectionResult& selection, Sequence& seq) {
  std::vector<SelectedTerm> out;
  out.reserve(selection.indices.size());
  Index k = 0;
  for (const Index n : selection.indices) out.push_back({++k, n, seq.term(n)});
  return out;
}

}  // namespace subsum
