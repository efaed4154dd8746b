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

#ifndef SUBSUM_ERRORS_HPP_
#define SUBSUM_ERRORS_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace subsum {

using Index = std::uint64_t;

// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation
// (non-positive target, zero denominator, mixed backends, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Malformed textual input (rational literals, sequence files, CLI values).
class ParseError : public Error {
 public:
  using Error::Error;
};

// A sequence violates a hypothesis (positivity, monotonicity) at `index`.
class ValidationError : public Error {
 public:
  ValidationError(Index index, const std::string& what)
      : Error(what + " (index " + std::to_string(index) + ")"), index_(index) {}
  Index index() const noexcept { return index_; }

 private:
  Index index_;
};

// A configured resource cap (sieve magnitude) was hit. `largest_served` is the
// largest sequence index that could still be produced.
class ResourceLimitError : public Error {
 public:
  ResourceLimitError(Index largest_served, const std::string& what)
      : Error(what), largest_served_(largest_served) {}
  Index largest_served() const noexcept { return largest_served_; }

 private:
  Index largest_served_;
};

// A finite (file-backed) sequence was asked for a term past its end.
class SequenceExhausted : public Error {
 public:
  explicit SequenceExhausted(Index length)
      : Error("sequence has only " + std::to_string(length) + " terms"),
        length_(length) {}
  Index length() const noexcept { return length_; }

 private:
  Index length_;
};

}  // namespace subsum

#endif  // SUBSUM_ERRORS_HPP_
