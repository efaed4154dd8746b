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

#ifndef SUBSUM_SIEVE_HPP_
#define SUBSUM_SIEVE_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "subsum/errors.hpp"

namespace subsum {

// 2^31 unless the SUBSUM_SIEVE_CAP environment variable holds a positive
// integer.
std::uint64_t default_sieve_cap();

// Lazily extended segmented sieve of Eratosthenes over [2, cap].
//
// Primes are emitted in increasing order and kept, so the k-th prime and the
// index of an emitted prime are O(1) / O(log k) lookups. Requests whose answer
// would exceed `cap` throw ResourceLimitError instead of sieving further.
// Not thread-safe.
class PrimeSieve {
 public:
  explicit PrimeSieve(std::uint64_t cap = default_sieve_cap(),
                      std::size_t segment_size = std::size_t{1} << 18);

  std::uint64_t cap() const noexcept { return cap_; }

  // Smallest prime > x.
  std::uint64_t next_prime_above(std::uint64_t x);

  // The n-th prime, 1-based (nth_prime(4) == 7).
  std::uint64_t nth_prime(Index n);

  // 1-based position of `p` among the primes; p must be prime and <= cap.
  Index index_of(std::uint64_t p);

  Index count() const noexcept { return primes_.size(); }
  std::span<const std::uint64_t> primes() const noexcept { return primes_; }

  // Every integer below this bound has been classified.
  std::uint64_t sieved_below() const noexcept { return sieved_below_; }

 private:
  // Sieves the next window; false once the cap has been covered.
  bool extend();
  void ensure_base_primes(std::uint64_t limit);

  std::uint64_t cap_;
  std::size_t segment_size_;
  std::uint64_t sieved_below_ = 2;
  std::vector<std::uint8_t> segment_;
  std::vector<std::uint64_t> base_primes_;
  std::uint64_t base_limit_ = 1;
  std::vector<std::uint64_t> primes_;
};

}  // namespace subsum

#endif  // SUBSUM_SIEVE_HPP_
