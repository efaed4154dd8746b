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

#include "subsum/sieve.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <string>
#include <string_view>

namespace subsum {

namespace {

std::uint64_t isqrt(std::uint64_t n) {
  std::uint64_t r = 0;
  for (std::uint64_t bit = std::uint64_t{1} << 31; bit != 0; bit >>= 1) {
    const std::uint64_t t = r | bit;
    if (t <= n / t) r = t;
  }
  return r;
}

}  // namespace

std::uint64_t default_sieve_cap() {
  constexpr std::uint64_t kDefault = std::uint64_t{1} << 31;
  const char* env = std::getenv("SUBSUM_SIEVE_CAP");
  if (env == nullptr) return kDefault;
  const std::string_view text(env);
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || value < 2) {
    return kDefault;
  }
  return value;
}

PrimeSieve::PrimeSieve(std::uint64_t cap, std::size_t segment_size)
    : cap_(std::max<std::uint64_t>(cap, 2)),
      segment_size_(std::max<std::size_t>(segment_size, 64)) {}

void PrimeSieve::ensure_base_primes(std::uint64_t limit) {
  if (limit <= base_limit_) return;
  limit = std::max(limit, base_limit_ * 2);
  std::vector<std::uint8_t> composite(limit + 1, 0);
  base_primes_.clear();
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    base_primes_.push_back(i);
    for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = 1;
  }
  base_limit_ = limit;
}

bool PrimeSieve::extend() {
  if (sieved_below_ > cap_) return false;
  const std::uint64_t low = sieved_below_;
  const std::uint64_t high = std::min<std::uint64_t>(low + segment_size_, cap_ + 1);
  ensure_base_primes(isqrt(high - 1));

  segment_.assign(high - low, 1);
  for (const std::uint64_t p : base_primes_) {
    if (p * p >= high) break;
    std::uint64_t start = std::max(p * p, (low + p - 1) / p * p);
    for (std::uint64_t m = start; m < high; m += p) segment_[m - low] = 0;
  }
  for (std::uint64_t n = low; n < high; ++n) {
    if (segment_[n - low]) primes_.push_back(n);
  }
  sieved_below_ = high;
  return true;
}

std::uint64_t PrimeSieve::next_prime_above(std::uint64_t x) {
  if (x >= cap_) {
    throw ResourceLimitError(count(), "next prime above " + std::to_string(x) +
                                          " exceeds the sieve cap " + std::to_string(cap_));
  }
  for (;;) {
    auto it = std::upper_bound(primes_.begin(), primes_.end(), x);
    if (it != primes_.end()) return *it;
    if (!extend()) {
      throw ResourceLimitError(count(), "next prime above " + std::to_string(x) +
                                            " exceeds the sieve cap " +
                                            std::to_string(cap_));
    }
  }
}

std::uint64_t PrimeSieve::nth_prime(Index n) {
  if (n == 0) throw DomainError("prime indices start at 1");
  while (primes_.size() < n) {
    if (!extend()) {
      throw ResourceLimitError(count(), "prime #" + std::to_string(n) +
                                            " lies beyond the sieve cap " +
                                            std::to_string(cap_));
    }
  }
  return primes_[n - 1];
}

Index PrimeSieve::index_of(std::uint64_t p) {
  if (p > cap_) {
    throw ResourceLimitError(count(), std::to_string(p) + " exceeds the sieve cap");
  }
  while (sieved_below_ <= p) extend();
  const auto it = std::lower_bound(primes_.begin(), primes_.end(), p);
  if (it == primes_.end() || *it != p) {
    throw DomainError(std::to_string(p) + " is not prime");
  }
  return static_cast<Index>(it - primes_.begin()) + 1;
}

}  // namespace subsum
