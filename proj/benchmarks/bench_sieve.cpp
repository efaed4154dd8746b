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


#include <benchmark/benchmark.h>

#include <cstdint>

#include "subsum/sieve.hpp"

namespace {

void BM_SieveNextPrimeAbove(benchmark::State& state) {
  const auto x = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) {
    subsum::PrimeSieve sieve(std::uint64_t{1} << 31);
    benchmark::DoNotOptimize(sieve.next_prime_above(x));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SieveNextPrimeAbove)->RangeMultiplier(10)->Range(10'000, 100'000'000)
    ->Unit(benchmark::kMillisecond);

void BM_SieveIndexOf(benchmark::State& state) {
  subsum::PrimeSieve sieve;
  const std::uint64_t p = sieve.next_prime_above(static_cast<std::uint64_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(sieve.index_of(p));
}
BENCHMARK(BM_SieveIndexOf)->Arg(654'148)->Arg(10'000'000);

void BM_SieveSegmentSize(benchmark::State& state) {
  for (auto _ : state) {
    subsum::PrimeSieve sieve(std::uint64_t{1} << 31, static_cast<std::size_t>(state.range(0)));
    benchmark::DoNotOptimize(sieve.next_prime_above(20'000'000));
  }
}
BENCHMARK(BM_SieveSegmentSize)->RangeMultiplier(4)->Range(1 << 14, 1 << 22)
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
