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

#include <array>

#include "subsum/achiever.hpp"
#include "subsum/analysis.hpp"
#include "subsum/sequences.hpp"

namespace {

using subsum::Backend;
using subsum::Rational;
using subsum::SequenceSpec;
using subsum::Value;

// Targets indexed by state.range(0).
const std::array<Rational, 4> kTargets{Rational(1, 10), Rational(1), Rational(5, 2),
                                       Rational(10)};

void BM_AchieveHarmonic(benchmark::State& state) {
  const Backend backend = state.range(1) ? Backend::floating : Backend::rational;
  const Value target = Value(kTargets[state.range(0)]).to_backend(backend);
  for (auto _ : state) {
    auto seq = subsum::build_sequence(SequenceSpec::harmonic(), backend);
    benchmark::DoNotOptimize(subsum::achieve(*seq, target));
  }
}
BENCHMARK(BM_AchieveHarmonic)->ArgsProduct({{0, 1, 2, 3}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_AchieveHarmonicLinearStart(benchmark::State& state) {
  subsum::StopPolicy stop;
  stop.max_blocks = 3;
  for (auto _ : state) {
    auto seq = subsum::build_sequence(SequenceSpec::harmonic(), Backend::rational);
    benchmark::DoNotOptimize(
        subsum::achieve(*seq, Value(Rational(1)), stop, subsum::StartSearch::linear));
  }
}
BENCHMARK(BM_AchieveHarmonicLinearStart)->Unit(benchmark::kMicrosecond);

void BM_AchieveStepGeometric(benchmark::State& state) {
  const Rational r(state.range(0), 100);
  for (auto _ : state) {
    auto seq = subsum::build_sequence(SequenceSpec::step_geometric(r), Backend::rational);
    benchmark::DoNotOptimize(subsum::achieve(*seq, Value(Rational(37, 4))));
  }
}
BENCHMARK(BM_AchieveStepGeometric)->Arg(55)->Arg(60)->Arg(70)->Arg(80)
    ->Unit(benchmark::kMillisecond);

void BM_AchievePrimes(benchmark::State& state) {
  for (auto _ : state) {
    auto seq = subsum::build_sequence(SequenceSpec::primes(), Backend::rational);
    benchmark::DoNotOptimize(subsum::achieve(*seq, Value(Rational(1, 2))));
  }
}
BENCHMARK(BM_AchievePrimes)->Unit(benchmark::kMillisecond);

void BM_Certify(benchmark::State& state) {
  auto seq = subsum::build_sequence(SequenceSpec::harmonic(), Backend::rational);
  const auto selection = subsum::achieve(*seq, Value(Rational(state.range(0))));
  const auto rate = subsum::estimate_rate_for(*seq, selection);
  for (auto _ : state) benchmark::DoNotOptimize(subsum::certify(selection, rate, *seq));
}
BENCHMARK(BM_Certify)->Arg(1)->Arg(10)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
