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


#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "subsum/errors.hpp"
#include "subsum/sequences.hpp"

namespace subsum {
namespace {

SequenceHandle rational(const SequenceSpec& spec) { return build_sequence(spec, Backend::rational); }

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path;
}

TEST(Harmonic, Terms) {
  auto seq = rational(SequenceSpec::harmonic());
  EXPECT_EQ(seq->term(1).rational(), Rational(1));
  EXPECT_EQ(seq->term(7).rational(), Rational(1, 7));
  EXPECT_EQ(seq->spec().declared_L, 1.0);
  EXPECT_FALSE(seq->length().has_value());
  EXPECT_THROW(seq->term(0), DomainError);
}

TEST(StepGeometric, PlateauRule) {
  auto seq = rational(SequenceSpec::step_geometric(Rational(3, 5)));
  const oracle::BigRat r = oracle::frac(3, 5);
  // 1 | 3/5 3/5 | 9/25 x3 | 27/125 x5 | ...
  EXPECT_EQ(seq->term(1).rational(), Rational(1));
  EXPECT_EQ(seq->term(2).rational(), Rational(3, 5));
  EXPECT_EQ(seq->term(3).rational(), Rational(3, 5));
  EXPECT_EQ(seq->term(4).rational(), Rational(9, 25));
  EXPECT_EQ(seq->term(6).rational(), Rational(9, 25));
  EXPECT_EQ(seq->term(7).rational(), Rational(27, 125));
  for (Index n = 1; n <= 5000; n += 7) {
    ASSERT_TRUE(oracle::same(seq->term(n).rational(), oracle::step_geometric(r, n))) << n;
  }
  EXPECT_EQ(seq->spec().declared_L, 0.6);
}

TEST(StepGeometric, EachPlateauAddsAtLeastOne) {
  for (const Rational& r : {Rational(11, 20), Rational(3, 5), Rational(7, 10), Rational(4, 5)}) {
    auto seq = rational(SequenceSpec::step_geometric(r));
    Rational sum = 0;
    Rational previous = seq->term(1).rational();
    int plateaus = 0;
    for (Index n = 1; n <= 20000; ++n) {
      const Rational x = seq->term(n).rational();
      if (x != previous) {
        ++plateaus;
        ASSERT_GE(sum, plateaus) << r.get_str();
        previous = x;
      }
      sum += x;
    }
    EXPECT_GE(plateaus, 5);
  }
}

TEST(StepGeometric, RejectsBadRatio) {
  EXPECT_THROW(SequenceSpec::step_geometric(Rational(0)).validate(), DomainError);
  EXPECT_THROW(SequenceSpec::step_geometric(Rational(1)).validate(), DomainError);
  EXPECT_THROW(SequenceSpec::step_geometric(Rational(3, 2)).validate(), DomainError);
}

TEST(PrimeReciprocal, Terms) {
  auto seq = rational(SequenceSpec::primes());
  EXPECT_EQ(seq->term(4).rational(), Rational(1, 7));
  EXPECT_EQ(seq->term(6).rational(), Rational(1, 13));
  oracle::TrialPrimes primes;
  for (Index n = 1; n <= 3000; n += 13) {
    ASSERT_EQ(seq->term(n).rational(), Rational(1, primes.nth(n))) << n;
  }
}

TEST(PrimeReciprocal, CapIsResourceError) {
  auto seq = rational(SequenceSpec::primes(1000));
  EXPECT_EQ(seq->term(168).rational(), Rational(1, 997));
  try {
    seq->term(169);
    FAIL() << "expected ResourceLimitError";
  } catch (const ResourceLimitError& e) {
    EXPECT_EQ(e.largest_served(), 168u);
  }
}

TEST(LogHarmonic, FloatOnly) {
  EXPECT_THROW(rational(SequenceSpec::log_harmonic()), DomainError);
  auto seq = build_sequence(SequenceSpec::log_harmonic(), Backend::floating);
  const Approx x1 = seq->term(1).approx();
  const double expected = 1.0 / (2.0 * std::log(2.0));
  EXPECT_NEAR(x1.estimate, expected, 1e-15);
  EXPECT_LE(std::fabs(x1.estimate - expected), x1.error_bound + 1e-16);
}

TEST(AllFamilies, PositiveAndNonincreasing) {
  std::vector<SequenceHandle> handles;
  handles.push_back(rational(SequenceSpec::harmonic()));
  handles.push_back(rational(SequenceSpec::step_geometric(Rational(3, 5))));
  handles.push_back(rational(SequenceSpec::step_geometric(Rational(4, 5))));
  handles.push_back(rational(SequenceSpec::primes()));
  handles.push_back(build_sequence(SequenceSpec::harmonic(), Backend::floating));
  handles.push_back(build_sequence(SequenceSpec::log_harmonic(), Backend::floating));
  handles.push_back(build_sequence(SequenceSpec::primes(), Backend::floating));
  for (auto& seq : handles) {
    Value prev = seq->term(1);
    ASSERT_GT(prev.certain_sign(), 0);
    for (Index n = 2; n <= 10'000; ++n) {
      Value x = seq->term(n);
      ASSERT_GT(x.certain_sign(), 0) << to_string(seq->spec().family) << " " << n;
      ASSERT_NE(strictly_less(prev, x), Decision::yes) << to_string(seq->spec().family) << " " << n;
      prev = std::move(x);
    }
  }
}

TEST(FileBacked, ParsesCommentsAndForms) {
  const auto terms = parse_sequence_text("# header\n1\n\n1/2   # inline\n0.25\n1e-1\n");
  ASSERT_EQ(terms.size(), 4u);
  EXPECT_EQ(terms[1], Rational(1, 2));
  EXPECT_EQ(terms[3], Rational(1, 10));
  const auto path = write_temp("subsum_seq_ok.txt", "1\n1/2\n1/3\n");
  auto seq = rational(SequenceSpec::file(path));
  EXPECT_EQ(seq->length(), 3u);
  EXPECT_EQ(seq->term(3).rational(), Rational(1, 3));
  EXPECT_THROW(seq->term(4), SequenceExhausted);
}

TEST(FileBacked, Errors) {
  EXPECT_THROW(parse_sequence_text("1\nfoo\n"), ParseError);
  try {
    parse_sequence_text("1\n1/2\nfoo\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  try {
    rational(SequenceSpec::file(write_temp("subsum_seq_up.txt", "1\n2\n")));
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.index(), 2u);
  }
  try {
    rational(SequenceSpec::file(write_temp("subsum_seq_neg.txt", "1\n0\n")));
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.index(), 2u);
  }
  EXPECT_THROW(rational(SequenceSpec::file("/nonexistent/subsum.txt")), ParseError);
}

TEST(ValidatePrefix, Harmonic) {
  auto seq = rational(SequenceSpec::harmonic());
  const ValidationReport v = validate_prefix(*seq, 100);
  EXPECT_TRUE(v.passed);
  EXPECT_EQ(v.checked, 100u);
  ASSERT_TRUE(v.min_ratio);
  EXPECT_EQ(v.min_ratio->ratio.rational(), Rational(1, 2));
  EXPECT_EQ(v.min_ratio->at, 1u);
  EXPECT_EQ(v.unverifiable.size(), 2u);
  EXPECT_THROW(validate_prefix(*seq, 1), DomainError);
}

TEST(ValidatePrefix, IncreasingFileFailsAtIndex) {
  auto seq = make_term_list_sequence({Rational(1), Rational(2)}, Backend::rational, false);
  const ValidationReport v = validate_prefix(*seq, 2);
  EXPECT_FALSE(v.passed);
  EXPECT_EQ(v.offending_index, 2u);
}

TEST(ValidatePrefix, StepGeometric) {
  auto seq = rational(SequenceSpec::step_geometric(Rational(3, 5)));
  const ValidationReport v = validate_prefix(*seq, 1000);
  EXPECT_TRUE(v.passed);
  EXPECT_EQ(v.min_ratio->ratio.rational(), Rational(3, 5));
}

TEST(ValidatePrefix, PrimesBeyondCap) {
  auto seq = rational(SequenceSpec::primes(10'000));
  EXPECT_THROW(validate_prefix(*seq, 5000), ResourceLimitError);
}

TEST(ExactRangeSum, MatchesOracle) {
  auto h = rational(SequenceSpec::harmonic());
  oracle::BigRat expected = 0;
  for (Index n = 17; n <= 1500; ++n) expected += oracle::harmonic(n);
  EXPECT_TRUE(oracle::same(h->exact_range_sum(17, 1500), expected));
  EXPECT_EQ(h->exact_range_sum(5, 5), Rational(1, 5));

  const oracle::BigRat r = oracle::frac(11, 20);
  auto g = rational(SequenceSpec::step_geometric(Rational(11, 20)));
  for (auto [a, b] : std::vector<std::pair<Index, Index>>{{1, 1}, {2, 9}, {3, 400}, {57, 2000}}) {
    oracle::BigRat s = 0;
    for (Index n = a; n <= b; ++n) s += oracle::step_geometric(r, n);
    EXPECT_TRUE(oracle::same(g->exact_range_sum(a, b), s)) << a << ".." << b;
  }

  auto p = rational(SequenceSpec::primes());
  oracle::TrialPrimes primes;
  oracle::BigRat ps = 0;
  for (Index n = 3; n <= 60; ++n) ps += oracle::frac(1, static_cast<long long>(primes.nth(n)));
  EXPECT_TRUE(oracle::same(p->exact_range_sum(3, 60), ps));
}

// The search hooks agree with a plain scan.
TEST(FirstIndexBelow, HooksMatchLinearScan) {
  std::vector<SequenceHandle> handles;
  handles.push_back(rational(SequenceSpec::harmonic()));
  handles.push_back(rational(SequenceSpec::step_geometric(Rational(3, 5))));
  handles.push_back(rational(SequenceSpec::primes()));
  handles.push_back(build_sequence(SequenceSpec::step_geometric(Rational(7, 10)), Backend::floating));
  const std::vector<Rational> bounds{Rational(1), Rational(1, 2), Rational(1, 6), Rational(2, 7),
                                     Rational(1, 100), Rational(3, 1000), Rational(9, 25)};
  for (auto& seq : handles) {
    for (const Rational& q : bounds) {
      for (Index after : {Index{0}, Index{3}, Index{40}}) {
        const Value bound = Value(q).to_backend(seq->backend());
        Index expect = after + 1;
        while (strictly_less(seq->term(expect), bound) != Decision::yes) ++expect;
        const SearchOutcome got = seq->first_index_below(after, bound, 1'000'000);
        ASSERT_EQ(got.status, SearchOutcome::Status::found);
        EXPECT_EQ(got.index, expect) << to_string(seq->spec().family) << " " << q.get_str();
      }
    }
  }
}

TEST(FirstIndexBelow, LimitAndCap) {
  auto h = rational(SequenceSpec::harmonic());
  const SearchOutcome limited = h->first_index_below(0, Value(Rational(1, 1000)), 500);
  EXPECT_EQ(limited.status, SearchOutcome::Status::limit_reached);
  auto p = rational(SequenceSpec::primes(10'000));
  const SearchOutcome capped = p->first_index_below(0, Value(Rational(1, 20'000)), 1'000'000);
  EXPECT_EQ(capped.status, SearchOutcome::Status::cap_exceeded);
}

TEST(RatioHoldsFrom, Harmonic) {
  auto h = rational(SequenceSpec::harmonic());
  // n/(n+1) >= 0.99 from n = 99 on.
  EXPECT_EQ(h->ratio_holds_from(0.99, 1000), 99u);
  EXPECT_EQ(h->ratio_holds_from(0.5, 1000), 1u);
}

TEST(Families, Names) {
  EXPECT_EQ(parse_family("step-geometric"), Family::step_geometric);
  EXPECT_EQ(parse_family("primes"), Family::prime_reciprocal);
  EXPECT_EQ(parse_family("log-harmonic"), Family::log_harmonic);
  EXPECT_THROW(parse_family("fibonacci"), ParseError);
}

}  // namespace
}  // namespace subsum
