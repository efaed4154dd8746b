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

#include "subsum/sequences.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "subsum/sieve.hpp"

namespace subsum {

namespace {

constexpr Index kIndexMax = std::numeric_limits<Index>::max();

__extension__ using Wide = unsigned __int128;

Integer to_integer(Index n) {
  Integer z;
  mpz_import(z.get_mpz_t(), 1, -1, sizeof(n), 0, 0, &n);
  return z;
}

// Saturating conversion; values that do not fit become kIndexMax.
Index to_index(const Integer& z) {
  if (sgn(z) < 0) return 0;
  if (mpz_sizeinbase(z.get_mpz_t(), 2) > 64) return kIndexMax;
  Index out = 0;
  mpz_export(&out, nullptr, -1, sizeof(out), 0, 0, z.get_mpz_t());
  return out;
}

Index saturating_add(Index a, Index b) { return a > kIndexMax - b ? kIndexMax : a + b; }

SearchOutcome search(SearchOutcome::Status status, Index index) { return {status, index}; }

// Exact comparison p_n >= L * p_{n+1}, i.e. 1/p_{n+1} >= L / p_n.
class RatioTest {
 public:
  explicit RatioTest(double L) : L_(rational_from_double(L)) {}
  bool holds(std::uint64_t p_n, std::uint64_t p_next) const {
    return to_integer(p_n) * L_.get_den() >= L_.get_num() * to_integer(p_next);
  }

 private:
  Rational L_;
};

// Sum of 1/j for j in [a, b] as an unreduced fraction p/q.
void harmonic_split(Index a, Index b, Integer& p, Integer& q) {
  if (b - a < 24) {
    p = 0;
    q = 1;
    for (Index j = a; j <= b; ++j) {
      const Integer zj = to_integer(j);
      p = p * zj + q;
      q *= zj;
    }
    return;
  }
  const Index mid = a + (b - a) / 2;
  Integer p1, q1, p2, q2;
  harmonic_split(a, mid, p1, q1);
  harmonic_split(mid + 1, b, p2, q2);
  p = p1 * q2 + p2 * q1;
  q = q1 * q2;
}

class Harmonic final : public Sequence {
 public:
  Harmonic(SequenceSpec spec, Backend backend) : Sequence(std::move(spec), backend) {}

  Rational exact_term(Index n) override { return Rational(Integer(1), to_integer(n)); }

  Approx approx_term(Index n) override { return approx_reciprocal(n); }

  SearchOutcome first_index_below(Index after, const Value& bound,
                                  Index limit) override {
    if (!bound.is_exact()) return Sequence::first_index_below(after, bound, limit);
    const Rational& r = bound.rational();
    if (sgn(r) <= 0) return search(SearchOutcome::Status::limit_reached, limit);
    // 1/a < p/q  <=>  a > q/p.
    Integer threshold = r.get_den() / r.get_num();
    const Index a = std::max(saturating_add(to_index(threshold), 1), after + 1);
    if (a > limit) return search(SearchOutcome::Status::limit_reached, a);
    return search(SearchOutcome::Status::found, a);
  }

  Rational exact_range_sum(Index a, Index b) override {
    Integer p, q;
    harmonic_split(a, b, p, q);
    Rational s(p, q);
    s.canonicalize();
    return s;
  }

  Index ratio_holds_from(double L, Index n_max) override {
    // n/(n+1) >= L  <=>  n >= L/(1-L).
    if (L <= 0.5) return 1;
    if (L >= 1.0) return n_max;
    const Rational l = rational_from_double(L);
    const Rational bound = l / (Rational(1) - l);
    Integer first = bound.get_num() / bound.get_den();
    if (Rational(first) < bound) first += 1;
    return std::clamp<Index>(to_index(first), 1, n_max);
  }

  RatioExtreme min_ratio(Index n0, Index n1) override {
    (void)n1;
    Value ratio(Rational(to_integer(n0), to_integer(n0 + 1)));
    return {ratio.to_backend(backend()), n0};
  }
};

class LogHarmonic final : public Sequence {
 public:
  LogHarmonic(SequenceSpec spec, Backend backend) : Sequence(std::move(spec), backend) {}

  Rational exact_term(Index) override {
    throw DomainError("log_harmonic terms are irrational; use the float backend");
  }

  // 1 / ((n+1) ln(n+1)). The libm log is within one ulp; together with the
  // product and quotient roundings the relative error stays below 4u, so
  // 8 ulp of the result is a safe bound.
  Approx approx_term(Index n) override {
    const double m = static_cast<double>(n + 1);
    const double est = 1.0 / (m * std::log(m));
    return {est, 8.0 * ulp(est)};
  }

  Index ratio_holds_from(double L, Index n_max) override {
    // The ratio increases towards 1, so violations form a prefix.
    auto holds = [&](Index n) { return ratio_estimate(n) >= L; };
    if (n_max <= 1 || holds(1)) return 1;
    if (!holds(n_max - 1)) return n_max;
    Index lo = 1, hi = n_max - 1;  // !holds(lo), holds(hi)
    while (hi - lo > 1) {
      const Index mid = lo + (hi - lo) / 2;
      (holds(mid) ? hi : lo) = mid;
    }
    return hi;
  }

  RatioExtreme min_ratio(Index n0, Index) override {
    return {Value(approx_term(n0 + 1)) / Value(approx_term(n0)), n0};
  }

 private:
  static double ratio_estimate(Index n) {
    const double a = static_cast<double>(n + 1);
    const double b = static_cast<double>(n + 2);
    return (a * std::log(a)) / (b * std::log(b));
  }
};

// Value r^s held on ceil(r^-s) consecutive indices, s = 0, 1, 2, ...
class StepGeometric final : public Sequence {
 public:
  StepGeometric(SequenceSpec spec, Backend backend)
      : Sequence(std::move(spec), backend),
        p_(this->spec().ratio.get_num()),
        q_(this->spec().ratio.get_den()) {
    ends_.push_back(1);
    values_.emplace_back(1);
    approx_.push_back(approx_exact(1.0));
    p_pow_ = 1;
    q_pow_ = 1;
  }

  Rational exact_term(Index n) override { return values_[plateau_of(n)]; }
  Approx approx_term(Index n) override { return approx_[plateau_of(n)]; }

  Rational exact_range_sum(Index a, Index b) override {
    Rational sum(0);
    const std::size_t first = plateau_of(a);
    const std::size_t last = plateau_of(b);
    for (std::size_t s = first; s <= last; ++s) {
      const Index start = s == 0 ? 1 : ends_[s - 1] + 1;
      const Index lo = std::max(a, start);
      const Index hi = std::min(b, ends_[s]);
      sum += Rational(to_integer(hi - lo + 1)) * values_[s];
    }
    return sum;
  }

  Index ratio_holds_from(double L, Index n_max) override {
    if (L > 1.0) return n_max;
    if (spec().ratio >= rational_from_double(L)) return 1;
    // Drops sit at n = ends_[s]; the last one below n_max is the last violation.
    if (n_max > 1) plateau_of(n_max - 1);
    Index result = 1;
    for (const Index end : ends_) {
      if (end < n_max) result = end + 1;
    }
    return std::min(result, n_max);
  }

  RatioExtreme min_ratio(Index n0, Index n1) override {
    plateau_of(n1);
    for (const Index end : ends_) {
      if (end >= n0 && end < n1) {
        return {Value(spec().ratio).to_backend(backend()), end};
      }
    }
    return {Value(Rational(1)).to_backend(backend()), n0};
  }

 private:
  std::size_t plateau_of(Index n) {
    while (ends_.back() < n) grow();
    return static_cast<std::size_t>(
        std::lower_bound(ends_.begin(), ends_.end(), n) - ends_.begin());
  }

  void grow() {
    p_pow_ *= p_;
    q_pow_ *= q_;
    Integer length;
    mpz_cdiv_q(length.get_mpz_t(), q_pow_.get_mpz_t(), p_pow_.get_mpz_t());
    ends_.push_back(saturating_add(ends_.back(), to_index(length)));
    values_.emplace_back(p_pow_, q_pow_);
    approx_.push_back(approx_from_rational(values_.back()));
  }

  Integer p_, q_;
  Integer p_pow_, q_pow_;
  std::vector<Index> ends_;  // last index of each plateau
  std::vector<Rational> values_;
  std::vector<Approx> approx_;
};

// A value no smaller than any of the first n primes, from
// p_n < n (ln n + ln ln n) for n >= 6 (Rosser and Schoenfeld), padded for
// rounding.
double prime_upper_bound(Index n) {
  if (n < 6) return 13.0;
  const double x = static_cast<double>(n);
  return x * (std::log(x) + std::log(std::log(x))) * (1.0 + 1e-12) + 1.0;
}

class PrimeReciprocal final : public Sequence {
 public:
  PrimeReciprocal(SequenceSpec spec, Backend backend)
      : Sequence(std::move(spec), backend),
        sieve_(this->spec().sieve_cap == 0 ? default_sieve_cap() : this->spec().sieve_cap) {}

  Rational exact_term(Index n) override {
    return Rational(Integer(1), to_integer(sieve_.nth_prime(n)));
  }

  Approx approx_term(Index n) override { return approx_reciprocal(sieve_.nth_prime(n)); }

  SearchOutcome first_index_below(Index after, const Value& bound,
                                  Index limit) override {
    if (!bound.is_exact()) {
      // A certainly-too-large prime needs no sieving to rule out.
      const double hi = bound.approx().upper();
      if (hi > 0.0) {
        const double threshold = round_down(1.0 / hi);
        if (threshold >= static_cast<double>(sieve_.cap())) {
          return search(SearchOutcome::Status::cap_exceeded, sieve_.count());
        }
        if (threshold >= prime_upper_bound(limit)) {
          return search(SearchOutcome::Status::limit_reached, saturating_add(limit, 1));
        }
      }
      return Sequence::first_index_below(after, bound, limit);
    }
    const Rational& r = bound.rational();
    if (sgn(r) <= 0) return search(SearchOutcome::Status::limit_reached, limit);
    // 1/p < r  <=>  p > floor(1/r).
    const Integer threshold = r.get_den() / r.get_num();
    if (threshold >= to_integer(sieve_.cap())) {
      return search(SearchOutcome::Status::cap_exceeded, sieve_.count());
    }
    if (threshold.get_d() >= prime_upper_bound(limit)) {
      return search(SearchOutcome::Status::limit_reached, saturating_add(limit, 1));
    }
    try {
      std::uint64_t floor_prime = 1;
      if (after > 0) floor_prime = sieve_.nth_prime(after);
      const std::uint64_t p =
          sieve_.next_prime_above(std::max<std::uint64_t>(to_index(threshold), floor_prime));
      const Index idx = sieve_.index_of(p);
      if (idx > limit) return search(SearchOutcome::Status::limit_reached, idx);
      return search(SearchOutcome::Status::found, idx);
    } catch (const ResourceLimitError& e) {
      return search(SearchOutcome::Status::cap_exceeded, e.largest_served());
    }
  }

  Index ratio_holds_from(double L, Index n_max) override {
    if (n_max <= 1) return 1;
    sieve_.nth_prime(n_max);
    const auto primes = sieve_.primes();
    const RatioTest test(L);
    for (Index n = n_max - 1; n >= 1; --n) {
      if (!test.holds(primes[n - 1], primes[n])) return n + 1;
    }
    return 1;
  }

  RatioExtreme min_ratio(Index n0, Index n1) override {
    sieve_.nth_prime(n1);
    const auto primes = sieve_.primes();
    Index best = n0;
    for (Index n = n0 + 1; n < n1; ++n) {
      // p_n / p_{n+1} < p_best / p_{best+1}
      const Wide lhs = static_cast<Wide>(primes[n - 1]) * primes[best];
      const Wide rhs = static_cast<Wide>(primes[best - 1]) * primes[n];
      if (lhs < rhs) best = n;
    }
    Value ratio(Rational(to_integer(primes[best - 1]), to_integer(primes[best])));
    return {ratio.to_backend(backend()), best};
  }

 private:
  PrimeSieve sieve_;
};

class TermList final : public Sequence {
 public:
  TermList(SequenceSpec spec, Backend backend, std::vector<Rational> terms)
      : Sequence(std::move(spec), backend), terms_(std::move(terms)) {}

  Rational exact_term(Index n) override {
    if (n > terms_.size()) throw SequenceExhausted(terms_.size());
    return terms_[n - 1];
  }

  std::optional<Index> length() const override { return terms_.size(); }

 private:
  std::vector<Rational> terms_;
};

void check_term_list(const std::vector<Rational>& terms) {
  if (terms.empty()) throw ValidationError(1, "sequence file has no terms");
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (sgn(terms[i]) <= 0) throw ValidationError(i + 1, "term is not positive");
    if (i > 0 && terms[i] > terms[i - 1]) {
      throw ValidationError(i + 1, "term increases");
    }
  }
}

}  // namespace

std::string_view to_string(Family family) {
  switch (family) {
    case Family::harmonic:
      return "harmonic";
    case Family::log_harmonic:
      return "log_harmonic";
    case Family::step_geometric:
      return "step_geometric";
    case Family::prime_reciprocal:
      return "prime_reciprocal";
    case Family::file_backed:
      break;
  }
  return "file_backed";
}

Family parse_family(std::string_view text) {
  if (text == "harmonic") return Family::harmonic;
  if (text == "log-harmonic" || text == "log_harmonic") return Family::log_harmonic;
  if (text == "step-geometric" || text == "step_geometric") return Family::step_geometric;
  if (text == "primes" || text == "prime_reciprocal" || text == "prime-reciprocal") {
    return Family::prime_reciprocal;
  }
  if (text == "file" || text == "file_backed") return Family::file_backed;
  throw ParseError("unknown sequence family '" + std::string(text) + "'");
}

SequenceSpec SequenceSpec::harmonic() {
  SequenceSpec s;
  s.family = Family::harmonic;
  s.declared_L = 1.0;
  return s;
}

SequenceSpec SequenceSpec::log_harmonic() {
  SequenceSpec s;
  s.family = Family::log_harmonic;
  s.declared_L = 1.0;
  return s;
}

SequenceSpec SequenceSpec::step_geometric(Rational r) {
  SequenceSpec s;
  s.family = Family::step_geometric;
  r.canonicalize();
  s.ratio = r;
  s.declared_L = r.get_d();
  return s;
}

SequenceSpec SequenceSpec::primes(std::uint64_t cap) {
  SequenceSpec s;
  s.family = Family::prime_reciprocal;
  s.sieve_cap = cap;
  s.declared_L = 1.0;
  return s;
}

SequenceSpec SequenceSpec::file(std::filesystem::path path, std::optional<double> declared_L) {
  SequenceSpec s;
  s.family = Family::file_backed;
  s.path = std::move(path);
  s.declared_L = declared_L;
  return s;
}

void SequenceSpec::validate() const {
  if (declared_L && !(*declared_L > 0.0 && *declared_L <= 1.0)) {
    throw DomainError("declared L must lie in (0, 1]");
  }
  switch (family) {
    case Family::step_geometric:
      if (!(sgn(ratio) > 0 && ratio < 1)) {
        throw DomainError("step_geometric ratio must lie in (0, 1)");
      }
      break;
    case Family::file_backed:
      if (path.empty()) throw ParseError("file_backed sequence needs a path");
      if (!std::filesystem::is_regular_file(path)) {
        throw ParseError("sequence file '" + path.string() + "' does not exist");
      }
      break;
    case Family::prime_reciprocal:
      if (sieve_cap == 1) throw DomainError("sieve cap must be at least 2");
      break;
    default:
      break;
  }
}

Sequence::Sequence(SequenceSpec spec, Backend backend)
    : spec_(std::move(spec)), backend_(backend) {}

Value Sequence::term(Index n) {
  if (n == 0) throw DomainError("sequence indices start at 1");
  if (backend_ == Backend::rational) return Value(exact_term(n));
  return Value(approx_term(n));
}

Approx Sequence::approx_term(Index n) { return approx_from_rational(exact_term(n)); }

SearchOutcome Sequence::first_index_below(Index after, const Value& bound, Index limit) {
  using Status = SearchOutcome::Status;
  Index end = limit;
  Status end_status = Status::limit_reached;
  if (const auto len = length(); len && *len < end) {
    end = *len;
    end_status = Status::exhausted;
  }
  if (after >= end) return search(end_status, end_status == Status::exhausted ? end : after + 1);

  // Probe result; a resource cap shrinks the searchable range instead.
  auto probe = [&](Index i, Decision& out) -> bool {
    try {
      out = strictly_less(term(i), bound);
      return true;
    } catch (const ResourceLimitError& e) {
      end = e.largest_served();
      end_status = Status::cap_exceeded;
      return false;
    }
  };

  Index lo = after;  // every index in (after, lo] fails the predicate
  Index hi = 0;      // first index known to satisfy it
  Index step = 1;
  while (hi == 0) {
    if (lo >= end) return search(end_status, end_status == Status::limit_reached ? end + 1 : end);
    const Index i = std::min(saturating_add(after, step), end);
    Decision d = Decision::undecidable;
    if (!probe(i, d)) continue;
    if (d == Decision::undecidable) return search(Status::undecidable, i);
    if (d == Decision::yes) {
      hi = i;
    } else {
      lo = i;
      step = step > kIndexMax / 2 ? kIndexMax : step * 2;
    }
  }
  while (hi - lo > 1) {
    const Index mid = lo + (hi - lo) / 2;
    Decision d = Decision::undecidable;
    probe(mid, d);  // mid < hi was already served
    if (d == Decision::undecidable) return search(Status::undecidable, mid);
    (d == Decision::yes ? hi : lo) = mid;
  }
  return search(Status::found, hi);
}

Rational Sequence::exact_range_sum(Index a, Index b) {
  Rational sum(0);
  for (Index i = a; i <= b; ++i) sum += exact_term(i);
  return sum;
}

Index Sequence::ratio_holds_from(double L, Index n_max) {
  if (n_max <= 1) return 1;
  if (backend_ == Backend::rational) {
    const Rational l = rational_from_double(L);
    Rational next = exact_term(n_max);
    for (Index n = n_max - 1; n >= 1; --n) {
      Rational current = exact_term(n);
      if (next < l * current) return n + 1;
      next = std::move(current);
    }
    return 1;
  }
  const Value l(approx_exact(L));
  Value next = term(n_max);
  for (Index n = n_max - 1; n >= 1; --n) {
    Value current = term(n);
    // Undecidable counts as a violation.
    if (strictly_less(next, l * current) != Decision::no) {
      return n + 1;
    }
    next = std::move(current);
  }
  return 1;
}

RatioExtreme Sequence::min_ratio(Index n0, Index n1) {
  if (n1 <= n0) throw DomainError("min_ratio needs n1 > n0");
  Value prev = term(n0);
  std::optional<RatioExtreme> best;
  for (Index n = n0; n < n1; ++n) {
    Value next = term(n + 1);
    Value ratio = next / prev;
    if (!best || (ratio.is_exact() ? ratio.rational() < best->ratio.rational()
                                   : ratio.to_double() < best->ratio.to_double())) {
      best = RatioExtreme{ratio, n};
    }
    prev = std::move(next);
  }
  return *best;
}

std::vector<Rational> parse_sequence_text(std::string_view text) {
  std::vector<Rational> terms;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      terms.push_back(parse_rational(line));
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return terms;
}

std::vector<Rational> parse_sequence_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open sequence file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_sequence_text(buffer.str());
}

SequenceHandle make_term_list_sequence(std::vector<Rational> terms, Backend backend,
                                       bool validate, std::optional<double> declared_L) {
  if (validate) check_term_list(terms);
  SequenceSpec spec;
  spec.family = Family::file_backed;
  spec.declared_L = declared_L;
  return std::make_unique<TermList>(std::move(spec), backend, std::move(terms));
}

SequenceHandle build_sequence(const SequenceSpec& spec, Backend backend) {
  spec.validate();
  switch (spec.family) {
    case Family::harmonic:
      return std::make_unique<Harmonic>(spec, backend);
    case Family::log_harmonic:
      if (backend == Backend::rational) {
        throw DomainError("log_harmonic is float-only; use the float backend");
      }
      return std::make_unique<LogHarmonic>(spec, backend);
    case Family::step_geometric:
      return std::make_unique<StepGeometric>(spec, backend);
    case Family::prime_reciprocal:
      return std::make_unique<PrimeReciprocal>(spec, backend);
    case Family::file_backed: {
      auto terms = parse_sequence_file(spec.path);
      check_term_list(terms);
      return std::make_unique<TermList>(spec, backend, std::move(terms));
    }
  }
  throw DomainError("unknown sequence family");
}

ValidationReport validate_prefix(Sequence& seq, Index N) {
  if (N < 2) throw DomainError("validate_prefix needs N >= 2");
  ValidationReport report;
  report.unverifiable = {
      "lim x_n = 0 cannot be confirmed from a finite prefix",
      "divergence of sum x_n cannot be confirmed from a finite prefix",
  };
  Index last = N;
  if (const auto len = seq.length(); len && *len < N) {
    last = *len;
    report.unverifiable.push_back("prefix shorter than requested: only " +
                                  std::to_string(*len) + " terms");
  }
  auto fail = [&](Index n, std::string problem) {
    report.passed = false;
    report.offending_index = n;
    report.problem = std::move(problem);
    return report;
  };

  Value prev = seq.term(1);
  report.checked = 1;
  if (prev.certain_sign() <= 0) return fail(1, "term is not positive");
  for (Index n = 2; n <= last; ++n) {
    Value x = seq.term(n);
    report.checked = n;
    if (x.certain_sign() <= 0) return fail(n, "term is not positive");
    if (strictly_less(prev, x) == Decision::yes) return fail(n, "term increases");
    Value ratio = x / prev;
    const bool better = !report.min_ratio ||
                        (ratio.is_exact()
                             ? ratio.rational() < report.min_ratio->ratio.rational()
                             : ratio.to_double() < report.min_ratio->ratio.to_double());
    if (better) report.min_ratio = RatioExtreme{std::move(ratio), n - 1};
    prev = std::move(x);
  }
  return report;
}

}  // namespace subsum
