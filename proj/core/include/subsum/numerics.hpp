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

#ifndef SUBSUM_NUMERICS_HPP_
#define SUBSUM_NUMERICS_HPP_

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

#include "subsum/errors.hpp"

namespace subsum {

using Integer = mpz_class;
using Rational = mpq_class;

// Numeric backend a run is carried out in.
enum class Backend { rational, floating };

std::string_view to_string(Backend backend);
Backend parse_backend(std::string_view text);

// Outcome of a comparison that may not be decidable from error-tracked data.
enum class Decision { yes, no, undecidable };

std::string_view to_string(Decision decision);

// A binary64 estimate together with a rigorous bound on
// |estimate - true value|. All bound arithmetic rounds outward.
struct Approx {
  double estimate = 0.0;
  double error_bound = 0.0;

  // Certified enclosure [lower(), upper()] of the true value.
  double lower() const;
  double upper() const;
};

Approx operator+(const Approx& a, const Approx& b);
Approx operator-(const Approx& a, const Approx& b);
Approx operator*(const Approx& a, const Approx& b);
// Throws DomainError when the divisor's enclosure contains zero.
Approx operator/(const Approx& a, const Approx& b);

// Nearest binary64 to `q`, with the bound covering one rounding.
Approx approx_from_rational(const Rational& q);
// An exactly representable double; zero error.
Approx approx_exact(double x);
// 1/n with the error of its roundings (zero when 1/n is a double).
Approx approx_reciprocal(std::uint64_t n);

// Distance to the next double above |x|; at least one rounding error of x.
double ulp(double x);
double round_up(double x);
double round_down(double x);

// Backend-tagged number. The rational alternative is kept canonical
// (lowest terms, positive denominator); the floating alternative is an Approx.
// Values are immutable once built and may be shared across threads.
class Value {
 public:
  Value() = default;
  explicit Value(Rational q);
  explicit Value(Approx a);

  static Value zero(Backend backend);

  Backend backend() const noexcept {
    return rep_.index() == 0 ? Backend::rational : Backend::floating;
  }
  bool is_exact() const noexcept { return backend() == Backend::rational; }

  // Throws DomainError when called on the other alternative.
  const Rational& rational() const;
  const Approx& approx() const;

  // Nearest double (rational) or the estimate (floating).
  double to_double() const;

  // Rational values convert with one rounding; floating -> rational throws.
  Value to_backend(Backend target) const;

  // Exact sign for rationals; for approximations, the sign of the enclosure
  // or 0 when it straddles zero.
  int certain_sign() const;

  friend Value operator+(const Value& a, const Value& b);
  friend Value operator-(const Value& a, const Value& b);
  friend Value operator*(const Value& a, const Value& b);
  friend Value operator/(const Value& a, const Value& b);

  // Structural equality (same backend, same stored numbers).
  friend bool operator==(const Value& a, const Value& b);

 private:
  std::variant<Rational, Approx> rep_{Rational(0)};
};

// p/q as a Value in the requested backend. Throws DomainError when q == 0.
Value value_from_ratio(const Integer& p, const Integer& q,
                       Backend backend = Backend::rational);

// a < b. Exact for rationals. For approximations: yes when the enclosures are
// strictly separated with a below b, no when a's lower end is at or above b's
// upper end, undecidable otherwise. Mixed backends throw DomainError.
Decision strictly_less(const Value& a, const Value& b);

// Running sum of positive terms. The floating flavour uses cascaded TwoSum
// (Ogita-Rump-Oishi Sum2); its bound is
//   |res - sum| <= 2 ulp(res) + gamma_{n-1}^2 * sum|x_i| + sum(err_i).
// Single owner; copy to branch.
class Accumulator {
 public:
  explicit Accumulator(Backend backend = Backend::rational);

  // Throws DomainError for a non-positive or wrong-backend term.
  void add(const Value& term);

  Value value() const;
  std::size_t count() const noexcept { return count_; }
  Backend backend() const noexcept { return backend_; }

 private:
  Backend backend_;
  std::size_t count_ = 0;
  Rational exact_{0};
  double sum_ = 0.0;
  double compensation_ = 0.0;
  double abs_sum_ = 0.0;
  double input_error_ = 0.0;
};

Accumulator accumulate(Accumulator acc, const Value& term);

// Parses "p/q", integers and decimals with optional exponent ("0.25",
// "-1.5e-3") into an exact rational. Throws ParseError.
Rational parse_rational(std::string_view text);

// Exact value of a finite double.
Rational rational_from_double(double x);

// Scientific notation with `digits` significant digits, correctly rounded
// (ties away from zero) from the exact rational.
std::string to_decimal_string(const Rational& q, int digits = 17);

std::size_t bit_length(const Integer& z);

}  // namespace subsum

#endif  // SUBSUM_NUMERICS_HPP_
