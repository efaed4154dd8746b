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

#include "subsum/numerics.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace subsum {

namespace {

constexpr double kUnitRoundoff = std::numeric_limits<double>::epsilon() / 2;
constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_blank(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_blank(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_blank(s.back())) s.remove_suffix(1);
  return s;
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

Integer pow10(unsigned long e) {
  Integer r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, e);
  return r;
}

}  // namespace

std::string_view to_string(Backend backend) {
  return backend == Backend::rational ? "rational" : "float";
}

Backend parse_backend(std::string_view text) {
  if (text == "rational" || text == "exact") return Backend::rational;
  if (text == "float" || text == "floating") return Backend::floating;
  throw ParseError("unknown backend '" + std::string(text) +
                   "' (expected rational or float)");
}

std::string_view to_string(Decision decision) {
  switch (decision) {
    case Decision::yes:
      return "yes";
    case Decision::no:
      return "no";
    case Decision::undecidable:
      break;
  }
  return "undecidable";
}

double ulp(double x) {
  const double ax = std::fabs(x);
  if (std::isinf(ax) || std::isnan(ax)) return kInf;
  return std::nextafter(ax, kInf) - ax;
}

double round_up(double x) { return std::nextafter(x, kInf); }
double round_down(double x) { return std::nextafter(x, -kInf); }

double Approx::lower() const {
  return error_bound == 0.0 ? estimate : round_down(estimate - error_bound);
}
double Approx::upper() const {
  return error_bound == 0.0 ? estimate : round_up(estimate + error_bound);
}

Approx operator+(const Approx& a, const Approx& b) {
  const double est = a.estimate + b.estimate;
  return {est, round_up(round_up(a.error_bound + b.error_bound) + ulp(est))};
}

Approx operator-(const Approx& a, const Approx& b) {
  const double est = a.estimate - b.estimate;
  return {est, round_up(round_up(a.error_bound + b.error_bound) + ulp(est))};
}

Approx operator*(const Approx& a, const Approx& b) {
  const double est = a.estimate * b.estimate;
  const double ea = a.error_bound;
  const double eb = b.error_bound;
  double err = round_up(std::fabs(a.estimate) * eb);
  err = round_up(err + round_up(std::fabs(b.estimate) * ea));
  err = round_up(err + round_up(ea * eb));
  err = round_up(err + ulp(est));
  return {est, err};
}

Approx operator/(const Approx& a, const Approx& b) {
  const double mag_b = std::fabs(b.estimate);
  const double gap = round_down(mag_b - b.error_bound);
  if (!(gap > 0.0)) {
    throw DomainError("division by an approximation whose enclosure contains 0");
  }
  const double est = a.estimate / b.estimate;
  // |a/b - a'/b'| <= (|b'| ea + |a'| eb) / (|b'| (|b'| - eb))
  double num = round_up(mag_b * a.error_bound);
  num = round_up(num + round_up(std::fabs(a.estimate) * b.error_bound));
  const double den = round_down(mag_b * gap);
  double err = den > 0.0 ? round_up(num / den) : kInf;
  err = round_up(err + ulp(est));
  return {est, err};
}

Approx approx_from_rational(const Rational& q) {
  // mpq_get_d truncates, so the error is below one ulp of the result.
  const double est = q.get_d();
  if (std::isinf(est)) return {est, kInf};
  if (std::isfinite(est) && rational_from_double(est) == q) return {est, 0.0};
  return {est, ulp(est)};
}

Approx approx_exact(double x) { return {x, 0.0}; }

Approx approx_reciprocal(std::uint64_t n) {
  const double d = static_cast<double>(n);
  const double est = 1.0 / d;
  if (static_cast<std::uint64_t>(d) == n && std::fma(est, d, -1.0) == 0.0) return {est, 0.0};
  return {est, static_cast<std::uint64_t>(d) == n ? ulp(est) : 2.0 * ulp(est)};
}

Value::Value(Rational q) : rep_(std::move(q)) {
  std::get<Rational>(rep_).canonicalize();
}

Value::Value(Approx a) : rep_(a) {
  if (std::isnan(a.estimate) || std::isnan(a.error_bound) || a.error_bound < 0.0) {
    throw DomainError("approximation needs a finite estimate and error_bound >= 0");
  }
}

Value Value::zero(Backend backend) {
  return backend == Backend::rational ? Value(Rational(0)) : Value(Approx{});
}

const Rational& Value::rational() const {
  if (const auto* q = std::get_if<Rational>(&rep_)) return *q;
  throw DomainError("value is not exact");
}

const Approx& Value::approx() const {
  if (const auto* a = std::get_if<Approx>(&rep_)) return *a;
  throw DomainError("value is exact, not an approximation");
}

double Value::to_double() const {
  if (const auto* q = std::get_if<Rational>(&rep_)) return q->get_d();
  return std::get<Approx>(rep_).estimate;
}

Value Value::to_backend(Backend target) const {
  if (target == backend()) return *this;
  if (target == Backend::floating) return Value(approx_from_rational(rational()));
  throw DomainError("an approximation cannot be converted to an exact rational");
}

int Value::certain_sign() const {
  if (const auto* q = std::get_if<Rational>(&rep_)) return sgn(*q);
  const Approx& a = std::get<Approx>(rep_);
  if (a.lower() > 0.0) return 1;
  if (a.upper() < 0.0) return -1;
  return 0;
}

namespace {

void require_same_backend(const Value& a, const Value& b) {
  if (a.backend() != b.backend()) {
    throw DomainError("operands use different numeric backends");
  }
}

}  // namespace

Value operator+(const Value& a, const Value& b) {
  require_same_backend(a, b);
  if (a.is_exact()) return Value(Rational(a.rational() + b.rational()));
  return Value(a.approx() + b.approx());
}

Value operator-(const Value& a, const Value& b) {
  require_same_backend(a, b);
  if (a.is_exact()) return Value(Rational(a.rational() - b.rational()));
  return Value(a.approx() - b.approx());
}

Value operator*(const Value& a, const Value& b) {
  require_same_backend(a, b);
  if (a.is_exact()) return Value(Rational(a.rational() * b.rational()));
  return Value(a.approx() * b.approx());
}

Value operator/(const Value& a, const Value& b) {
  require_same_backend(a, b);
  if (a.is_exact()) {
    if (sgn(b.rational()) == 0) throw DomainError("division by zero");
    return Value(Rational(a.rational() / b.rational()));
  }
  return Value(a.approx() / b.approx());
}

bool operator==(const Value& a, const Value& b) {
  if (a.backend() != b.backend()) return false;
  if (a.is_exact()) return a.rational() == b.rational();
  return a.approx().estimate == b.approx().estimate &&
         a.approx().error_bound == b.approx().error_bound;
}

Value value_from_ratio(const Integer& p, const Integer& q, Backend backend) {
  if (sgn(q) == 0) throw DomainError("value_from_ratio: zero denominator");
  Rational r(p, q);
  r.canonicalize();
  if (backend == Backend::rational) return Value(std::move(r));
  // Small operands divide with a single correctly rounded operation.
  constexpr unsigned long kExactBits = 53;
  if (mpz_sizeinbase(p.get_mpz_t(), 2) <= kExactBits &&
      mpz_sizeinbase(q.get_mpz_t(), 2) <= kExactBits) {
    const double pd = p.get_d();
    const double qd = q.get_d();
    const double est = pd / qd;
    // The residual of the division is exactly representable, so fma tells
    // whether the quotient is exact.
    return Value(Approx{est, std::fma(est, qd, -pd) == 0.0 ? 0.0 : ulp(est)});
  }
  return Value(approx_from_rational(r));
}

Decision strictly_less(const Value& a, const Value& b) {
  require_same_backend(a, b);
  if (a.is_exact()) return a.rational() < b.rational() ? Decision::yes : Decision::no;
  const Approx& x = a.approx();
  const Approx& y = b.approx();
  if (x.upper() < y.lower()) return Decision::yes;
  if (x.lower() >= y.upper()) return Decision::no;
  return Decision::undecidable;
}

Accumulator::Accumulator(Backend backend) : backend_(backend) {}

void Accumulator::add(const Value& term) {
  if (term.backend() != backend_) {
    throw DomainError("accumulator term uses a different backend");
  }
  if (term.certain_sign() <= 0) {
    throw DomainError("accumulator terms must be positive");
  }
  ++count_;
  if (backend_ == Backend::rational) {
    exact_ += term.rational();
    return;
  }
  const Approx& a = term.approx();
  if (count_ == 1) {
    sum_ = a.estimate;
  } else {
    // TwoSum: sum_ + q == old sum_ + x exactly.
    const double s = sum_ + a.estimate;
    const double z = s - sum_;
    const double q = (sum_ - (s - z)) + (a.estimate - z);
    sum_ = s;
    compensation_ += q;
  }
  abs_sum_ += std::fabs(a.estimate);
  input_error_ = round_up(input_error_ + a.error_bound);
}

Value Accumulator::value() const {
  if (backend_ == Backend::rational) return Value(exact_);
  if (count_ == 0) return Value(Approx{});
  const double res = sum_ + compensation_;
  const double n = static_cast<double>(count_);
  const double nu = round_up((n - 1.0) * kUnitRoundoff);
  const double gamma = nu < 1.0 ? round_up(nu / round_down(1.0 - nu)) : kInf;
  // The plainly summed |x_i| is within a factor (1 + n u) of the true total.
  const double abs_upper = round_up(abs_sum_ * round_up(1.0 + 2.0 * n * kUnitRoundoff));
  double err = round_up(2.0 * ulp(res));
  err = round_up(err + round_up(round_up(gamma * gamma) * abs_upper));
  err = round_up(err + input_error_);
  return Value(Approx{res, err});
}

Accumulator accumulate(Accumulator acc, const Value& term) {
  acc.add(term);
  return acc;
}

Rational parse_rational(std::string_view text) {
  const std::string_view s = trim(text);
  if (s.empty()) throw ParseError("empty rational literal");
  const std::string original(s);

  if (const auto slash = s.find('/'); slash != std::string_view::npos) {
    std::string_view num = trim(s.substr(0, slash));
    std::string_view den = trim(s.substr(slash + 1));
    bool negative = false;
    if (!num.empty() && (num.front() == '-' || num.front() == '+')) {
      negative = num.front() == '-';
      num.remove_prefix(1);
    }
    if (!all_digits(num) || !all_digits(den)) {
      throw ParseError("malformed rational '" + original + "'");
    }
    Integer p(std::string(num), 10);
    Integer q(std::string(den), 10);
    if (sgn(q) == 0) throw ParseError("zero denominator in '" + original + "'");
    if (negative) p = -p;
    Rational r(p, q);
    r.canonicalize();
    return r;
  }

  std::string_view rest = s;
  bool negative = false;
  if (rest.front() == '-' || rest.front() == '+') {
    negative = rest.front() == '-';
    rest.remove_prefix(1);
  }
  long exponent = 0;
  if (const auto e = rest.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_text = rest.substr(e + 1);
    rest = rest.substr(0, e);
    bool exp_negative = false;
    if (!exp_text.empty() && (exp_text.front() == '-' || exp_text.front() == '+')) {
      exp_negative = exp_text.front() == '-';
      exp_text.remove_prefix(1);
    }
    if (!all_digits(exp_text) || exp_text.size() > 6) {
      throw ParseError("malformed exponent in '" + original + "'");
    }
    exponent = std::stol(std::string(exp_text));
    if (exp_negative) exponent = -exponent;
  }
  std::string_view int_part = rest;
  std::string_view frac_part;
  if (const auto dot = rest.find('.'); dot != std::string_view::npos) {
    int_part = rest.substr(0, dot);
    frac_part = rest.substr(dot + 1);
  }
  if ((int_part.empty() && frac_part.empty()) ||
      (!int_part.empty() && !all_digits(int_part)) ||
      (!frac_part.empty() && !all_digits(frac_part))) {
    throw ParseError("malformed number '" + original + "'");
  }
  Integer mantissa(std::string(int_part) + std::string(frac_part), 10);
  if (negative) mantissa = -mantissa;
  const long scale = exponent - static_cast<long>(frac_part.size());
  Rational r;
  if (scale >= 0) {
    r = Rational(mantissa * pow10(static_cast<unsigned long>(scale)));
  } else {
    r = Rational(mantissa, pow10(static_cast<unsigned long>(-scale)));
  }
  r.canonicalize();
  return r;
}

Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw DomainError("non-finite double has no rational value");
  Rational r;
  mpq_set_d(r.get_mpq_t(), x);
  return r;
}

std::string to_decimal_string(const Rational& q, int digits) {
  if (digits < 1) digits = 1;
  if (sgn(q) == 0) return "0";
  Rational mag = abs(q);
  // Decimal exponent estimate from bit lengths, then fixed up exactly.
  const long bits = static_cast<long>(bit_length(mag.get_num())) -
                    static_cast<long>(bit_length(mag.get_den()));
  long e = static_cast<long>(std::floor(static_cast<double>(bits) * 0.30102999566398120));
  auto power = [](long k) {
    return k >= 0 ? Rational(pow10(static_cast<unsigned long>(k)))
                  : Rational(Integer(1), pow10(static_cast<unsigned long>(-k)));
  };
  while (mag < power(e)) --e;
  while (mag >= power(e + 1)) ++e;
  // m = round(mag * 10^(digits-1-e)), ties away from zero.
  Rational scaled = mag * power(digits - 1 - e);
  Integer m = scaled.get_num() / scaled.get_den();
  Rational frac = scaled - Rational(m);
  if (frac >= Rational(1, 2)) m += 1;
  if (m >= pow10(static_cast<unsigned long>(digits))) {
    m /= 10;
    ++e;
  }
  std::string body = m.get_str();
  std::string out = sgn(q) < 0 ? "-" : "";
  out += body.substr(0, 1);
  if (body.size() > 1) {
    out += '.';
    out += body.substr(1);
  }
  out += 'e';
  out += e < 0 ? '-' : '+';
  const std::string exp_digits = std::to_string(e < 0 ? -e : e);
  if (exp_digits.size() < 2) out += '0';
  out += exp_digits;
  return out;
}

std::size_t bit_length(const Integer& z) {
  if (sgn(z) == 0) return 0;
  return mpz_sizeinbase(z.get_mpz_t(), 2);
}

}  // namespace subsum
