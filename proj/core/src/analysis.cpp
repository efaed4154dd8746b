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

#include "subsum/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace subsum {

namespace {

constexpr std::size_t kTermwiseBlock = 4096;

RateCertificate& refuse(RateCertificate& c, std::string reason) {
  c.verdict = Verdict::refused;
  c.reason = std::move(reason);
  return c;
}

// lhs <= rhs: exact for rationals, by enclosure otherwise.
Decision at_most(const Value& lhs, const Value& rhs) {
  switch (strictly_less(rhs, lhs)) {
    case Decision::yes:
      return Decision::no;
    case Decision::no:
      return Decision::yes;
    case Decision::undecidable:
      break;
  }
  return Decision::undecidable;
}

}  // namespace

double default_epsilon(double L) {
  if (!(L > 0.5)) return 0.01;
  return std::min(0.01, (L - 0.5) / 2.0);
}

RateEstimate estimate_L(Sequence& seq, Index n0, Index n1, const RateOptions& options) {
  if (n0 < 1 || n1 <= n0) throw DomainError("estimate_L needs n1 > n0 >= 1");
  RateEstimate est;
  const RatioExtreme extreme = seq.min_ratio(n0, n1);
  est.L_hat = extreme.ratio.to_double();
  est.L_hat_at = extreme.at;
  est.window_begin = n0;
  est.window_end = n1;
  if (options.declared_L) {
    est.L_declared = options.declared_L;
  } else if (!options.ignore_declared) {
    est.L_declared = seq.spec().declared_L;
  }
  est.heuristic = !est.L_declared.has_value();
  const double base = est.L_declared.value_or(est.L_hat);
  est.epsilon = options.epsilon.value_or(default_epsilon(base));
  if (!(est.epsilon >= 0.0)) throw DomainError("epsilon must be non-negative");
  est.L_tilde = base - est.epsilon;
  est.N_epsilon = seq.ratio_holds_from(est.L_tilde, n1);
  return est;
}

RateEstimate estimate_rate_for(Sequence& seq, const SelectionResult& selection,
                               const RateOptions& options) {
  const Index last = selection.indices.empty() ? 1 : selection.indices.back();
  const Index n1 = last + 1;
  const Index n0 = std::max<Index>(1, n1 / 2);
  return estimate_L(seq, n0, n1, options);
}

int kappa_bound(double L_tilde) {
  if (!(L_tilde > 0.5 && L_tilde < 1.0)) {
    throw DomainError("kappa_bound needs 1/2 < L < 1: for L <= 1/2 the geometric "
                      "sum never reaches 1 and no finite bound exists");
  }
  const Rational l = rational_from_double(L_tilde);
  Rational power = l;
  Rational sum = l;
  int K = 0;
  while (sum < 1) {
    ++K;
    power *= l;
    sum += power;
  }
  return K;
}

double theta(double L_tilde, int K) {
  if (!(L_tilde > 0.5 && L_tilde < 1.0) || K < 1) {
    throw DomainError("theta needs 1/2 < L < 1 and K >= 1");
  }
  return std::pow(1.0 - L_tilde, 1.0 / (2.0 * K));
}

double single_term_theta(double L, double epsilon) { return std::sqrt(1.0 + epsilon - L); }

std::vector<Index> kappa_series(const SelectionResult& selection) {
  std::vector<Index> out;
  out.reserve(selection.blocks.size());
  for (const Block& b : selection.blocks) out.push_back(b.length());
  return out;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "pass";
    case Verdict::fail:
      return "fail";
    case Verdict::refused:
      break;
  }
  return "refused";
}

double RateCertificate::C() const { return std::pow(10.0, log10_C); }

RateCertificate certify(const SelectionResult& selection, const RateEstimate& rate,
                        Sequence& seq, const CertifyOptions& options) {
  RateCertificate c;
  c.L_tilde = rate.L_tilde;
  c.epsilon = rate.epsilon;
  c.L_declared = rate.L_declared;
  c.heuristic = rate.heuristic;
  c.N_epsilon = rate.N_epsilon;
  c.kappa = kappa_series(selection);

  if (selection.blocks.empty()) return refuse(c, "empty selection");
  if (!(rate.L_tilde > 0.5)) {
    return refuse(c, "L_tilde <= 1/2: block lengths are not bounded");
  }
  if (!(rate.L_tilde < 1.0)) return refuse(c, "L_tilde >= 1: increase epsilon");

  c.K = kappa_bound(rate.L_tilde);
  c.theta_formula = theta(rate.L_tilde, c.K);
  c.theta = c.theta_formula;
  if (options.theta) {
    if (!(*options.theta > 0.0 && *options.theta < 1.0)) {
      throw DomainError("theta override must lie in (0, 1)");
    }
    c.theta = *options.theta;
    c.theta_overridden = true;
  }
  if (c.K == 1 && rate.L_declared) {
    c.theta_single_term = single_term_theta(*rate.L_declared, rate.epsilon);
  }

  const auto& blocks = selection.blocks;
  const Index m = blocks.size();
  c.N_block = m + 1;
  for (Index n = 2; n <= m; ++n) {
    if (blocks[n - 1].a - 1 >= rate.N_epsilon) {
      c.N_block = n;
      break;
    }
  }
  for (Index n = c.N_block; n <= m; ++n) {
    if (c.kappa[n - 1] > static_cast<Index>(c.K)) ++c.kappa_violations;
  }

  // kappa_{n+1} x_{b_{n+1}} <= (1 - L_tilde) x_{b_{n-1}}
  const Value shrink =
      Value(Rational(1) - rational_from_double(rate.L_tilde)).to_backend(seq.backend());
  for (Index n = std::max<Index>(c.N_block, 2); n + 1 <= m; ++n) {
    const Block& next = blocks[n];
    const Block& prev = blocks[n - 2];
    const Value kappa =
        Value(Rational(static_cast<unsigned long>(next.length()))).to_backend(seq.backend());
    const Value lhs = kappa * seq.term(next.b);
    const Value rhs = shrink * seq.term(prev.b);
    DecayCheck check{n, lhs.to_double(), rhs.to_double(), at_most(lhs, rhs)};
    if (check.holds == Decision::no) ++c.decay_violations;
    if (check.holds == Decision::undecidable) ++c.decay_unverified;
    c.decay.push_back(check);
  }

  const auto& indices = selection.indices;
  const auto first_tail = std::find_if(indices.begin(), indices.end(),
                                       [&](Index n) { return n >= rate.N_epsilon; });
  if (first_tail == indices.end()) {
    return refuse(c, "empty tail: no selected index reaches N_epsilon = " +
                         std::to_string(rate.N_epsilon));
  }
  c.k0 = static_cast<Index>(first_tail - indices.begin()) + 1;

  const double log10_theta = std::log10(c.theta);
  // scaled[k] = log10(x_{n_k} / theta^k); C is its maximum over the tail, and
  // each row is checked in this same form so rounding cannot flip it.
  std::vector<double> log10_x(indices.size());
  std::vector<double> scaled(indices.size());
  c.rows.resize(indices.size());
  c.log10_C = -std::numeric_limits<double>::infinity();
  for (Index k = 1; k <= indices.size(); ++k) {
    const double x = seq.approx_term(indices[k - 1]).estimate;
    log10_x[k - 1] = std::log10(x);
    scaled[k - 1] = log10_x[k - 1] - static_cast<double>(k) * log10_theta;
    c.rows[k - 1].k = k;
    c.rows[k - 1].n = indices[k - 1];
    c.rows[k - 1].x = x;
    if (k >= c.k0) c.log10_C = std::max(c.log10_C, scaled[k - 1]);
  }
  Index row_failures = 0;
  for (auto& row : c.rows) {
    row.log10_bound = c.log10_C + static_cast<double>(row.k) * log10_theta;
    if (row.k < c.k0) {
      row.check = CertificateRow::Check::pre_tail;
    } else if (scaled[row.k - 1] <= c.log10_C) {
      row.check = CertificateRow::Check::pass;
    } else {
      row.check = CertificateRow::Check::fail;
      ++row_failures;
    }
  }

  if (c.N_block <= m) {
    const double log10_shrink = std::log10(1.0 - rate.L_tilde);
    double best = -std::numeric_limits<double>::infinity();
    for (Index n = c.N_block; n <= m; ++n) {
      const double lx = std::log10(seq.approx_term(blocks[n - 1].b).estimate);
      best = std::max(best, lx - 0.5 * static_cast<double>(n) * log10_shrink);
    }
    c.log10_C_block = best;
  }

  // Least squares of ln x_{n_k} on k over the tail.
  const Index tail = indices.size() - c.k0 + 1;
  if (tail >= 2) {
    double sk = 0, sy = 0, skk = 0, sky = 0;
    for (Index k = c.k0; k <= indices.size(); ++k) {
      const double y = log10_x[k - 1] * std::log(10.0);
      const double kk = static_cast<double>(k);
      sk += kk;
      sy += y;
      skk += kk * kk;
      sky += kk * y;
    }
    const double t = static_cast<double>(tail);
    const double denom = t * skk - sk * sk;
    if (denom > 0) c.empirical_rate = std::exp((t * sky - sk * sy) / denom);
  }

  if (!std::isfinite(c.log10_C)) {
    c.verdict = Verdict::fail;
    c.reason = "fitted C is not finite";
  } else if (row_failures > 0) {
    c.verdict = Verdict::fail;
    c.reason = std::to_string(row_failures) + " tail terms exceed C theta^k";
  } else if (c.kappa_violations > 0) {
    c.verdict = Verdict::fail;
    c.reason = std::to_string(c.kappa_violations) + " blocks longer than K";
  } else if (c.decay_violations > 0) {
    c.verdict = Verdict::fail;
    c.reason = std::to_string(c.decay_violations) + " block decay violations";
  } else {
    c.verdict = Verdict::pass;
    c.reason = "x_{n_k} <= C theta^k for all k >= k0";
  }
  return c;
}

std::vector<AlphaTail> alpha_tail(const SelectionResult& selection, Sequence& seq,
                                  const RateCertificate& certificate,
                                  std::span<const double> alphas) {
  std::vector<double> x;
  x.reserve(selection.indices.size());
  for (const Index n : selection.indices) x.push_back(seq.approx_term(n).estimate);

  const bool certified = certificate.verdict == Verdict::pass;
  const double log10_theta = certified ? std::log10(certificate.theta) : 0.0;
  const auto m = static_cast<double>(x.size());

  std::vector<AlphaTail> out;
  for (const double alpha : alphas) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
      throw DomainError("alpha must be a positive finite number");
    }
    AlphaTail t;
    t.alpha = alpha;
    t.partial_sums.reserve(x.size());
    long double running = 0.0L;
    for (const double xi : x) {
      running += std::pow(static_cast<long double>(xi), static_cast<long double>(alpha));
      t.partial_sums.push_back(static_cast<double>(running));
    }

    if (alpha == 1.0) {
      if (seq.backend() == Backend::rational) {
        Rational sum(0);
        for (const Block& b : selection.blocks) {
          if (b.length() <= kTermwiseBlock) {
            for (Index n = b.a; n <= b.b; ++n) sum += seq.exact_term(n);
          } else {
            sum += seq.exact_range_sum(b.a, b.b);
          }
        }
        t.exact_sum = Value(std::move(sum));
      } else {
        Accumulator acc(Backend::floating);
        for (const Index n : selection.indices) acc.add(seq.term(n));
        t.exact_sum = acc.value();
      }
    }

    if (certified) {
      // log10 of (C theta^{m+1})^alpha / (1 - theta^alpha)
      const double head = alpha * (certificate.log10_C + (m + 1.0) * log10_theta);
      const double denom = 1.0 - std::pow(certificate.theta, alpha);
      if (denom > 0.0) {
        const double bound = std::pow(10.0, head) / denom;
        if (std::isfinite(bound)) {
          t.tail_bound = bound;
          const double partial = t.partial_sums.empty() ? 0.0 : t.partial_sums.back();
          t.upper_bound = partial + bound;
        }
      }
    }
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace subsum
