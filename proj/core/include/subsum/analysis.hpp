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

#ifndef SUBSUM_ANALYSIS_HPP_
#define SUBSUM_ANALYSIS_HPP_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "subsum/achiever.hpp"
#include "subsum/numerics.hpp"
#include "subsum/sequences.hpp"

namespace subsum {

struct RateOptions {
  // Margin subtracted from L; default min(0.01, (L - 1/2) / 2).
  std::optional<double> epsilon;
  // Overrides the sequence's declared liminf.
  std::optional<double> declared_L;
  // Use the windowed estimate even when the family declares L.
  bool ignore_declared = false;
};

// Working ratio bound L_tilde = L - epsilon and the index from which
// x_{n+1} >= L_tilde x_n held on the scanned prefix.
struct RateEstimate {
  std::optional<double> L_declared;
  double L_hat = 0.0;      // min of x_{n+1}/x_n over [window_begin, window_end)
  Index L_hat_at = 0;
  Index window_begin = 0;
  Index window_end = 0;
  bool heuristic = true;   // true when L_tilde rests on L_hat
  double epsilon = 0.0;
  double L_tilde = 0.0;
  Index N_epsilon = 1;     // over [1, window_end)
};

double default_epsilon(double L);

// Requires n1 > n0 >= 1.
RateEstimate estimate_L(Sequence& seq, Index n0, Index n1, const RateOptions& options = {});

// estimate_L over a tail window ending just past the largest selected index.
RateEstimate estimate_rate_for(Sequence& seq, const SelectionResult& selection,
                               const RateOptions& options = {});

// Largest kappa >= 1 with L + L^2 + ... + L^kappa < 1, evaluated exactly on
// the binary64 value of L. Throws DomainError unless 1/2 < L < 1.
int kappa_bound(double L_tilde);

// (1 - L_tilde)^(1 / (2K)).
double theta(double L_tilde, int K);

// sqrt(1 + epsilon - L): the rate quoted for the regime where every block
// has length one.
double single_term_theta(double L, double epsilon);

// Block lengths b_n - a_n + 1.
std::vector<Index> kappa_series(const SelectionResult& selection);

enum class Verdict { pass, fail, refused };
std::string_view to_string(Verdict v);

struct CertificateRow {
  enum class Check { pass, fail, pre_tail };
  Index k = 0;
  Index n = 0;
  double x = 0.0;
  double log10_bound = 0.0;  // log10(C theta^k)
  Check check = Check::pre_tail;
};

// kappa_{n+1} x_{b_{n+1}} <= (1 - L_tilde) x_{b_{n-1}} at block n.
struct DecayCheck {
  Index n = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  Decision holds = Decision::yes;
};

struct RateCertificate {
  Verdict verdict = Verdict::refused;
  std::string reason;

  double L_tilde = 0.0;
  double epsilon = 0.0;
  std::optional<double> L_declared;
  bool heuristic = true;
  int K = 0;
  double theta_formula = 0.0;    // (1 - L_tilde)^(1/2K)
  double theta = 0.0;            // rate actually certified
  bool theta_overridden = false;
  std::optional<double> theta_single_term;  // sqrt(1 + eps - L) when K == 1

  Index N_epsilon = 1;
  Index k0 = 0;       // first k with n_k >= N_epsilon
  Index N_block = 0;  // first block n >= 2 with a_n - 1 >= N_epsilon

  // C = max_{k >= k0} x_{n_k} / theta^k, kept in log10 because it can exceed
  // the double range while being perfectly finite.
  double log10_C = 0.0;
  std::vector<CertificateRow> rows;

  std::vector<Index> kappa;
  Index kappa_violations = 0;

  std::vector<DecayCheck> decay;
  Index decay_violations = 0;
  Index decay_unverified = 0;

  // C' = max_{n >= N_block} x_{b_n} / (1 - L_tilde)^{n/2}, log10.
  std::optional<double> log10_C_block;

  // exp(slope) of a least-squares fit of log x_{n_k} against k over the tail.
  std::optional<double> empirical_rate;

  double C() const;  // may be +inf when log10_C exceeds the double range
};

struct CertifyOptions {
  // Certify against this rate instead of (1 - L_tilde)^(1/2K).
  std::optional<double> theta;
};

// Fits and checks x_{n_k} <= C theta^k over the tail, the block-length bound
// kappa_n <= K and the chained block decay inequality. Returns a refused
// certificate (with reason) when L_tilde <= 1/2 or the tail is empty.
RateCertificate certify(const SelectionResult& selection, const RateEstimate& rate,
                        Sequence& seq, const CertifyOptions& options = {});

struct AlphaTail {
  double alpha = 1.0;
  std::vector<double> partial_sums;  // sum_{j <= k} x_{n_j}^alpha, k = 1..m
  std::optional<Value> exact_sum;    // alpha == 1 only
  // (C theta^{m+1})^alpha / (1 - theta^alpha): bound on the unseen tail,
  // valid given the certificate.
  std::optional<double> tail_bound;
  std::optional<double> upper_bound;
};

std::vector<AlphaTail> alpha_tail(const SelectionResult& selection, Sequence& seq,
                                  const RateCertificate& certificate,
                                  std::span<const double> alphas);

}  // namespace subsum

#endif  // SUBSUM_ANALYSIS_HPP_
