#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "seqdet/rng.hpp"

namespace seqdet {

enum class PriorKind { geometric, polynomial_tail };

/// Outcome of the prior-class check: the tail exponent mu, the r-th
/// log-moment sum when it had to be evaluated (heavy tails only), and the
/// overall verdict.
struct ConditionCReport {
  double mu = 0.0;
  std::optional<double> log_moment_sum;
  bool satisfied = false;
};

/// Change-point prior distribution on {-1} u {0, 1, 2, ...}.
///
/// The mass q of the event {nu < 0} (change already in effect before the
/// first observation) is collapsed onto the sentinel value -1; only q itself
/// enters any statistic. Two families are supported:
///   geometric        pi_k = (1-q) rho (1-rho)^k
///   polynomial-tail  pi_k propto (k+1)^{-(1+s)} truncated at K, renormalized
///
/// rho = 1 is admitted as the degenerate point mass at nu = 0; its survival
/// function vanishes from n = 1 on, which downstream code must treat as a
/// DegeneratePriorError when used as a divisor.
///
/// Immutable after construction; safe to share across threads.
class Prior {
 public:
  static Prior geometric(double rho, double q = 0.0);
  static Prior polynomial_tail(double s, std::int64_t truncation = 10000,
                               double q = 0.0);

  PriorKind kind() const { return kind_; }
  double q() const { return q_; }
  double rho() const { return rho_; }
  double tail_index() const { return s_; }
  std::int64_t truncation() const { return truncation_; }

  /// pi_k = P(nu = k); zero beyond the truncated support.
  double pmf(std::int64_t k) const;
  double log_pmf(std::int64_t k) const;

  /// P(nu >= n) = 1 - q - sum_{k<n} pi_k. Exactly zero once a truncated
  /// support is exhausted; callers dividing by it must check.
  double survival(std::int64_t n) const;
  double log_survival(std::int64_t n) const;

  /// Exponential decay rate mu of the survival function: |log(1-rho)| for
  /// the geometric family, 0 for polynomial tails.
  double tail_exponent() const;

  /// nu_bar = sum_{j>=1} j pi_j.
  double mean_changepoint() const;

  /// Draws nu; the {nu < 0} atom is returned as -1.
  std::int64_t sample_changepoint(Rng& rng) const;

  /// Validity check for the prior class: mu > 0 suffices; when mu = 0 the
  /// r-th log-moment sum over the support is evaluated directly.
  ConditionCReport check_condition_c(double r) const;

 private:
  Prior() = default;

  PriorKind kind_ = PriorKind::geometric;
  double q_ = 0.0;
  double rho_ = 0.0;   // geometric only
  double s_ = 0.0;     // polynomial only
  std::int64_t truncation_ = 0;

  // polynomial family: pmf over 0..K and suffix sums P(nu >= n) for
  // n = 0..K+1, both computed once at construction.
  std::vector<double> poly_pmf_;
  std::vector<double> poly_survival_;
  std::vector<double> poly_cdf_;  // for inverse-cdf sampling
};

}  // namespace seqdet
