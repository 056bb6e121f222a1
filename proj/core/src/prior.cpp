#include "seqdet/prior.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "seqdet/numeric.hpp"

namespace seqdet {

Prior Prior::geometric(double rho, double q) {
  if (!(rho > 0.0) || rho > 1.0) {
    throw std::invalid_argument("geometric prior requires rho in (0, 1]");
  }
  if (!(q >= 0.0) || q >= 1.0) {
    throw std::invalid_argument("prior requires q in [0, 1)");
  }
  Prior p;
  p.kind_ = PriorKind::geometric;
  p.rho_ = rho;
  p.q_ = q;
  return p;
}

Prior Prior::polynomial_tail(double s, std::int64_t truncation, double q) {
  if (!(s > 0.0)) {
    throw std::invalid_argument("polynomial-tail prior requires s > 0");
  }
  if (truncation < 1) {
    throw std::invalid_argument("polynomial-tail prior requires K >= 1");
  }
  if (!(q >= 0.0) || q >= 1.0) {
    throw std::invalid_argument("prior requires q in [0, 1)");
  }
  Prior p;
  p.kind_ = PriorKind::polynomial_tail;
  p.s_ = s;
  p.q_ = q;
  p.truncation_ = truncation;

  const std::size_t n = static_cast<std::size_t>(truncation) + 1;
  p.poly_pmf_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    p.poly_pmf_[k] = std::pow(static_cast<double>(k + 1), -(1.0 + s));
  }
  // Normalize smallest-first so the total carries full precision.
  double total = 0.0;
  for (std::size_t k = n; k-- > 0;) total += p.poly_pmf_[k];
  const double scale = (1.0 - q) / total;
  for (auto& w : p.poly_pmf_) w *= scale;

  // Suffix sums accumulated back to front keep survival() consistent with
  // pmf() to within rounding: survival(n) - survival(n+1) == pmf(n).
  p.poly_survival_.assign(n + 1, 0.0);
  for (std::size_t k = n; k-- > 0;) {
    p.poly_survival_[k] = p.poly_survival_[k + 1] + p.poly_pmf_[k];
  }
  p.poly_cdf_.resize(n);
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    acc += p.poly_pmf_[k];
    p.poly_cdf_[k] = acc;
  }
  return p;
}

double Prior::pmf(std::int64_t k) const {
  if (k < 0) return 0.0;
  if (kind_ == PriorKind::geometric) {
    return (1.0 - q_) * rho_ * std::pow(1.0 - rho_, static_cast<double>(k));
  }
  if (k > truncation_) return 0.0;
  return poly_pmf_[static_cast<std::size_t>(k)];
}

double Prior::log_pmf(std::int64_t k) const {
  if (k < 0) return kNegInf;
  if (kind_ == PriorKind::geometric) {
    if (rho_ == 1.0) return k == 0 ? std::log1p(-q_) : kNegInf;
    return std::log1p(-q_) + std::log(rho_) +
           static_cast<double>(k) * std::log1p(-rho_);
  }
  if (k > truncation_) return kNegInf;
  return std::log(poly_pmf_[static_cast<std::size_t>(k)]);
}

double Prior::survival(std::int64_t n) const {
  if (n <= 0) return 1.0 - q_;
  if (kind_ == PriorKind::geometric) {
    return (1.0 - q_) * std::pow(1.0 - rho_, static_cast<double>(n));
  }
  if (n > truncation_) return 0.0;
  return poly_survival_[static_cast<std::size_t>(n)];
}

double Prior::log_survival(std::int64_t n) const {
  if (n <= 0) return std::log1p(-q_);
  if (kind_ == PriorKind::geometric) {
    if (rho_ == 1.0) return kNegInf;
    return std::log1p(-q_) + static_cast<double>(n) * std::log1p(-rho_);
  }
  const double sv = survival(n);
  return sv > 0.0 ? std::log(sv) : kNegInf;
}

double Prior::tail_exponent() const {
  if (kind_ == PriorKind::geometric) {
    return -std::log1p(-rho_);  // +inf for the point mass rho = 1
  }
  return 0.0;
}

double Prior::mean_changepoint() const {
  if (kind_ == PriorKind::geometric) {
    return (1.0 - q_) * (1.0 - rho_) / rho_;
  }
  double mean = 0.0;
  for (std::int64_t k = truncation_; k >= 1; --k) {
    mean += static_cast<double>(k) * poly_pmf_[static_cast<std::size_t>(k)];
  }
  return mean;
}

std::int64_t Prior::sample_changepoint(Rng& rng) const {
  const double u = rng.uniform();
  if (u < q_) return -1;
  if (kind_ == PriorKind::geometric) {
    if (rho_ == 1.0) return 0;
    const double v = (u - q_) / (1.0 - q_);  // uniform in [0,1)
    const double k = std::floor(std::log1p(-v) / std::log1p(-rho_));
    return static_cast<std::int64_t>(k);
  }
  // poly_cdf_ accumulates to 1-q, the same scale as u - q.
  auto it = std::upper_bound(poly_cdf_.begin(), poly_cdf_.end(), u - q_);
  if (it == poly_cdf_.end()) return truncation_;
  return static_cast<std::int64_t>(it - poly_cdf_.begin());
}

ConditionCReport Prior::check_condition_c(double r) const {
  if (!(r >= 1.0)) {
    throw std::invalid_argument("condition check requires r >= 1");
  }
  ConditionCReport report;
  report.mu = tail_exponent();
  if (report.mu > 0.0) {
    // Exponential tail: the log-moment condition holds automatically.
    report.satisfied = true;
    return report;
  }
  double sum = 0.0;
  for (std::int64_t k = 0; k <= truncation_; ++k) {
    const double pk = poly_pmf_[static_cast<std::size_t>(k)];
    if (pk > 0.0) sum += pk * std::pow(std::fabs(std::log(pk)), r);
  }
  report.log_moment_sum = sum;
  report.satisfied = std::isfinite(sum);
  return report;
}

}  // namespace seqdet
