#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "seqdet/detector.hpp"
#include "seqdet/model.hpp"
#include "seqdet/prior.hpp"

namespace seqdet {

/// Shared knobs for every estimator. All randomness flows from `seed`:
/// per-trial generators are derived from (seed, estimator stream label,
/// trial index) only, so identical options give bit-identical estimates for
/// any worker count.
struct MCOptions {
  std::uint64_t trials = 10000;
  std::uint64_t horizon = 0;  ///< post-change step budget; 0 = policy default
  std::uint64_t seed = 1;
  int workers = 1;
  std::uint64_t stream = 0;  ///< extra label component (grid-point identity)
  double max_censored_fraction = 0.01;
};

/// Outcome of one simulated path.
struct TrialResult {
  std::int64_t nu = 0;
  std::optional<std::uint64_t> stopping_time;  ///< nullopt when censored
  bool false_alarm = false;                    ///< T <= nu
  std::uint64_t delay = 0;  ///< (T - max(nu,0)) for uncensored survivors
};

struct MCEstimate {
  double value = 0.0;
  double stderror = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t censored = 0;
};

struct UpsilonReport {
  std::vector<std::uint64_t> grid;   ///< probe points {2, 4, ..., n_max}
  std::vector<double> partial_sums;  ///< running sums of n^{r-1} phat(n) over the grid
  bool tail_flag = false;            ///< last term small: series looks summable
  double tail_fraction = 0.0;        ///< threshold used for the flag
};

/// Default simulation horizon: ceil(20 log(threshold) / I) + 100 steps.
/// Detection delays concentrate near log(threshold)/(I + mu), so the factor
/// of 20 keeps delay censoring negligible next to the reported stderr.
std::uint64_t default_horizon(double threshold, double information_rate);

enum class PfaEstimator {
  /// Simulates under the no-change law only and averages P(nu >= T), which
  /// equals PFA because {T <= k} has the same probability under change-at-k
  /// and no-change laws. A trial censored at the horizon contributes
  /// survival(horizon), an upper bound on its true contribution, so the
  /// estimate is conservatively biased up by at most that amount.
  survival_identity,
  /// Samples nu, simulates the changed path, and averages 1{T <= nu}.
  /// Kept as a cross-check; throws CensoringExceededError when more than
  /// max_censored_fraction of trials end unresolved (nu beyond horizon).
  naive,
};

MCEstimate estimate_pfa(Procedure procedure, const ScenarioModel& model,
                        const Prior& prior, double threshold,
                        const MCOptions& options,
                        PfaEstimator mode = PfaEstimator::survival_identity);

/// Simulates delay trials: nu is drawn from the prior (or pinned when
/// `pinned_nu` is set), the detector watches max(nu,0) + horizon samples.
/// nu = -1 is treated as nu = 0 for delay accounting.
std::vector<TrialResult> run_delay_trials(
    Procedure procedure, const ScenarioModel& model, const Prior& prior,
    double threshold, std::optional<std::int64_t> pinned_nu,
    const MCOptions& options);

/// Conditional delay moments E[(T - nu)^m | T > nu], one estimate per
/// requested power, all from one shared trial set. Self-normalized ratio
/// estimator over surviving trials; delta-method standard errors. Throws
/// CensoringExceededError / NoSurvivorsError per the trial policy.
std::vector<MCEstimate> estimate_delay_moments(
    Procedure procedure, const ScenarioModel& model, const Prior& prior,
    double threshold, std::span<const double> moments,
    const MCOptions& options);

/// Same with the change point pinned at k.
MCEstimate estimate_conditional_delay(Procedure procedure,
                                      const ScenarioModel& model,
                                      const Prior& prior, double threshold,
                                      std::int64_t fixed_changepoint,
                                      double moment, const MCOptions& options);

/// P_k(|lambda_{k+n}^k / n - I| > epsilon) by simulation under change at k.
MCEstimate estimate_llr_deviation(const ScenarioModel& model, std::int64_t k,
                                  std::uint64_t n, double epsilon,
                                  const MCOptions& options);

/// Probes the left-deviation series
///   sum_n n^{r-1} P_k(lambda_{k+n}^k / n < I - epsilon)
/// at the geometric grid {2, 4, ..., n_max} and reports the running sums of
/// the probed terms. tail_flag is set when the final term is below
/// tail_fraction of the running sum, i.e. the series looks summable.
UpsilonReport estimate_upsilon_partial(const ScenarioModel& model,
                                       std::int64_t k, double r,
                                       double epsilon, std::uint64_t n_max,
                                       const MCOptions& options,
                                       double tail_fraction = 0.05);

}  // namespace seqdet
