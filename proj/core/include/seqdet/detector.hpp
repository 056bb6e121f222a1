#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "seqdet/prior.hpp"

namespace seqdet {

enum class Procedure { shiryaev, shiryaev_roberts };

const char* procedure_name(Procedure p);

/// Running state of one detection statistic, carried in the log domain.
/// log_stat holds log(Lambda_n) for the Shiryaev procedure or log(R_n) for
/// Shiryaev-Roberts; -inf encodes an exact zero (Lambda_0 with q = 0, R_0).
/// `stopped` latches at the first n >= 1 with statistic >= threshold.
struct DetectorState {
  Procedure procedure = Procedure::shiryaev;
  std::uint64_t n = 0;
  double log_stat = 0.0;
  double log_threshold = 0.0;
  bool stopped = false;

  double statistic() const;  // exp(log_stat)
  double threshold() const;  // exp(log_threshold)
};

/// Fresh Shiryaev state: Lambda_0 = q/(1-q). Requires threshold > q/(1-q),
/// otherwise the procedure would stop at time zero with probability one.
DetectorState make_shiryaev_state(const Prior& prior, double threshold);

/// Fresh Shiryaev-Roberts state: R_0 = 0.
DetectorState make_sr_state(double threshold);

/// One step of the Shiryaev recursion,
///   Lambda_n = [P(nu >= n-1) Lambda_{n-1} + pi_{n-1}] L_n / P(nu >= n),
/// evaluated as a stable two-term log-sum. Throws DegeneratePriorError when
/// P(nu >= n) = 0 (exhausted truncated prior).
DetectorState& shiryaev_update(DetectorState& state, double log_lr,
                               const Prior& prior);

/// One step of the Shiryaev-Roberts recursion R_n = (1 + R_{n-1}) L_n.
DetectorState& sr_update(DetectorState& state, double log_lr);

/// Posterior probability g_n of a change in effect by time n, from
/// log(Lambda_n): g = Lambda/(1+Lambda), stable for any magnitude.
double posterior(double log_lambda);

/// A = (1-alpha)/alpha; guarantees PFA(T_A) <= alpha. Requires
/// 0 < alpha < 1 - q (equivalently A > q/(1-q)).
double shiryaev_threshold(double alpha, const Prior& prior);

/// B = nu_bar/alpha; guarantees PFA(T_B) <= alpha. Requires alpha in (0,1)
/// and a prior with positive finite mean change point.
double sr_threshold(double alpha, const Prior& prior);

/// Runs the chosen procedure over a materialized log-likelihood-ratio
/// stream: returns the first n in [1, horizon] with statistic >= threshold
/// (inclusive; the log-domain comparison concedes one part in 1e12 of the
/// threshold so exactly-attained crossings are never missed to rounding),
/// or nullopt when censored at the horizon.
std::optional<std::uint64_t> run_detector(Procedure procedure,
                                          const Prior& prior,
                                          std::span<const double> log_lrs,
                                          double threshold,
                                          std::uint64_t horizon);

}  // namespace seqdet
