#include "seqdet/detector.hpp"

#include <cmath>
#include <stdexcept>

#include "seqdet/errors.hpp"
#include "seqdet/numeric.hpp"

namespace seqdet {

const char* procedure_name(Procedure p) {
  return p == Procedure::shiryaev ? "shiryaev" : "shiryaev-roberts";
}

namespace {

// The stopping comparison is inclusive (statistic >= threshold). Carried in
// logs, an exactly-attained threshold (R_n = n meeting an integer B) can land
// one ulp short after n log/exp round trips, so the comparison concedes one
// part in 1e12 of the threshold. That is orders of magnitude below the 1e-9
// value accuracy certified for the statistics.
constexpr double kStopSlack = 1e-12;

bool crossed(const DetectorState& state) {
  return state.log_stat >= state.log_threshold - kStopSlack;
}

}  // namespace

double DetectorState::statistic() const { return std::exp(log_stat); }
double DetectorState::threshold() const { return std::exp(log_threshold); }

DetectorState make_shiryaev_state(const Prior& prior, double threshold) {
  const double q = prior.q();
  if (!(threshold > q / (1.0 - q))) {
    throw InvalidBudgetError(
        "shiryaev threshold must exceed the prior odds q/(1-q)");
  }
  DetectorState state;
  state.procedure = Procedure::shiryaev;
  state.log_stat = q > 0.0 ? std::log(q) - std::log1p(-q) : kNegInf;
  state.log_threshold = std::log(threshold);
  return state;
}

DetectorState make_sr_state(double threshold) {
  if (!(threshold > 0.0)) {
    throw InvalidBudgetError("shiryaev-roberts threshold must be positive");
  }
  DetectorState state;
  state.procedure = Procedure::shiryaev_roberts;
  state.log_stat = kNegInf;  // R_0 = 0
  state.log_threshold = std::log(threshold);
  return state;
}

DetectorState& shiryaev_update(DetectorState& state, double log_lr,
                               const Prior& prior) {
  const std::int64_t n = static_cast<std::int64_t>(state.n) + 1;
  const double log_surv_n = prior.log_survival(n);
  if (log_surv_n == kNegInf) {
    throw DegeneratePriorError(
        "prior survival vanished at n = " + std::to_string(n) +
        "; the Shiryaev statistic is undefined past the prior's support");
  }
  const double log_prev_mass = prior.log_survival(n - 1) + state.log_stat;
  state.log_stat =
      log_add_exp(log_prev_mass, prior.log_pmf(n - 1)) + log_lr - log_surv_n;
  state.n = static_cast<std::uint64_t>(n);
  if (crossed(state)) state.stopped = true;
  return state;
}

DetectorState& sr_update(DetectorState& state, double log_lr) {
  state.log_stat = log_add_exp(0.0, state.log_stat) + log_lr;
  ++state.n;
  if (crossed(state)) state.stopped = true;
  return state;
}

double posterior(double log_lambda) { return logistic(log_lambda); }

double shiryaev_threshold(double alpha, const Prior& prior) {
  const double q = prior.q();
  if (!(alpha > 0.0) || !(alpha < 1.0 - q)) {
    throw InvalidBudgetError("shiryaev calibration requires 0 < alpha < 1 - q");
  }
  const double a = (1.0 - alpha) / alpha;
  if (!(a > q / (1.0 - q))) {
    throw InvalidBudgetError("calibrated threshold does not exceed q/(1-q)");
  }
  return a;
}

double sr_threshold(double alpha, const Prior& prior) {
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw InvalidBudgetError("sr calibration requires alpha in (0, 1)");
  }
  const double mean = prior.mean_changepoint();
  if (!(mean > 0.0) || !std::isfinite(mean)) {
    throw InvalidBudgetError(
        "sr calibration requires a positive finite mean change point");
  }
  return mean / alpha;
}

std::optional<std::uint64_t> run_detector(Procedure procedure,
                                          const Prior& prior,
                                          std::span<const double> log_lrs,
                                          double threshold,
                                          std::uint64_t horizon) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  DetectorState state = procedure == Procedure::shiryaev
                            ? make_shiryaev_state(prior, threshold)
                            : make_sr_state(threshold);
  const std::uint64_t steps =
      std::min<std::uint64_t>(horizon, log_lrs.size());
  for (std::uint64_t i = 0; i < steps; ++i) {
    if (procedure == Procedure::shiryaev) {
      shiryaev_update(state, log_lrs[i], prior);
    } else {
      sr_update(state, log_lrs[i]);
    }
    if (state.stopped) return state.n;
  }
  return std::nullopt;
}

}  // namespace seqdet
