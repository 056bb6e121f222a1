#include "seqdet/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "seqdet/errors.hpp"
#include "seqdet/rng.hpp"

namespace seqdet {

namespace {

// Stream-label tags keeping the estimators' substreams disjoint.
namespace purpose {
constexpr std::uint64_t pfa_survival = 0x5u;
constexpr std::uint64_t pfa_naive = 0x6u;
constexpr std::uint64_t delay = 0x7u;
constexpr std::uint64_t deviation = 0x8u;
constexpr std::uint64_t upsilon = 0x9u;
}  // namespace purpose

// Runs body(trial_index) for every index. Workers pull chunks from an
// atomic cursor; each trial writes only state owned by its index, so the
// schedule never affects results. The first worker exception is rethrown.
void for_each_trial(std::uint64_t trials, int workers,
                    const std::function<void(std::uint64_t)>& body) {
  workers = std::max(workers, 1);
  if (workers == 1 || trials < 2) {
    for (std::uint64_t i = 0; i < trials; ++i) body(i);
    return;
  }
  std::atomic<std::uint64_t> cursor{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto drain = [&] {
    constexpr std::uint64_t chunk = 64;
    try {
      while (!failed.load(std::memory_order_relaxed)) {
        const std::uint64_t start = cursor.fetch_add(chunk);
        if (start >= trials) break;
        const std::uint64_t stop = std::min(trials, start + chunk);
        for (std::uint64_t i = start; i < stop; ++i) body(i);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
      failed.store(true, std::memory_order_relaxed);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(drain);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// Mean and standard error reduced in trial-index order.
std::pair<double, double> mean_and_stderr(std::span<const double> values) {
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : values) {
    const double d = v - mean;
    ss += d * d;
  }
  const double var = values.size() > 1 ? ss / (n - 1.0) : 0.0;
  return {mean, std::sqrt(var / n)};
}

struct StoppedTrial {
  std::optional<std::uint64_t> stopping_time;
};

// Streams one simulated path through the chosen statistic until it stops or
// `max_steps` samples are spent.
StoppedTrial run_one(Procedure procedure, const ScenarioModel& model,
                     const Prior& prior, double threshold,
                     std::int64_t changepoint, std::uint64_t max_steps,
                     Rng& rng) {
  DetectorState state = procedure == Procedure::shiryaev
                            ? make_shiryaev_state(prior, threshold)
                            : make_sr_state(threshold);
  auto sampler = model.make_sampler(changepoint);
  auto llr = model.make_llr_stream();
  for (std::uint64_t i = 0; i < max_steps; ++i) {
    const double z = llr->push(sampler->next(rng));
    if (procedure == Procedure::shiryaev) {
      shiryaev_update(state, z, prior);
    } else {
      sr_update(state, z);
    }
    if (state.stopped) return {state.n};
  }
  return {std::nullopt};
}

}  // namespace

std::uint64_t default_horizon(double threshold, double information_rate) {
  if (!(information_rate > 0.0)) {
    throw std::invalid_argument(
        "automatic horizon needs a positive information rate; set the "
        "horizon explicitly for this model");
  }
  const double log_threshold = std::max(std::log(threshold), 0.0);
  return static_cast<std::uint64_t>(
             std::ceil(20.0 * log_threshold / information_rate)) +
         100;
}

MCEstimate estimate_pfa(Procedure procedure, const ScenarioModel& model,
                        const Prior& prior, double threshold,
                        const MCOptions& options, PfaEstimator mode) {
  if (options.trials < 1) throw std::invalid_argument("trials must be >= 1");
  const std::uint64_t horizon =
      options.horizon ? options.horizon
                      : default_horizon(threshold, model.information_rate());
  const std::uint64_t label = stream_label(
      mode == PfaEstimator::survival_identity ? purpose::pfa_survival
                                              : purpose::pfa_naive,
      threshold, options.stream);

  std::vector<double> values(options.trials, 0.0);
  std::vector<unsigned char> censored_flags(options.trials, 0);

  if (mode == PfaEstimator::survival_identity) {
    const double censored_value = prior.survival(static_cast<std::int64_t>(horizon));
    for_each_trial(options.trials, options.workers, [&](std::uint64_t t) {
      Rng rng = derive_rng(options.seed, label, t);
      const StoppedTrial run =
          run_one(procedure, model, prior, threshold, kNoChange, horizon, rng);
      if (run.stopping_time) {
        values[t] =
            prior.survival(static_cast<std::int64_t>(*run.stopping_time));
      } else {
        values[t] = censored_value;
        censored_flags[t] = 1;
      }
    });
  } else {
    for_each_trial(options.trials, options.workers, [&](std::uint64_t t) {
      Rng rng = derive_rng(options.seed, label, t);
      const std::int64_t nu = prior.sample_changepoint(rng);
      if (nu < 1) {
        values[t] = 0.0;  // T >= 1 > nu: no false alarm possible
        return;
      }
      // only the pre-change segment can decide {T <= nu}
      const std::uint64_t steps =
          std::min<std::uint64_t>(static_cast<std::uint64_t>(nu), horizon);
      const StoppedTrial run =
          run_one(procedure, model, prior, threshold, nu, steps, rng);
      if (run.stopping_time) {
        values[t] = 1.0;
      } else if (static_cast<std::uint64_t>(nu) > horizon) {
        censored_flags[t] = 1;  // unresolved: nu lies beyond the horizon
      }
    });
  }

  MCEstimate estimate;
  estimate.trials = options.trials;
  for (auto flag : censored_flags) estimate.censored += flag;
  if (mode == PfaEstimator::naive &&
      static_cast<double>(estimate.censored) >
          options.max_censored_fraction * static_cast<double>(options.trials)) {
    throw CensoringExceededError(
        "naive PFA estimator left " + std::to_string(estimate.censored) +
        " of " + std::to_string(options.trials) + " trials unresolved");
  }
  const auto [mean, se] = mean_and_stderr(values);
  estimate.value = mean;
  estimate.stderror = se;
  return estimate;
}

std::vector<TrialResult> run_delay_trials(
    Procedure procedure, const ScenarioModel& model, const Prior& prior,
    double threshold, std::optional<std::int64_t> pinned_nu,
    const MCOptions& options) {
  if (options.trials < 1) throw std::invalid_argument("trials must be >= 1");
  const std::uint64_t budget =
      options.horizon ? options.horizon
                      : default_horizon(threshold, model.information_rate());
  std::uint64_t extra = pinned_nu
                            ? 0x9e3779b97f4a7c15ULL +
                                  static_cast<std::uint64_t>(*pinned_nu + 1)
                            : 0;
  const std::uint64_t label =
      stream_label(purpose::delay, threshold, options.stream ^ extra);

  std::vector<TrialResult> results(options.trials);
  for_each_trial(options.trials, options.workers, [&](std::uint64_t t) {
    Rng rng = derive_rng(options.seed, label, t);
    TrialResult& out = results[t];
    out.nu = pinned_nu ? *pinned_nu : prior.sample_changepoint(rng);
    const std::uint64_t pre_steps =
        out.nu > 0 ? static_cast<std::uint64_t>(out.nu) : 0;
    const StoppedTrial run = run_one(procedure, model, prior, threshold,
                                     out.nu, pre_steps + budget, rng);
    out.stopping_time = run.stopping_time;
    if (!run.stopping_time) return;  // censored
    const std::uint64_t stop = *run.stopping_time;
    if (out.nu >= 1 && stop <= static_cast<std::uint64_t>(out.nu)) {
      out.false_alarm = true;
    } else {
      out.delay = stop - pre_steps;
    }
  });
  return results;
}

namespace {

std::vector<MCEstimate> moments_from_trials(
    const std::vector<TrialResult>& trials, std::span<const double> moments,
    double max_censored_fraction) {
  std::uint64_t censored = 0;
  std::vector<double> delays;
  delays.reserve(trials.size());
  for (const auto& trial : trials) {
    if (!trial.stopping_time) {
      ++censored;
    } else if (!trial.false_alarm) {
      delays.push_back(static_cast<double>(trial.delay));
    }
  }
  if (static_cast<double>(censored) >
      max_censored_fraction * static_cast<double>(trials.size())) {
    throw CensoringExceededError(
        std::to_string(censored) + " of " + std::to_string(trials.size()) +
        " delay trials censored at the horizon (policy allows " +
        std::to_string(max_censored_fraction * 100.0) + "%)");
  }
  if (delays.empty()) {
    throw NoSurvivorsError("every trial ended in a false alarm");
  }

  std::vector<MCEstimate> estimates;
  estimates.reserve(moments.size());
  std::vector<double> powered(delays.size());
  for (double m : moments) {
    if (!(m >= 1.0)) throw std::invalid_argument("moment orders must be >= 1");
    for (std::size_t i = 0; i < delays.size(); ++i) {
      powered[i] = std::pow(delays[i], m);
    }
    const auto [mean, se] = mean_and_stderr(powered);
    MCEstimate est;
    est.value = mean;
    est.stderror = se;
    est.trials = trials.size();
    est.censored = censored;
    estimates.push_back(est);
  }
  return estimates;
}

}  // namespace

std::vector<MCEstimate> estimate_delay_moments(
    Procedure procedure, const ScenarioModel& model, const Prior& prior,
    double threshold, std::span<const double> moments,
    const MCOptions& options) {
  const auto trials = run_delay_trials(procedure, model, prior, threshold,
                                       std::nullopt, options);
  auto estimates =
      moments_from_trials(trials, moments, options.max_censored_fraction);
  // Jensen consistency on the shared sample: E[d^m2] >= E[d^m1]^(m2/m1)
  // holds for any empirical measure, so a violation means a broken reduction.
  for (std::size_t a = 0; a < moments.size(); ++a) {
    for (std::size_t b = 0; b < moments.size(); ++b) {
      if (moments[a] < moments[b] &&
          std::pow(estimates[a].value, moments[b] / moments[a]) >
              estimates[b].value * (1.0 + 1e-9)) {
        throw std::logic_error("delay moment estimates violate Jensen");
      }
    }
  }
  return estimates;
}

MCEstimate estimate_conditional_delay(Procedure procedure,
                                      const ScenarioModel& model,
                                      const Prior& prior, double threshold,
                                      std::int64_t fixed_changepoint,
                                      double moment,
                                      const MCOptions& options) {
  if (fixed_changepoint < 0) {
    throw std::invalid_argument("conditional delay requires k >= 0");
  }
  const auto trials = run_delay_trials(procedure, model, prior, threshold,
                                       fixed_changepoint, options);
  const double moments[] = {moment};
  return moments_from_trials(trials, moments,
                             options.max_censored_fraction)[0];
}

MCEstimate estimate_llr_deviation(const ScenarioModel& model, std::int64_t k,
                                  std::uint64_t n, double epsilon,
                                  const MCOptions& options) {
  if (k < 0) throw std::invalid_argument("deviation probe requires k >= 0");
  if (n < 1) throw std::invalid_argument("deviation probe requires n >= 1");
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("deviation probe requires epsilon > 0");
  }
  const double rate = model.information_rate();
  std::uint64_t tag = static_cast<std::uint64_t>(k);
  const std::uint64_t label = stream_label(
      purpose::deviation, epsilon, options.stream ^ splitmix64(tag) ^ n);

  std::vector<double> hits(options.trials, 0.0);
  for_each_trial(options.trials, options.workers, [&](std::uint64_t t) {
    Rng rng = derive_rng(options.seed, label, t);
    auto sampler = model.make_sampler(k);
    auto llr = model.make_llr_stream();
    double lambda = 0.0;
    const std::uint64_t total = static_cast<std::uint64_t>(k) + n;
    for (std::uint64_t i = 1; i <= total; ++i) {
      const double z = llr->push(sampler->next(rng));
      if (i > static_cast<std::uint64_t>(k)) lambda += z;
    }
    hits[t] =
        std::fabs(lambda / static_cast<double>(n) - rate) > epsilon ? 1.0 : 0.0;
  });

  const auto [mean, se] = mean_and_stderr(hits);
  return {mean, se, options.trials, 0};
}

UpsilonReport estimate_upsilon_partial(const ScenarioModel& model,
                                       std::int64_t k, double r,
                                       double epsilon, std::uint64_t n_max,
                                       const MCOptions& options,
                                       double tail_fraction) {
  if (k < 0) throw std::invalid_argument("upsilon probe requires k >= 0");
  if (!(r >= 1.0)) throw std::invalid_argument("upsilon probe requires r >= 1");
  if (n_max < 2) throw std::invalid_argument("upsilon probe requires n_max >= 2");
  const double rate = model.information_rate();

  // The series is probed on the geometric grid {2, 4, 8, ..., n_max} only;
  // that bounds the cost while preserving what matters, whether the term
  // sequence n^{r-1} P(n) has died off.
  std::vector<std::uint64_t> grid;
  for (std::uint64_t n = 2; n < n_max; n *= 2) grid.push_back(n);
  grid.push_back(n_max);

  // Hit counts per grid point, accumulated worker-locally over static trial
  // ranges and merged as integers, so results never depend on scheduling.
  const int workers = std::max(options.workers, 1);
  std::vector<std::vector<std::uint64_t>> local_counts(
      static_cast<std::size_t>(workers),
      std::vector<std::uint64_t>(grid.size(), 0));
  std::uint64_t tag = static_cast<std::uint64_t>(k);
  const std::uint64_t label = stream_label(
      purpose::upsilon, epsilon, options.stream ^ splitmix64(tag) ^ n_max);

  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  auto span_worker = [&](int w) {
    try {
      const std::uint64_t lo = options.trials * static_cast<std::uint64_t>(w) /
                               static_cast<std::uint64_t>(workers);
      const std::uint64_t hi =
          options.trials * (static_cast<std::uint64_t>(w) + 1) /
          static_cast<std::uint64_t>(workers);
      auto& counts = local_counts[static_cast<std::size_t>(w)];
      for (std::uint64_t t = lo; t < hi; ++t) {
        Rng rng = derive_rng(options.seed, label, t);
        auto sampler = model.make_sampler(k);
        auto llr = model.make_llr_stream();
        for (std::int64_t i = 1; i <= k; ++i) {
          llr->push(sampler->next(rng));
        }
        double lambda = 0.0;
        std::size_t next = 0;
        for (std::uint64_t n = 1; n <= n_max && next < grid.size(); ++n) {
          lambda += llr->push(sampler->next(rng));
          if (n == grid[next]) {
            if (lambda / static_cast<double>(n) < rate - epsilon) {
              ++counts[next];
            }
            ++next;
          }
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  };
  if (workers == 1) {
    span_worker(0);
  } else {
    for (int w = 0; w < workers; ++w) pool.emplace_back(span_worker, w);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  UpsilonReport report;
  report.tail_fraction = tail_fraction;
  report.grid = grid;
  double running = 0.0;
  double last_term = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    std::uint64_t hits = 0;
    for (const auto& local : local_counts) hits += local[j];
    const double phat =
        static_cast<double>(hits) / static_cast<double>(options.trials);
    last_term = std::pow(static_cast<double>(grid[j]), r - 1.0) * phat;
    running += last_term;
    report.partial_sums.push_back(running);
  }
  report.tail_flag = last_term <= tail_fraction * running;
  return report;
}

}  // namespace seqdet
