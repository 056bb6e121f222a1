#include "seqdet/asymptotics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "seqdet/errors.hpp"
#include "seqdet/rng.hpp"

namespace seqdet {

double shiryaev_theoretical_moment(double alpha, double information_rate,
                                   double mu, double m) {
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw std::invalid_argument("alpha must lie in (0, 1)");
  }
  if (!(information_rate > 0.0) || !(mu >= 0.0) || !(m > 0.0)) {
    throw std::invalid_argument("require I > 0, mu >= 0, m > 0");
  }
  return std::pow(-std::log(alpha) / (information_rate + mu), m);
}

double sr_theoretical_moment(double threshold_b, double information_rate,
                             double m) {
  if (!(threshold_b > 1.0)) {
    throw std::invalid_argument("require B > 1");
  }
  if (!(information_rate > 0.0) || !(m > 0.0)) {
    throw std::invalid_argument("require I > 0, m > 0");
  }
  return std::pow(std::log(threshold_b) / information_rate, m);
}

double efficiency_ratio(double information_rate, double mu, double m) {
  if (!(information_rate > 0.0) || !(mu >= 0.0) || !(m > 0.0)) {
    throw std::invalid_argument("require I > 0, mu >= 0, m > 0");
  }
  return std::pow(information_rate / (information_rate + mu), m);
}

double RhoSchedule::rho_at(double alpha) const {
  if (!(c > 0.0) || !(p > 0.0) || p > 1.0) {
    throw std::invalid_argument("rho schedule requires c > 0 and p in (0, 1]");
  }
  const double rho = c / std::pow(-std::log(alpha), p);
  if (!(rho > 0.0) || !(rho < 1.0)) {
    throw InvalidBudgetError("rho schedule leaves (0, 1) at alpha = " +
                             std::to_string(alpha));
  }
  return rho;
}

namespace {

void validate_spec(const StudySpec& spec) {
  if (spec.model == nullptr) {
    throw std::invalid_argument("study spec needs a model");
  }
  if (spec.procedures.empty()) {
    throw std::invalid_argument("study spec needs at least one procedure");
  }
  if (spec.alpha_grid.empty()) {
    throw std::invalid_argument("study spec needs an alpha grid");
  }
  for (std::size_t i = 1; i < spec.alpha_grid.size(); ++i) {
    if (!(spec.alpha_grid[i] < spec.alpha_grid[i - 1])) {
      throw std::invalid_argument("alpha grid must be strictly decreasing");
    }
  }
  if (spec.moments.empty()) {
    throw std::invalid_argument("study spec needs a nonempty moment list");
  }
  if (spec.rho_schedule && spec.prior.kind() != PriorKind::geometric) {
    throw std::invalid_argument("rho schedules apply to geometric priors only");
  }
  if (!(spec.r >= 1.0)) {
    throw std::invalid_argument("convergence order r must be >= 1");
  }
}

}  // namespace

StudyReport run_study(const StudySpec& spec) {
  validate_spec(spec);
  StudyReport report;
  report.scheduled = spec.rho_schedule.has_value();
  const double rate = spec.model->information_rate();
  report.information_rate = rate;

  for (double alpha : spec.alpha_grid) {
    const Prior prior =
        spec.rho_schedule
            ? Prior::geometric(spec.rho_schedule->rho_at(alpha),
                               spec.prior.q())
            : spec.prior;
    const double mu = prior.tail_exponent();

    for (Procedure procedure : spec.procedures) {
      try {
        const double threshold = procedure == Procedure::shiryaev
                                     ? shiryaev_threshold(alpha, prior)
                                     : sr_threshold(alpha, prior);
        MCOptions options;
        options.trials = spec.trials;
        options.horizon = spec.horizon;
        options.seed = spec.seed;
        options.workers = spec.workers;
        options.stream =
            stream_label(0xa11, alpha, static_cast<std::uint64_t>(procedure));

        const MCEstimate pfa = estimate_pfa(procedure, *spec.model, prior,
                                            threshold, options);
        const auto delays = estimate_delay_moments(
            procedure, *spec.model, prior, threshold, spec.moments, options);

        for (std::size_t j = 0; j < spec.moments.size(); ++j) {
          StudyRow row;
          row.alpha = alpha;
          row.procedure = procedure;
          row.m = spec.moments[j];
          row.threshold = threshold;
          row.pfa_hat = pfa.value;
          row.pfa_se = pfa.stderror;
          row.delay_hat = delays[j].value;
          row.delay_se = delays[j].stderror;
          if (procedure == Procedure::shiryaev_roberts) {
            row.theory = sr_theoretical_moment(threshold, rate, row.m);
          } else if (report.scheduled) {
            row.theory = shiryaev_theoretical_moment(alpha, rate, 0.0, row.m);
          } else {
            row.theory = shiryaev_theoretical_moment(alpha, rate, mu, row.m);
          }
          row.ratio = row.delay_hat / row.theory;
          row.seed = spec.seed;
          row.trials = spec.trials;
          row.censored = delays[j].censored;
          row.mu = mu;
          report.rows.push_back(row);
        }
      } catch (const CensoringExceededError& e) {
        throw CensoringExceededError("grid point alpha = " +
                                     std::to_string(alpha) + " (" +
                                     procedure_name(procedure) +
                                     "): " + e.what());
      } catch (const NoSurvivorsError& e) {
        throw NoSurvivorsError("grid point alpha = " + std::to_string(alpha) +
                               " (" + procedure_name(procedure) +
                               "): " + e.what());
      } catch (const InvalidBudgetError& e) {
        throw InvalidBudgetError("grid point alpha = " + std::to_string(alpha) +
                                 " (" + procedure_name(procedure) +
                                 "): " + e.what());
      }
    }
  }
  return report;
}

SlopeFit probe_pfa_exponent(const ScenarioModel& model, const Prior& prior,
                            std::span<const double> b_grid,
                            const MCOptions& options) {
  if (b_grid.size() < 3) {
    throw std::invalid_argument("exponent probe needs >= 3 thresholds");
  }
  double lo = b_grid[0], hi = b_grid[0];
  for (double b : b_grid) {
    if (!(b > 1.0)) throw std::invalid_argument("thresholds must exceed 1");
    lo = std::min(lo, b);
    hi = std::max(hi, b);
  }
  if (hi / lo < 100.0) {
    throw std::invalid_argument(
        "exponent probe needs thresholds spanning >= 2 decades");
  }

  SlopeFit fit;
  std::vector<double> y_se;
  for (double b : b_grid) {
    const MCEstimate pfa = estimate_pfa(Procedure::shiryaev_roberts, model,
                                        prior, b, options);
    if (!(pfa.value > 0.0)) {
      throw DegenerateFitError("PFA estimate vanished at B = " +
                               std::to_string(b) +
                               "; log-log fit undefined");
    }
    fit.log_threshold.push_back(std::log(b));
    fit.log_pfa.push_back(std::log(pfa.value));
    y_se.push_back(pfa.stderror / pfa.value);  // delta method on log
  }

  const std::size_t n = fit.log_threshold.size();
  double x_mean = 0.0;
  for (double x : fit.log_threshold) x_mean += x;
  x_mean /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = fit.log_threshold[i] - x_mean;
    sxx += dx * dx;
    sxy += dx * fit.log_pfa[i];
  }
  fit.slope = sxy / sxx;
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = (fit.log_threshold[i] - x_mean) / sxx;
    var += w * w * y_se[i] * y_se[i];
  }
  fit.slope_se = std::sqrt(var);
  return fit;
}

}  // namespace seqdet
