#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "seqdet/montecarlo.hpp"

namespace seqdet {

/// First-order Shiryaev delay-moment prediction (|log alpha| / (I + mu))^m.
double shiryaev_theoretical_moment(double alpha, double information_rate,
                                   double mu, double m);

/// First-order Shiryaev-Roberts delay-moment prediction (log B / I)^m.
double sr_theoretical_moment(double threshold_b, double information_rate,
                             double m);

/// First-order Shiryaev-vs-SR delay ratio at matched |log alpha| budgets:
/// (I / (I + mu))^m in (0, 1]; equals 1 exactly for heavy-tailed priors.
double efficiency_ratio(double information_rate, double mu, double m);

/// Prior schedule rho(alpha) = c / |log alpha|^p with p in (0, 1], c > 0.
/// Every member of this family flattens slowly enough that the mu-free
/// delay approximation applies along the grid.
struct RhoSchedule {
  double c = 1.0;
  double p = 1.0;
  double rho_at(double alpha) const;
};

struct StudySpec {
  const ScenarioModel* model = nullptr;
  Prior prior = Prior::geometric(0.5);
  std::optional<RhoSchedule> rho_schedule;  ///< geometric priors only
  std::vector<Procedure> procedures;
  std::vector<double> alpha_grid;  ///< strictly decreasing in (0, 1-q)
  std::vector<double> moments;
  double r = 2.0;  ///< convergence order quoted in diagnostics output
  std::uint64_t trials = 10000;
  std::uint64_t horizon = 0;
  std::uint64_t seed = 1;
  int workers = 1;
};

struct StudyRow {
  double alpha = 0.0;
  Procedure procedure = Procedure::shiryaev;
  double m = 1.0;
  double threshold = 0.0;
  double pfa_hat = 0.0;
  double pfa_se = 0.0;
  double delay_hat = 0.0;
  double delay_se = 0.0;
  double theory = 0.0;
  double ratio = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;
  std::uint64_t censored = 0;
  double mu = 0.0;  ///< tail exponent in force at this grid point
};

struct StudyReport {
  std::vector<StudyRow> rows;
  bool scheduled = false;  ///< a rho(alpha) schedule was active
  double information_rate = 0.0;
};

/// Calibrates thresholds per grid point, runs the Monte Carlo estimators,
/// and attaches the first-order predictions and ratios. With a rho(alpha)
/// schedule the prior (and its mu, nu_bar) is recomputed per point and the
/// mu-free prediction is used. Errors from a grid point are rethrown with
/// the offending alpha in the message.
StudyReport run_study(const StudySpec& spec);

struct SlopeFit {
  double slope = 0.0;
  double slope_se = 0.0;
  std::vector<double> log_threshold;
  std::vector<double> log_pfa;
};

/// Least-squares slope of log(PFA-hat) against log(B) for the SR procedure
/// over a threshold grid (>= 3 points spanning >= 2 decades). Report-only;
/// throws DegenerateFitError if any PFA estimate is exactly zero.
SlopeFit probe_pfa_exponent(const ScenarioModel& model, const Prior& prior,
                            std::span<const double> b_grid,
                            const MCOptions& options);

}  // namespace seqdet
