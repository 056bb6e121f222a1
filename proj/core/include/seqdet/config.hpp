#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "seqdet/asymptotics.hpp"
#include "seqdet/model.hpp"
#include "seqdet/prior.hpp"

namespace seqdet {

/// Experiment configs are line-oriented sectioned key = value text:
///
///   # comment
///   [model]
///   variant = iid-gaussian-mean
///   theta = 1.0
///
/// Sections in brackets, one `key = value` per line, `#` starts a comment.
/// Parsing is total: an unknown section or key, a malformed value, or a
/// duplicate key fails with a line diagnostic. Every field below has a
/// default except model.variant and prior.kind.

struct ModelConfig {
  std::string variant;  // required
  // iid-gaussian-mean
  double theta = 1.0;
  double sigma = 1.0;  // shared with ar-signal
  // ar-signal
  std::vector<double> betas = {0.5};
  double signal = 1.0;
  std::string signal_csv;  // one-column table; overrides `signal` when set
  // variance-invariant
  double sigma_pre = 1.0;
  double sigma_post = 2.0;
  double nuisance_mean = 0.0;
  // ar1-correlation
  double beta_pre = 0.5;
  double beta_post = 0.0;
  // constant-llr
  double z = 0.0;
  bool operator==(const ModelConfig&) const = default;
};

struct PriorConfig {
  std::string kind;  // required: geometric | polynomial-tail
  double rho = 0.1;
  double q = 0.0;
  double s = 1.0;
  std::int64_t truncation = 10000;
  std::string schedule = "none";  // none | log-power: rho = c/|log alpha|^p
  double schedule_c = 1.0;
  double schedule_p = 1.0;
  bool operator==(const PriorConfig&) const = default;
};

struct BudgetConfig {
  std::vector<double> alphas;      // strictly decreasing grid in (0,1)
  std::vector<double> thresholds;  // explicit alternative to alphas
  bool operator==(const BudgetConfig&) const = default;
};

struct McConfig {
  std::uint64_t trials = 10000;
  std::uint64_t seed = 1;
  std::uint64_t horizon = 0;  // 0 = automatic policy
  int workers = 1;
  double max_censored = 0.01;
  bool operator==(const McConfig&) const = default;
};

struct StudyConfig {
  std::vector<double> moments = {1.0};
  double r = 2.0;
  bool operator==(const StudyConfig&) const = default;
};

struct VerifyConfig {
  double condition_r = 2.0;
  double epsilon = 0.1;
  std::vector<std::uint64_t> deviation_ns = {100, 200, 400};
  std::uint64_t upsilon_nmax = 1000;
  std::vector<std::int64_t> k_grid = {0, 10};
  std::uint64_t trials = 10000;
  bool operator==(const VerifyConfig&) const = default;
};

struct OutputConfig {
  std::string dir = ".";
  bool operator==(const OutputConfig&) const = default;
};

struct ExperimentConfig {
  ModelConfig model;
  PriorConfig prior;
  std::vector<Procedure> procedures = {Procedure::shiryaev,
                                       Procedure::shiryaev_roberts};
  BudgetConfig budget;
  McConfig mc;
  StudyConfig study;
  VerifyConfig verify;
  OutputConfig output;
  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses config text; throws ConfigError with a line/field diagnostic.
ExperimentConfig parse_config(const std::string& text);

/// Reads and parses a config file.
ExperimentConfig load_config_file(const std::string& path);

/// Canonical text form; parse(serialize(c)) == c.
std::string serialize_config(const ExperimentConfig& config);

/// Instantiates the configured model (loads signal_csv when set).
std::unique_ptr<ScenarioModel> make_model(const ModelConfig& config);

/// Instantiates the configured prior (ignoring any schedule).
Prior make_prior(const PriorConfig& config);

/// The rho(alpha) schedule, when one is configured.
std::optional<RhoSchedule> make_schedule(const PriorConfig& config);

/// Reads a one-column CSV of signal values (# comments and blanks skipped).
std::vector<double> load_signal_csv(const std::string& path);

}  // namespace seqdet
