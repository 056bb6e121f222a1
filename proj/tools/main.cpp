// seqdet: sequential change detection experiments from declarative configs.
//
// Subcommands: calibrate | simulate | study | verify | list-models.
// Exit codes: 0 ok, 2 config/budget error, 3 censoring policy tripped,
// 4 no surviving trials.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "seqdet/asymptotics.hpp"
#include "seqdet/config.hpp"
#include "seqdet/detector.hpp"
#include "seqdet/errors.hpp"
#include "seqdet/montecarlo.hpp"
#include "seqdet/report.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitCensoring = 3;
constexpr int kExitNoSurvivors = 4;

struct CommonArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> out_dir;
};

seqdet::ExperimentConfig load(const CommonArgs& args) {
  auto config = seqdet::load_config_file(args.config_path);
  if (args.seed) config.mc.seed = *args.seed;
  if (args.workers) config.mc.workers = *args.workers;
  if (args.out_dir) config.output.dir = *args.out_dir;
  return config;
}

void write_file(const std::filesystem::path& dir, const std::string& name,
                const std::string& contents) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + (dir / name).string());
  }
  out << contents;
}

std::vector<seqdet::CalibrationRow> calibrate_rows(
    const seqdet::ExperimentConfig& config) {
  if (config.budget.alphas.empty()) {
    throw seqdet::ConfigError("[budget] alpha grid is required to calibrate");
  }
  const auto schedule = seqdet::make_schedule(config.prior);
  std::vector<seqdet::CalibrationRow> rows;
  for (double alpha : config.budget.alphas) {
    const seqdet::Prior prior =
        schedule ? seqdet::Prior::geometric(schedule->rho_at(alpha),
                                            config.prior.q)
                 : seqdet::make_prior(config.prior);
    for (auto procedure : config.procedures) {
      const double threshold =
          procedure == seqdet::Procedure::shiryaev
              ? seqdet::shiryaev_threshold(alpha, prior)
              : seqdet::sr_threshold(alpha, prior);
      rows.push_back({alpha, procedure, threshold});
    }
  }
  return rows;
}

int cmd_calibrate(const CommonArgs& args) {
  const auto config = load(args);
  const auto rows = calibrate_rows(config);
  for (const auto& row : rows) {
    std::cout << "alpha=" << seqdet::format_double(row.alpha) << "  "
              << seqdet::procedure_name(row.procedure)
              << "  threshold=" << seqdet::format_double(row.threshold)
              << "\n";
  }
  write_file(config.output.dir, "thresholds.csv", seqdet::thresholds_csv(rows));
  return kExitOk;
}

seqdet::StudySpec build_spec(const seqdet::ExperimentConfig& config,
                             const seqdet::ScenarioModel& model) {
  seqdet::StudySpec spec;
  spec.model = &model;
  spec.prior = seqdet::make_prior(config.prior);
  spec.rho_schedule = seqdet::make_schedule(config.prior);
  spec.procedures = config.procedures;
  spec.alpha_grid = config.budget.alphas;
  spec.moments = config.study.moments;
  spec.r = config.study.r;
  spec.trials = config.mc.trials;
  spec.horizon = config.mc.horizon;
  spec.seed = config.mc.seed;
  spec.workers = config.mc.workers;
  return spec;
}

// Explicit-threshold rows for `simulate`: the alpha column carries the
// PFA bound implied by each threshold.
seqdet::StudyReport simulate_explicit(const seqdet::ExperimentConfig& config,
                                      const seqdet::ScenarioModel& model) {
  const seqdet::Prior prior = seqdet::make_prior(config.prior);
  const double rate = model.information_rate();
  seqdet::StudyReport report;
  report.information_rate = rate;
  for (double threshold : config.budget.thresholds) {
    for (auto procedure : config.procedures) {
      const double implied_alpha =
          procedure == seqdet::Procedure::shiryaev
              ? 1.0 / (1.0 + threshold)
              : prior.mean_changepoint() / threshold;
      seqdet::MCOptions options;
      options.trials = config.mc.trials;
      options.horizon = config.mc.horizon;
      options.seed = config.mc.seed;
      options.workers = config.mc.workers;
      options.max_censored_fraction = config.mc.max_censored;
      options.stream = seqdet::stream_label(
          0xa11, threshold, static_cast<std::uint64_t>(procedure));
      const auto pfa =
          seqdet::estimate_pfa(procedure, model, prior, threshold, options);
      const auto delays = seqdet::estimate_delay_moments(
          procedure, model, prior, threshold, config.study.moments, options);
      for (std::size_t j = 0; j < config.study.moments.size(); ++j) {
        seqdet::StudyRow row;
        row.alpha = implied_alpha;
        row.procedure = procedure;
        row.m = config.study.moments[j];
        row.threshold = threshold;
        row.pfa_hat = pfa.value;
        row.pfa_se = pfa.stderror;
        row.delay_hat = delays[j].value;
        row.delay_se = delays[j].stderror;
        // the constant-llr stub has no positive information rate; the
        // first-order prediction is undefined for it
        if (rate > 0.0 && implied_alpha > 0.0 && implied_alpha < 1.0 &&
            threshold > 1.0) {
          row.theory =
              procedure == seqdet::Procedure::shiryaev
                  ? seqdet::shiryaev_theoretical_moment(
                        implied_alpha, rate, prior.tail_exponent(), row.m)
                  : seqdet::sr_theoretical_moment(threshold, rate, row.m);
        } else {
          row.theory = std::numeric_limits<double>::quiet_NaN();
        }
        row.ratio = row.delay_hat / row.theory;
        row.seed = config.mc.seed;
        row.trials = config.mc.trials;
        row.censored = delays[j].censored;
        row.mu = prior.tail_exponent();
        report.rows.push_back(row);
      }
    }
  }
  return report;
}

int cmd_simulate(const CommonArgs& args) {
  const auto config = load(args);
  const auto model = seqdet::make_model(config.model);
  if (config.budget.alphas.empty() && config.budget.thresholds.empty()) {
    throw seqdet::ConfigError(
        "[budget] needs an alpha grid or explicit thresholds");
  }
  seqdet::StudyReport report;
  if (!config.budget.alphas.empty()) {
    report = seqdet::run_study(build_spec(config, *model));
  } else {
    report = simulate_explicit(config, *model);
  }
  write_file(config.output.dir, "estimates.csv", seqdet::study_csv(report));
  std::cout << "wrote " << report.rows.size() << " estimate rows to "
            << (std::filesystem::path(config.output.dir) / "estimates.csv")
                   .string()
            << "\n";
  return kExitOk;
}

int cmd_study(const CommonArgs& args) {
  const auto config = load(args);
  if (config.budget.alphas.size() < 2) {
    throw seqdet::ConfigError("[budget] study needs an alpha grid of >= 2 points");
  }
  const auto model = seqdet::make_model(config.model);
  const auto report = seqdet::run_study(build_spec(config, *model));
  write_file(config.output.dir, "study.csv", seqdet::study_csv(report));
  for (const auto& [name, contents] : seqdet::study_series_files(report)) {
    write_file(config.output.dir, name, contents);
  }
  if (config.procedures.size() >= 2) {
    write_file(config.output.dir, "comparison.csv",
               seqdet::comparison_csv(report));
  }
  std::cout << "wrote study report (" << report.rows.size() << " rows) to "
            << config.output.dir << "\n";
  return kExitOk;
}

int cmd_verify(const CommonArgs& args) {
  const auto config = load(args);
  const auto model = seqdet::make_model(config.model);
  const auto prior = seqdet::make_prior(config.prior);
  const auto& v = config.verify;

  const auto condition = prior.check_condition_c(v.condition_r);
  std::cout << "condition-C: kind=" << config.prior.kind
            << " r=" << seqdet::format_double(v.condition_r)
            << " mu=" << seqdet::format_double(condition.mu);
  if (condition.log_moment_sum) {
    std::cout << " log-moment-sum="
              << seqdet::format_double(*condition.log_moment_sum);
  } else {
    std::cout << " log-moment-sum=skipped(exponential-tail)";
  }
  std::cout << " satisfied=" << (condition.satisfied ? "yes" : "no") << "\n";

  seqdet::MCOptions options;
  options.trials = v.trials;
  options.seed = config.mc.seed;
  options.workers = config.mc.workers;

  for (std::int64_t k : v.k_grid) {
    std::cout << "llr-deviation model=" << model->name() << " k=" << k
              << " eps=" << seqdet::format_double(v.epsilon) << ":";
    double previous = 1.0;
    bool decreasing = true;
    for (std::uint64_t n : v.deviation_ns) {
      const auto estimate =
          seqdet::estimate_llr_deviation(*model, k, n, v.epsilon, options);
      decreasing = decreasing && estimate.value < previous;
      previous = estimate.value;
      std::cout << "  n=" << n << " p=" << seqdet::format_double(estimate.value)
                << "(se " << seqdet::format_double(estimate.stderror) << ")";
    }
    std::cout << "  decreasing=" << (decreasing ? "yes" : "no") << "\n";
  }

  for (std::int64_t k : v.k_grid) {
    const auto report = seqdet::estimate_upsilon_partial(
        *model, k, v.condition_r, v.epsilon, v.upsilon_nmax, options);
    std::cout << "upsilon model=" << model->name() << " k=" << k
              << " r=" << seqdet::format_double(v.condition_r)
              << " eps=" << seqdet::format_double(v.epsilon) << ":";
    for (std::size_t j = 0; j < report.grid.size(); ++j) {
      std::cout << "  N=" << report.grid[j] << " S="
                << seqdet::format_double(report.partial_sums[j]);
    }
    std::cout << "  tail=" << (report.tail_flag ? "summable-looking" : "open")
              << "\n";
  }
  return kExitOk;
}

int cmd_list_models() {
  for (const auto& name : seqdet::model_variant_names()) {
    std::cout << name << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian sequential change detection experiments"};
  app.require_subcommand(1);

  CommonArgs args;
  auto add_common = [&args](CLI::App* cmd) {
    cmd->add_option("--config", args.config_path, "experiment config path")
        ->required();
    cmd->add_option("--seed", args.seed, "override the master seed");
    cmd->add_option("--workers", args.workers, "cap task parallelism");
    cmd->add_option("--out", args.out_dir, "output directory");
  };

  auto* calibrate = app.add_subcommand("calibrate", "alpha grid -> thresholds");
  add_common(calibrate);
  auto* simulate =
      app.add_subcommand("simulate", "estimate PFA and delay moments");
  add_common(simulate);
  auto* study = app.add_subcommand(
      "study", "full asymptotics study with series and comparison files");
  add_common(study);
  auto* verify = app.add_subcommand(
      "verify", "prior-class and LLR-convergence diagnostics");
  add_common(verify);
  app.add_subcommand("list-models", "print the known model variants");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (calibrate->parsed()) return cmd_calibrate(args);
    if (simulate->parsed()) return cmd_simulate(args);
    if (study->parsed()) return cmd_study(args);
    if (verify->parsed()) return cmd_verify(args);
    return cmd_list_models();
  } catch (const seqdet::CensoringExceededError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCensoring;
  } catch (const seqdet::NoSurvivorsError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNoSurvivors;
  } catch (const seqdet::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const seqdet::InvalidBudgetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
