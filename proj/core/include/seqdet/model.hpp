#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "seqdet/rng.hpp"

namespace seqdet {

/// Change point value meaning "the change never happens" (pure-noise run).
inline constexpr std::int64_t kNoChange =
    std::numeric_limits<std::int64_t>::max();

/// One simulated observation path. Indices i <= changepoint follow the
/// pre-change law, indices i > changepoint the post-change law (1-based);
/// changepoint = -1 means the whole path is post-change.
struct PathRecord {
  std::vector<double> observations;
  std::int64_t changepoint = kNoChange;
  std::string model_tag;
};

/// Sequential observation generator for one trial at a fixed change point.
class PathSampler {
 public:
  virtual ~PathSampler() = default;
  virtual double next(Rng& rng) = 0;
};

/// Consumes observations X_1, X_2, ... in order and returns the
/// log-likelihood-ratio increment Z_i for each.
class LlrStream {
 public:
  virtual ~LlrStream() = default;
  virtual double push(double x) = 0;
};

/// An observation model: how to simulate paths around a change point and
/// how to score each observation's post-vs-pre log-likelihood ratio, plus
/// the closed-form information rate I = lim (1/n) lambda_{k+n}^k.
///
/// Models are immutable; per-trial state lives in the sampler/stream
/// objects, so trials parallelize with no shared mutable state.
class ScenarioModel {
 public:
  virtual ~ScenarioModel() = default;
  virtual std::string name() const = 0;
  virtual double information_rate() const = 0;
  virtual std::unique_ptr<PathSampler> make_sampler(
      std::int64_t changepoint) const = 0;
  virtual std::unique_ptr<LlrStream> make_llr_stream() const = 0;
};

/// Gaussian mean shift: N(0, sigma^2) before the change, N(theta, sigma^2)
/// after. I = theta^2 / (2 sigma^2).
class IidGaussianMeanModel final : public ScenarioModel {
 public:
  IidGaussianMeanModel(double theta, double sigma);
  std::string name() const override { return "iid-gaussian-mean"; }
  double information_rate() const override;
  std::unique_ptr<PathSampler> make_sampler(std::int64_t cp) const override;
  std::unique_ptr<LlrStream> make_llr_stream() const override;
  double theta() const { return theta_; }
  double sigma() const { return sigma_; }

 private:
  double theta_;
  double sigma_;
};

/// A deterministic signal appearing in AR(p) Gaussian noise:
///   X_n = 1{n > nu} S_n + xi_n,   xi_n = sum_i beta_i xi_{n-i} + w_n,
/// with zero initial conditions. The p-th order residual transform whitens
/// the noise, so the LLR has independent increments with
///   Z_n = (Stilde_n Xtilde_n - Stilde_n^2 / 2) / sigma^2.
/// A tabulated signal cycles periodically; the constant default gives
/// I = S^2 (1 - sum beta_i)^2 / (2 sigma^2).
class ArSignalModel final : public ScenarioModel {
 public:
  ArSignalModel(std::vector<double> betas, double sigma,
                double constant_signal);
  ArSignalModel(std::vector<double> betas, double sigma,
                std::vector<double> signal_table);
  std::string name() const override { return "ar-signal"; }
  double information_rate() const override;
  std::unique_ptr<PathSampler> make_sampler(std::int64_t cp) const override;
  std::unique_ptr<LlrStream> make_llr_stream() const override;

  /// Signal value S_j at 1-based time j (periodic for tabulated signals).
  double signal(std::int64_t j) const;
  /// Transformed signal Stilde_j; truncated to available lags for j <= p.
  double transformed_signal(std::int64_t j) const;
  std::size_t order() const { return betas_.size(); }
  double sigma() const { return sigma_; }
  const std::vector<double>& betas() const { return betas_; }

 private:
  void validate() const;

  std::vector<double> betas_;
  double sigma_ = 1.0;
  std::vector<double> signal_table_;  // size 1 == constant signal
};

/// Variance change in iid normal data with an unknown common mean theta.
/// The detector sees only shift-invariant statistics; with
/// ratio = sigma_post / sigma_pre the increments are
///   Z_1 = 0,   Z_i = (ratio^2 - 1)/(2 sigma_post^2) V_i - log ratio,
/// where V_i = (i-1) s_i^2 - (i-2) s_{i-1}^2 is maintained by a one-pass
/// running-variance update. I = (ratio^2 - 1)/2 - log ratio.
class VarianceChangeModel final : public ScenarioModel {
 public:
  VarianceChangeModel(double sigma_pre, double sigma_post,
                      double nuisance_mean = 0.0);
  std::string name() const override { return "variance-invariant"; }
  double information_rate() const override;
  std::unique_ptr<PathSampler> make_sampler(std::int64_t cp) const override;
  std::unique_ptr<LlrStream> make_llr_stream() const override;
  double variance_ratio() const { return sigma_post_ / sigma_pre_; }
  double sigma_pre() const { return sigma_pre_; }
  double sigma_post() const { return sigma_post_; }

 private:
  double sigma_pre_;
  double sigma_post_;
  double nuisance_mean_;
};

/// Change in the correlation coefficient of a stable AR(1) sequence driven
/// by unit Gaussian noise: coefficient beta_pre before the change, beta_post
/// after. Z_i = ((X_i - beta_pre X_{i-1})^2 - (X_i - beta_post X_{i-1})^2)/2
/// and I = (beta_post - beta_pre)^2 / (2 (1 - beta_post^2)).
class Ar1CorrelationModel final : public ScenarioModel {
 public:
  Ar1CorrelationModel(double beta_pre, double beta_post);
  std::string name() const override { return "ar1-correlation"; }
  double information_rate() const override;
  std::unique_ptr<PathSampler> make_sampler(std::int64_t cp) const override;
  std::unique_ptr<LlrStream> make_llr_stream() const override;
  double beta_pre() const { return beta_pre_; }
  double beta_post() const { return beta_post_; }

 private:
  double beta_pre_;
  double beta_post_;
};

/// Diagnostics stub: every observation is zero and every LLR increment is
/// the constant z, so the likelihood ratio stream is fully deterministic
/// (L == 1 when z == 0). Useful for closed-form checks of the detectors and
/// the Monte Carlo plumbing; exempt from the I > 0 invariant.
class ConstantLlrModel final : public ScenarioModel {
 public:
  explicit ConstantLlrModel(double z) : z_(z) {}
  std::string name() const override { return "constant-llr"; }
  double information_rate() const override { return z_; }
  std::unique_ptr<PathSampler> make_sampler(std::int64_t cp) const override;
  std::unique_ptr<LlrStream> make_llr_stream() const override;

 private:
  double z_;
};

/// Simulates a path of length n with change point nu (>= -1, or kNoChange).
PathRecord generate_path(const ScenarioModel& model, std::int64_t nu,
                         std::size_t n, Rng& rng);

/// Z_i for the 1-based index i given the observation prefix; throws
/// InvalidIndexError if i = 0 or i exceeds the history.
double llr_increment(const ScenarioModel& model,
                     std::span<const double> history, std::size_t i);

/// Partial sums lambda_{k+n}^k, n = 1..N-k, as cumulative sums of the
/// increments past k; throws InvalidIndexError if k >= N.
std::vector<double> llr_path(const ScenarioModel& model,
                             const PathRecord& path, std::size_t k);

/// Variant names accepted by the model factory, in listing order.
std::vector<std::string> model_variant_names();

}  // namespace seqdet
