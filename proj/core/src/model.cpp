#include "seqdet/model.hpp"

#include <cmath>
#include <stdexcept>

#include "seqdet/errors.hpp"

namespace seqdet {

namespace {

// ---------------------------------------------------------------------------
// iid Gaussian mean shift

class IidSampler final : public PathSampler {
 public:
  IidSampler(double theta, double sigma, std::int64_t cp)
      : theta_(theta), sigma_(sigma), cp_(cp) {}
  double next(Rng& rng) override {
    ++i_;
    const double mean = i_ > cp_ ? theta_ : 0.0;
    return rng.normal(mean, sigma_);
  }

 private:
  double theta_, sigma_;
  std::int64_t cp_;
  std::int64_t i_ = 0;
};

class IidLlr final : public LlrStream {
 public:
  IidLlr(double theta, double sigma) {
    slope_ = theta / (sigma * sigma);
    offset_ = theta * theta / (2.0 * sigma * sigma);
  }
  double push(double x) override { return slope_ * x - offset_; }

 private:
  double slope_, offset_;
};

// ---------------------------------------------------------------------------
// Signal in AR(p) noise

class ArSignalSampler final : public PathSampler {
 public:
  ArSignalSampler(const ArSignalModel& model, std::int64_t cp)
      : model_(model), cp_(cp), xi_lags_(model.order(), 0.0) {}

  double next(Rng& rng) override {
    ++i_;
    double xi = rng.normal(0.0, model_.sigma());
    for (std::size_t j = 0; j < xi_lags_.size(); ++j) {
      xi += model_.betas()[j] * xi_lags_[j];
    }
    // shift lag window: xi_lags_[0] is xi_{n-1}
    for (std::size_t j = xi_lags_.size(); j-- > 1;) {
      xi_lags_[j] = xi_lags_[j - 1];
    }
    if (!xi_lags_.empty()) xi_lags_[0] = xi;
    return i_ > cp_ ? model_.signal(i_) + xi : xi;
  }

 private:
  const ArSignalModel& model_;
  std::int64_t cp_;
  std::int64_t i_ = 0;
  std::vector<double> xi_lags_;
};

class ArSignalLlr final : public LlrStream {
 public:
  explicit ArSignalLlr(const ArSignalModel& model)
      : model_(model), x_lags_(model.order(), 0.0) {
    inv_var_ = 1.0 / (model.sigma() * model.sigma());
  }

  double push(double x) override {
    ++i_;
    // residual with only the lags that exist yet (i <= p truncates)
    const std::size_t avail =
        std::min<std::size_t>(x_lags_.size(), static_cast<std::size_t>(i_ - 1));
    double resid = x;
    for (std::size_t j = 0; j < avail; ++j) {
      resid -= model_.betas()[j] * x_lags_[j];
    }
    const double st = model_.transformed_signal(i_);
    for (std::size_t j = x_lags_.size(); j-- > 1;) x_lags_[j] = x_lags_[j - 1];
    if (!x_lags_.empty()) x_lags_[0] = x;
    return inv_var_ * (st * resid - 0.5 * st * st);
  }

 private:
  const ArSignalModel& model_;
  double inv_var_;
  std::int64_t i_ = 0;
  std::vector<double> x_lags_;
};

// ---------------------------------------------------------------------------
// Variance change under an unknown mean

class VarianceSampler final : public PathSampler {
 public:
  VarianceSampler(double mean, double sd_pre, double sd_post, std::int64_t cp)
      : mean_(mean), sd_pre_(sd_pre), sd_post_(sd_post), cp_(cp) {}
  double next(Rng& rng) override {
    ++i_;
    return rng.normal(mean_, i_ > cp_ ? sd_post_ : sd_pre_);
  }

 private:
  double mean_, sd_pre_, sd_post_;
  std::int64_t cp_;
  std::int64_t i_ = 0;
};

class VarianceLlr final : public LlrStream {
 public:
  VarianceLlr(double ratio, double sigma_post) {
    coeff_ = (ratio * ratio - 1.0) / (2.0 * sigma_post * sigma_post);
    log_ratio_ = std::log(ratio);
  }

  double push(double x) override {
    // One-pass running mean/variance (Welford); V_i = Q_i - Q_{i-1} is the
    // increment of the sum of squared deviations, which naive two-pass sums
    // would lose to cancellation on long paths.
    ++i_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(i_);
    const double v = delta * (x - mean_);
    if (i_ == 1) return 0.0;
    return coeff_ * v - log_ratio_;
  }

 private:
  double coeff_, log_ratio_;
  double mean_ = 0.0;
  std::int64_t i_ = 0;
};

// ---------------------------------------------------------------------------
// AR(1) correlation change

class Ar1Sampler final : public PathSampler {
 public:
  Ar1Sampler(double beta_pre, double beta_post, std::int64_t cp)
      : beta_pre_(beta_pre), beta_post_(beta_post), cp_(cp) {}
  double next(Rng& rng) override {
    ++i_;
    const double beta = i_ > cp_ ? beta_post_ : beta_pre_;
    prev_ = beta * prev_ + rng.normal();
    return prev_;
  }

 private:
  double beta_pre_, beta_post_;
  std::int64_t cp_;
  std::int64_t i_ = 0;
  double prev_ = 0.0;  // X_0 = 0
};

class Ar1Llr final : public LlrStream {
 public:
  Ar1Llr(double beta_pre, double beta_post)
      : beta_pre_(beta_pre), beta_post_(beta_post) {}
  double push(double x) override {
    const double e0 = x - beta_pre_ * prev_;
    const double e1 = x - beta_post_ * prev_;
    prev_ = x;
    return 0.5 * (e0 * e0 - e1 * e1);
  }

 private:
  double beta_pre_, beta_post_;
  double prev_ = 0.0;
};

// ---------------------------------------------------------------------------
// Constant-LLR stub

class ZeroSampler final : public PathSampler {
 public:
  double next(Rng&) override { return 0.0; }
};

class ConstantLlr final : public LlrStream {
 public:
  explicit ConstantLlr(double z) : z_(z) {}
  double push(double) override { return z_; }

 private:
  double z_;
};

}  // namespace

// ---------------------------------------------------------------------------

IidGaussianMeanModel::IidGaussianMeanModel(double theta, double sigma)
    : theta_(theta), sigma_(sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("iid model requires sigma > 0");
  if (theta == 0.0) {
    throw std::invalid_argument("iid model requires theta != 0");
  }
}

double IidGaussianMeanModel::information_rate() const {
  return theta_ * theta_ / (2.0 * sigma_ * sigma_);
}

std::unique_ptr<PathSampler> IidGaussianMeanModel::make_sampler(
    std::int64_t cp) const {
  return std::make_unique<IidSampler>(theta_, sigma_, cp);
}

std::unique_ptr<LlrStream> IidGaussianMeanModel::make_llr_stream() const {
  return std::make_unique<IidLlr>(theta_, sigma_);
}

// ---------------------------------------------------------------------------

ArSignalModel::ArSignalModel(std::vector<double> betas, double sigma,
                             double constant_signal)
    : betas_(std::move(betas)), sigma_(sigma), signal_table_{constant_signal} {
  validate();
}

ArSignalModel::ArSignalModel(std::vector<double> betas, double sigma,
                             std::vector<double> signal_table)
    : betas_(std::move(betas)),
      sigma_(sigma),
      signal_table_(std::move(signal_table)) {
  if (signal_table_.empty()) {
    throw std::invalid_argument("ar-signal table must be nonempty");
  }
  validate();
}

void ArSignalModel::validate() const {
  if (betas_.empty()) {
    throw std::invalid_argument("ar-signal requires AR order p >= 1");
  }
  if (!(sigma_ > 0.0)) {
    throw std::invalid_argument("ar-signal requires sigma > 0");
  }
  double beta_sum = 0.0;
  for (double b : betas_) beta_sum += b;
  if (beta_sum == 1.0) {
    throw std::invalid_argument("ar-signal requires sum(beta_i) != 1");
  }
  if (!(information_rate() > 0.0)) {
    throw std::invalid_argument("ar-signal information rate must be positive");
  }
}

double ArSignalModel::signal(std::int64_t j) const {
  const std::int64_t period = static_cast<std::int64_t>(signal_table_.size());
  return signal_table_[static_cast<std::size_t>((j - 1) % period)];
}

double ArSignalModel::transformed_signal(std::int64_t j) const {
  const std::int64_t lags =
      std::min<std::int64_t>(static_cast<std::int64_t>(betas_.size()), j - 1);
  double st = signal(j);
  for (std::int64_t i = 1; i <= lags; ++i) {
    st -= betas_[static_cast<std::size_t>(i - 1)] * signal(j - i);
  }
  return st;
}

double ArSignalModel::information_rate() const {
  // Cesaro limit of Stilde_j^2/(2 sigma^2): the transformed signal is
  // eventually periodic, so average one full period past the startup lags.
  const std::int64_t p = static_cast<std::int64_t>(betas_.size());
  const std::int64_t period = static_cast<std::int64_t>(signal_table_.size());
  double acc = 0.0;
  for (std::int64_t j = p + 1; j <= p + period; ++j) {
    const double st = transformed_signal(j);
    acc += st * st;
  }
  return acc / static_cast<double>(period) / (2.0 * sigma_ * sigma_);
}

std::unique_ptr<PathSampler> ArSignalModel::make_sampler(
    std::int64_t cp) const {
  return std::make_unique<ArSignalSampler>(*this, cp);
}

std::unique_ptr<LlrStream> ArSignalModel::make_llr_stream() const {
  return std::make_unique<ArSignalLlr>(*this);
}

// ---------------------------------------------------------------------------

VarianceChangeModel::VarianceChangeModel(double sigma_pre, double sigma_post,
                                         double nuisance_mean)
    : sigma_pre_(sigma_pre),
      sigma_post_(sigma_post),
      nuisance_mean_(nuisance_mean) {
  if (!(sigma_pre > 0.0) || !(sigma_post > 0.0)) {
    throw std::invalid_argument("variance model requires positive sigmas");
  }
  if (sigma_pre == sigma_post) {
    throw std::invalid_argument(
        "variance model requires sigma_post != sigma_pre");
  }
}

double VarianceChangeModel::information_rate() const {
  const double r = variance_ratio();
  return 0.5 * (r * r - 1.0) - std::log(r);
}

std::unique_ptr<PathSampler> VarianceChangeModel::make_sampler(
    std::int64_t cp) const {
  return std::make_unique<VarianceSampler>(nuisance_mean_, sigma_pre_,
                                           sigma_post_, cp);
}

std::unique_ptr<LlrStream> VarianceChangeModel::make_llr_stream() const {
  return std::make_unique<VarianceLlr>(variance_ratio(), sigma_post_);
}

// ---------------------------------------------------------------------------

Ar1CorrelationModel::Ar1CorrelationModel(double beta_pre, double beta_post)
    : beta_pre_(beta_pre), beta_post_(beta_post) {
  if (!(std::fabs(beta_pre) < 1.0) || !(std::fabs(beta_post) < 1.0)) {
    throw std::invalid_argument("ar1 model requires |beta| < 1 (stability)");
  }
  if (beta_pre == beta_post) {
    throw std::invalid_argument("ar1 model requires beta_pre != beta_post");
  }
}

double Ar1CorrelationModel::information_rate() const {
  const double d = beta_post_ - beta_pre_;
  return d * d / (2.0 * (1.0 - beta_post_ * beta_post_));
}

std::unique_ptr<PathSampler> Ar1CorrelationModel::make_sampler(
    std::int64_t cp) const {
  return std::make_unique<Ar1Sampler>(beta_pre_, beta_post_, cp);
}

std::unique_ptr<LlrStream> Ar1CorrelationModel::make_llr_stream() const {
  return std::make_unique<Ar1Llr>(beta_pre_, beta_post_);
}

// ---------------------------------------------------------------------------

std::unique_ptr<PathSampler> ConstantLlrModel::make_sampler(
    std::int64_t) const {
  return std::make_unique<ZeroSampler>();
}

std::unique_ptr<LlrStream> ConstantLlrModel::make_llr_stream() const {
  return std::make_unique<ConstantLlr>(z_);
}

// ---------------------------------------------------------------------------

PathRecord generate_path(const ScenarioModel& model, std::int64_t nu,
                         std::size_t n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("path length must be >= 1");
  if (nu < -1) throw std::invalid_argument("change point must be >= -1");
  PathRecord path;
  path.changepoint = nu;
  path.model_tag = model.name();
  path.observations.reserve(n);
  auto sampler = model.make_sampler(nu);
  for (std::size_t i = 0; i < n; ++i) {
    path.observations.push_back(sampler->next(rng));
  }
  return path;
}

double llr_increment(const ScenarioModel& model,
                     std::span<const double> history, std::size_t i) {
  if (i < 1 || i > history.size()) {
    throw InvalidIndexError("llr_increment: index " + std::to_string(i) +
                            " outside history of length " +
                            std::to_string(history.size()));
  }
  auto stream = model.make_llr_stream();
  double z = 0.0;
  for (std::size_t j = 0; j < i; ++j) z = stream->push(history[j]);
  return z;
}

std::vector<double> llr_path(const ScenarioModel& model,
                             const PathRecord& path, std::size_t k) {
  const std::size_t n = path.observations.size();
  if (k >= n) {
    throw InvalidIndexError("llr_path: k = " + std::to_string(k) +
                            " must be below the path length " +
                            std::to_string(n));
  }
  auto stream = model.make_llr_stream();
  std::vector<double> partial;
  partial.reserve(n - k);
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double z = stream->push(path.observations[j]);
    if (j >= k) {
      acc += z;
      partial.push_back(acc);
    }
  }
  return partial;
}

std::vector<std::string> model_variant_names() {
  return {"iid-gaussian-mean", "ar-signal", "variance-invariant",
          "ar1-correlation", "constant-llr"};
}

}  // namespace seqdet
