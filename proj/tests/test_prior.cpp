#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "seqdet/prior.hpp"
#include "seqdet/rng.hpp"
#include "support/oracles.hpp"

using namespace seqdet;

TEST_CASE("geometric pmf matches the closed form") {
  CHECK(Prior::geometric(0.5).pmf(2) == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(Prior::geometric(0.5, 0.2).pmf(0) ==
        doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("polynomial pmf is zero beyond the truncated support") {
  const Prior prior = Prior::polynomial_tail(1.0, 10);
  CHECK(prior.pmf(11) == 0.0);
  CHECK(prior.pmf(10) > 0.0);
}

TEST_CASE("survival values") {
  const Prior geo = Prior::geometric(0.5);
  CHECK(geo.survival(0) == doctest::Approx(1.0));
  CHECK(geo.survival(2) == doctest::Approx(0.25).epsilon(1e-12));
  const Prior poly = Prior::polynomial_tail(1.0, 10);
  CHECK(poly.survival(11) == 0.0);
  CHECK(poly.log_survival(11) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("tail exponent") {
  CHECK(Prior::geometric(0.1).tail_exponent() ==
        doctest::Approx(0.10536051565782628).epsilon(1e-12));
  CHECK(Prior::geometric(0.5).tail_exponent() ==
        doctest::Approx(0.6931471805599453).epsilon(1e-12));
  CHECK(Prior::polynomial_tail(2.0).tail_exponent() == 0.0);
}

TEST_CASE("mean change point") {
  CHECK(Prior::geometric(0.2).mean_changepoint() == doctest::Approx(4.0));
  CHECK(Prior::geometric(0.5).mean_changepoint() == doctest::Approx(1.0));

  const Prior poly = Prior::polynomial_tail(1.0, 100);
  double brute = 0.0;
  for (std::int64_t k = 1; k <= 100; ++k) {
    brute += static_cast<double>(k) * poly.pmf(k);
  }
  CHECK(poly.mean_changepoint() == doctest::Approx(brute).epsilon(1e-12));
  CHECK(std::isfinite(poly.mean_changepoint()));
}

TEST_CASE("condition (C) reports") {
  const auto geo = Prior::geometric(0.1).check_condition_c(2.0);
  CHECK(geo.satisfied);
  CHECK(geo.mu == doctest::Approx(0.10536051565782628));
  CHECK_FALSE(geo.log_moment_sum.has_value());  // exponential tail: skipped

  const Prior poly = Prior::polynomial_tail(1.0, 10000);
  const auto r1 = poly.check_condition_c(1.0);
  const auto r3 = poly.check_condition_c(3.0);
  CHECK(r1.satisfied);
  CHECK(r3.satisfied);
  REQUIRE(r1.log_moment_sum.has_value());
  REQUIRE(r3.log_moment_sum.has_value());

  // brute-force sum over the support
  double sum1 = 0.0;
  for (std::int64_t k = 0; k <= 10000; ++k) {
    const double pk = poly.pmf(k);
    sum1 += pk * std::fabs(std::log(pk));
  }
  CHECK(*r1.log_moment_sum == doctest::Approx(sum1).epsilon(1e-10));
  CHECK(*r3.log_moment_sum > *r1.log_moment_sum);
}

TEST_CASE("normalization and survival consistency") {
  const std::vector<Prior> priors = {
      Prior::geometric(0.5), Prior::geometric(0.1, 0.25),
      Prior::polynomial_tail(1.0, 500), Prior::polynomial_tail(2.5, 50, 0.1)};
  for (const auto& prior : priors) {
    double total = prior.q();
    for (std::int64_t k = 0; k < 5000; ++k) total += prior.pmf(k);
    if (prior.kind() == PriorKind::geometric) {
      total += prior.survival(5000);  // geometric tail past the partial sum
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

    for (std::int64_t n = 0; n < 60; ++n) {
      CHECK(prior.survival(n) - prior.survival(n + 1) ==
            doctest::Approx(prior.pmf(n)).epsilon(1e-11));
      CHECK(prior.survival(n + 1) <= prior.survival(n));
    }
  }
}

TEST_CASE("geometric memorylessness at q = 0") {
  const Prior prior = Prior::geometric(0.37);
  for (std::int64_t n = 0; n < 20; ++n) {
    for (std::int64_t m = 0; m < 20; ++m) {
      CHECK(prior.survival(n + m) ==
            doctest::Approx(prior.survival(n) * prior.survival(m))
                .epsilon(1e-12));
    }
  }
}

TEST_CASE("empirical tail exponent at n = 200") {
  const Prior prior = Prior::geometric(0.1);
  const double empirical = std::fabs(prior.log_survival(200)) / 200.0;
  CHECK(std::fabs(empirical - prior.tail_exponent()) < 1e-6);
}

TEST_CASE("sampling the negative atom with frequency q") {
  const Prior prior = Prior::geometric(0.5, 0.7);
  Rng rng(11);
  const int n = 100000;
  int negative = 0;
  for (int i = 0; i < n; ++i) {
    if (prior.sample_changepoint(rng) == -1) ++negative;
  }
  const double phat = static_cast<double>(negative) / n;
  const double band = 3.0 * std::sqrt(0.7 * 0.3 / n);
  CHECK(std::fabs(phat - 0.7) < band);
}

TEST_CASE("geometric sampler passes a chi-square GOF at 0.001") {
  const Prior prior = Prior::geometric(0.5);
  Rng rng(17);
  const int n = 100000;
  const int cells = 14;  // bins 0..12 plus the >= 13 tail
  std::vector<int> counts(cells, 0);
  for (int i = 0; i < n; ++i) {
    const auto nu = prior.sample_changepoint(rng);
    REQUIRE(nu >= 0);
    ++counts[static_cast<std::size_t>(std::min<std::int64_t>(nu, cells - 1))];
  }
  double chi2 = 0.0;
  for (int c = 0; c < cells; ++c) {
    const double expected =
        n * (c < cells - 1 ? prior.pmf(c) : prior.survival(cells - 1));
    const double d = counts[static_cast<std::size_t>(c)] - expected;
    chi2 += d * d / expected;
  }
  CHECK(chi2 < oracle::chi2_crit_999(cells - 1));
}

TEST_CASE("polynomial sampler respects the support and fits its pmf") {
  const Prior prior = Prior::polynomial_tail(1.0, 10);
  Rng rng(23);
  const int n = 100000;
  std::vector<int> counts(11, 0);
  for (int i = 0; i < n; ++i) {
    const auto nu = prior.sample_changepoint(rng);
    REQUIRE(nu >= 0);
    REQUIRE(nu <= 10);
    ++counts[static_cast<std::size_t>(nu)];
  }
  double chi2 = 0.0;
  for (int c = 0; c <= 10; ++c) {
    const double expected = n * prior.pmf(c);
    const double d = counts[static_cast<std::size_t>(c)] - expected;
    chi2 += d * d / expected;
  }
  CHECK(chi2 < oracle::chi2_crit_999(10));
}

TEST_CASE("point prior via rho = 1") {
  const Prior prior = Prior::geometric(1.0);
  CHECK(prior.pmf(0) == doctest::Approx(1.0));
  CHECK(prior.pmf(1) == 0.0);
  CHECK(prior.mean_changepoint() == 0.0);
  Rng rng(5);
  for (int i = 0; i < 10; ++i) CHECK(prior.sample_changepoint(rng) == 0);
}

TEST_CASE("constructor rejections") {
  CHECK_THROWS_AS(Prior::geometric(0.0), std::invalid_argument);
  CHECK_THROWS_AS(Prior::geometric(1.5), std::invalid_argument);
  CHECK_THROWS_AS(Prior::geometric(0.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Prior::polynomial_tail(0.0), std::invalid_argument);
  CHECK_THROWS_AS(Prior::polynomial_tail(1.0, 0), std::invalid_argument);
}
