#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "hiermc/distributions.hpp"
#include "hiermc/rng.hpp"

#include "density_reference.inc"

using namespace hiermc;

TEST_CASE("normal_logpdf closed-form values") {
  CHECK(normal_logpdf(0.0, 0.0, 1.0) == doctest::Approx(-0.9189385).epsilon(1e-6));
  CHECK(normal_logpdf(2.0, 0.0, 1.0) == doctest::Approx(-2.9189385).epsilon(1e-6));
  CHECK_THROWS_AS(normal_logpdf(0.0, 0.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(normal_logpdf(0.0, 0.0, -1.0), std::domain_error);
}

TEST_CASE("normal_logpdf matches the high-precision reference") {
  for (const auto& row : density_reference::normal_cases) {
    const double got = normal_logpdf(row[0], row[1], row[2]);
    const double want = row[3];
    CHECK(std::abs(got - want) <= 1e-9 * std::max(1.0, std::abs(want)));
  }
}

TEST_CASE("gamma_logpdf closed-form values") {
  CHECK(gamma_logpdf(1.0, 1.0, 1.0) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(gamma_logpdf(2.0, 1.0, 0.5) ==
        doctest::Approx(std::log(0.5) - 1.0).epsilon(1e-12));
  CHECK_THROWS_AS(gamma_logpdf(-1.0, 1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(gamma_logpdf(1.0, 0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(gamma_logpdf(1.0, 1.0, 0.0), std::domain_error);
}

TEST_CASE("gamma_logpdf matches the high-precision reference") {
  for (const auto& row : density_reference::gamma_cases) {
    const double got = gamma_logpdf(row[0], row[1], row[2]);
    const double want = row[3];
    CHECK(std::abs(got - want) <= 1e-9 * std::max(1.0, std::abs(want)));
  }
}

TEST_CASE("normal density integrates to one") {
  // Trapezoid over mean +/- 8 SD with 1e5 points.
  const double mean = 1.3, var = 2.5;
  const double sd = std::sqrt(var);
  const std::size_t n = 100000;
  const double lo = mean - 8.0 * sd, hi = mean + 8.0 * sd;
  const double h = (hi - lo) / static_cast<double>(n);
  double total = 0.5 * (std::exp(normal_logpdf(lo, mean, var)) +
                        std::exp(normal_logpdf(hi, mean, var)));
  for (std::size_t i = 1; i < n; ++i) {
    total += std::exp(normal_logpdf(lo + h * static_cast<double>(i), mean, var));
  }
  total *= h;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("normal_quantile basics") {
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959964).epsilon(1e-6));
  CHECK_THROWS_AS(normal_quantile(0.0), std::domain_error);
  CHECK_THROWS_AS(normal_quantile(1.0), std::domain_error);
  CHECK_THROWS_AS(normal_quantile(-0.2), std::domain_error);
}

TEST_CASE("normal_quantile symmetry and inverse") {
  for (int i = 1; i <= 999; ++i) {
    const double p = static_cast<double>(i) / 1000.0;
    const double q = normal_quantile(p);
    CHECK(std::abs(q + normal_quantile(1.0 - p)) < 1e-12);
    CHECK(std::abs(normal_cdf(q) - p) < 1e-9);
  }
  // Monotone on a coarse grid.
  double prev = normal_quantile(0.0005);
  for (int i = 1; i <= 200; ++i) {
    const double q = normal_quantile(0.0005 + 0.9990 * i / 200.0);
    CHECK(q > prev);
    prev = q;
  }
}

TEST_CASE("normal_quantile matches the high-precision reference") {
  for (const auto& row : density_reference::quantile_cases) {
    const double got = normal_quantile(row[0]);
    const double want = row[1];
    CHECK(std::abs(got - want) <= 1e-9 * std::max(1.0, std::abs(want)));
  }
}

TEST_CASE("rng streams replay exactly and differ across stream ids") {
  RngStream a(42, 7), b(42, 7), c(42, 8);
  bool any_diff = false;
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t va = a.next_u64();
    CHECK(va == b.next_u64());
    any_diff = any_diff || (va != c.next_u64());
  }
  CHECK(any_diff);
}

TEST_CASE("uniform draws live strictly inside their interval") {
  RngStream rng(1, 0);
  for (int i = 0; i < 10000; ++i) {
    const double u = sample_uniform(rng, -2.0, 3.5);
    CHECK(u > -2.0);
    CHECK(u < 3.5);
  }
  CHECK_THROWS_AS(sample_uniform(rng, 1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(sample_uniform(rng, 2.0, 1.0), std::domain_error);
}

TEST_CASE("normal sampler hits its mean within CLT bounds") {
  RngStream rng(123, 0);
  const std::size_t n = 1000000;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += sample_normal(rng, 5.0, 4.0);
  // SE = 2/1000 = 0.002; the bound is five SEs.
  CHECK(std::abs(total / static_cast<double>(n) - 5.0) < 0.01);
  CHECK_THROWS_AS(sample_normal(rng, 0.0, 0.0), std::domain_error);
}

TEST_CASE("gamma sampler moments match shape/rate") {
  RngStream rng(321, 0);
  const std::size_t n = 1000000;
  const double shape = 2.0, rate = 0.5;
  double total = 0.0, total_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double g = sample_gamma(rng, shape, rate);
    CHECK(g > 0.0);
    total += g;
    total_sq += g * g;
  }
  const double mean = total / static_cast<double>(n);
  const double var = total_sq / static_cast<double>(n) - mean * mean;
  // mean = 4 (SE ~ 0.0028), variance = 8 (SE ~ 0.02); five SEs each.
  CHECK(std::abs(mean - 4.0) < 0.02);
  CHECK(std::abs(var - 8.0) < 0.1);
  CHECK_THROWS_AS(sample_gamma(rng, 0.0, 1.0), std::domain_error);

  // Sub-one shapes go through the boost path.
  double small_total = 0.0;
  for (std::size_t i = 0; i < 200000; ++i) small_total += sample_gamma(rng, 0.4, 2.0);
  CHECK(small_total / 200000.0 == doctest::Approx(0.2).epsilon(0.05));
}
