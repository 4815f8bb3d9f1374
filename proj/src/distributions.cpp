#include "hiermc/distributions.hpp"

#include <cmath>
#include <stdexcept>

namespace hiermc {

double normal_logpdf(double x, double mean, double variance) {
  if (!(variance > 0.0)) {
    throw std::domain_error("normal_logpdf: variance must be > 0");
  }
  const double d = x - mean;
  return -0.5 * (kLogTwoPi + std::log(variance) + d * d / variance);
}

double gamma_logpdf(double x, double shape, double rate) {
  if (!(x > 0.0) || !(shape > 0.0) || !(rate > 0.0)) {
    throw std::domain_error("gamma_logpdf: x, shape and rate must all be > 0");
  }
  return shape * std::log(rate) + (shape - 1.0) * std::log(x) - rate * x -
         std::lgamma(shape);
}

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x * 0.7071067811865475244);
}

namespace {

// Acklam's rational approximation for the standard normal quantile
// (central region plus two tail branches), good to ~1.2e-9 on its own.
double quantile_estimate(double p) {
  static constexpr double a[6] = {
      -3.969683028665376e+01, 2.209460984245205e+02,  -2.759285104469687e+02,
      1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[5] = {
      -5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01,  -1.328068155288572e+01};
  static constexpr double c[6] = {
      -7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[4] = {
      7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00};
  static constexpr double plow = 0.02425;

  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - plow) {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// Refinement for p <= 0.5 only: there normal_cdf(x) is small and the Halley
// residual normal_cdf(x) - p carries full relative precision.
double quantile_refined_lower(double p) {
  double x = quantile_estimate(p);
  for (int step = 0; step < 2; ++step) {
    const double e = normal_cdf(x) - p;
    const double u = e * 2.5066282746310005024 * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

}  // namespace

double normal_quantile(double p) {
  if (!(p > 0.0) || !(p < 1.0)) {
    throw std::domain_error("normal_quantile: p must lie in (0, 1)");
  }
  // 1 - p is exact for p >= 0.5, so the upper tail reflects onto the lower
  // one instead of cancelling inside the CDF residual.
  if (p > 0.5) return -quantile_refined_lower(1.0 - p);
  return quantile_refined_lower(p);
}

double sample_normal(RngStream& rng, double mean, double variance) {
  if (!(variance > 0.0)) {
    throw std::domain_error("sample_normal: variance must be > 0");
  }
  return mean + std::sqrt(variance) * normal_quantile(rng.next_unit());
}

double sample_gamma(RngStream& rng, double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0)) {
    throw std::domain_error("sample_gamma: shape and rate must be > 0");
  }
  // Marsaglia-Tsang squeeze; shapes below one boosted through shape + 1.
  if (shape < 1.0) {
    const double u = rng.next_unit();
    return sample_gamma(rng, shape + 1.0, rate) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal_quantile(rng.next_unit());
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.next_unit();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v / rate;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v / rate;
  }
}

double sample_uniform(RngStream& rng, double lo, double hi) {
  if (!(lo < hi)) {
    throw std::domain_error("sample_uniform: requires lo < hi");
  }
  return lo + (hi - lo) * rng.next_unit();
}

}  // namespace hiermc
