#include "hiermc/simulate.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "hiermc/distributions.hpp"
#include "hiermc/errors.hpp"
#include "hiermc/rng.hpp"

namespace hiermc {

void SimLogLogConfig::validate() const {
  if (n < 2) throw std::invalid_argument("simulate_loglog: n must be >= 2");
  if (!(beta0 > 0.0)) throw std::invalid_argument("simulate_loglog: beta0 must be > 0");
  if (!(sigma_e >= 0.0)) throw std::invalid_argument("simulate_loglog: sigma_e must be >= 0");
  if (!(x_lo > 0.0) || !(x_lo < x_hi)) {
    throw std::invalid_argument("simulate_loglog: need 0 < x_lo < x_hi");
  }
}

Dataset simulate_loglog(const SimLogLogConfig& cfg) {
  cfg.validate();
  RngStream rng(cfg.seed, 0);
  std::vector<double> y(cfg.n), x(cfg.n);
  const std::vector<double> zeros(cfg.n, 0.0);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    x[i] = sample_uniform(rng, cfg.x_lo, cfg.x_hi);
    const double e = cfg.sigma_e > 0.0
                         ? sample_normal(rng, 0.0, cfg.sigma_e * cfg.sigma_e)
                         : 0.0;
    y[i] = cfg.beta0 * std::pow(x[i], cfg.beta1) * std::exp(e);
  }
  return Dataset(std::move(y), std::move(x), zeros, zeros);
}

void SimEnergyConfig::validate() const {
  if (n < 2) throw std::invalid_argument("simulate_energy: n must be >= 2");
  if (!(sigma_y >= 0.0) || !(sigma_eps >= 0.0)) {
    throw std::invalid_argument("simulate_energy: noise SDs must be >= 0");
  }
  if (!(tau_eps_mult > 0.0)) {
    throw std::invalid_argument("simulate_energy: tau_eps_mult must be > 0");
  }
  if (!(r_y > 0.0)) throw std::invalid_argument("simulate_energy: r_y must be > 0");
  if (!(x1_lo > 0.0) || !(x1_lo < x1_hi)) {
    throw std::invalid_argument("simulate_energy: need 0 < x1_lo < x1_hi");
  }
  if (!(x2_sd >= 0.0)) throw std::invalid_argument("simulate_energy: x2_sd must be >= 0");
  if (!(x3_p >= 0.0) || !(x3_p <= 1.0)) {
    throw std::invalid_argument("simulate_energy: x3_p must lie in [0, 1]");
  }
  if (!(eps_outlier_frac >= 0.0) || !(eps_outlier_frac <= 1.0)) {
    throw std::invalid_argument("simulate_energy: eps_outlier_frac must lie in [0, 1]");
  }
  if (!(eps_outlier_mult > 0.0)) {
    throw std::invalid_argument("simulate_energy: eps_outlier_mult must be > 0");
  }
  if (effect == Effect::Multiplicative && family != Family::LogNormal) {
    throw std::invalid_argument(
        "simulate_energy: multiplicative effects require the log-normal family");
  }
  if (effect == Effect::MeasErr && family == Family::LogNormal) {
    throw std::invalid_argument(
        "simulate_energy: the log-normal model III effect is multiplicative");
  }
}

SimEnergyResult simulate_energy(const SimEnergyConfig& cfg) {
  cfg.validate();
  RngStream rng(cfg.seed, 0);
  const std::size_t n = cfg.n;
  std::vector<double> x1(n), x2(n), x3(n);
  for (std::size_t i = 0; i < n; ++i) {
    x1[i] = sample_uniform(rng, cfg.x1_lo, cfg.x1_hi);
    x2[i] = cfg.x2_sd > 0.0 ? sample_normal(rng, cfg.x2_mean, cfg.x2_sd * cfg.x2_sd)
                            : cfg.x2_mean;
    x3[i] = rng.next_unit() < cfg.x3_p ? 1.0 : 0.0;
  }

  std::vector<double> eps;
  if (cfg.effect != Effect::None) {
    eps.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (cfg.effect == Effect::Multiplicative) {
        eps[i] = sample_gamma(rng, cfg.tau_eps_mult, cfg.tau_eps_mult);
      } else {
        double sd = cfg.sigma_eps;
        if (cfg.eps_outlier_frac > 0.0 && rng.next_unit() < cfg.eps_outlier_frac) {
          sd *= cfg.eps_outlier_mult;
        }
        eps[i] = sd > 0.0 ? sample_normal(rng, 0.0, sd * sd) : 0.0;
      }
    }
  }

  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = cfg.family == Family::LogNormal ? std::log(x1[i]) : x1[i];
    double slope_arg = t;
    if (cfg.effect == Effect::MeasErr) slope_arg = t + eps[i];
    if (cfg.effect == Effect::Multiplicative) slope_arg = t * eps[i];
    double mu = cfg.beta[0] + cfg.beta[1] * slope_arg + cfg.beta[2] * x2[i] +
                cfg.beta[3] * x3[i];
    if (cfg.include_interaction) mu += cfg.beta[4] * x2[i] * x3[i];
    if (cfg.effect == Effect::Additive) mu += eps[i];

    switch (cfg.family) {
      case Family::Normal:
        y[i] = cfg.sigma_y > 0.0 ? sample_normal(rng, mu, cfg.sigma_y * cfg.sigma_y)
                                 : mu;
        if (!(y[i] > 0.0)) {
          throw std::invalid_argument(
              "simulate_energy: configuration produced a non-positive outcome "
              "(row " + std::to_string(i + 1) + "); shrink the noise or raise the mean");
        }
        break;
      case Family::LogNormal: {
        const double log_y =
            cfg.sigma_y > 0.0 ? sample_normal(rng, mu, cfg.sigma_y * cfg.sigma_y) : mu;
        y[i] = std::exp(log_y);
        break;
      }
      case Family::Gamma:
        if (!(mu > 0.0)) {
          throw std::invalid_argument(
              "simulate_energy: configuration reaches a non-positive Gamma mean "
              "(row " + std::to_string(i + 1) + ")");
        }
        y[i] = sample_gamma(rng, cfg.r_y, cfg.r_y / mu);
        break;
    }
  }

  return SimEnergyResult{Dataset(std::move(y), std::move(x1), std::move(x2), std::move(x3)),
                         std::move(eps), cfg};
}

}  // namespace hiermc
