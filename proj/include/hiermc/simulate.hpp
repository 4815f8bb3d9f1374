#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "hiermc/dataset.hpp"
#include "hiermc/model.hpp"

namespace hiermc {

// y_i = beta0 * x_i^beta1 * exp(e_i), x uniform on (x_lo, x_hi): data with an
// exact log(y)-log(x) linear relationship.
struct SimLogLogConfig {
  std::size_t n = 500;
  double beta0 = 2.0;
  double beta1 = 1.2;
  double sigma_e = 0.3;
  double x_lo = 1.0;
  double x_hi = 10.0;
  std::uint64_t seed = 0;

  void validate() const;
};

// Returned as a standard dataset with the unused covariates zeroed, so the
// fitting pipeline can consume it directly.
Dataset simulate_loglog(const SimLogLogConfig& cfg);

// Desk-scale stand-in for the 81-subject cohort: positive continuous x1,
// continuous score x2, Bernoulli x3, with a chosen family / effect structure
// and known truth. Optional contamination makes the subject heterogeneity
// heavy-tailed.
struct SimEnergyConfig {
  std::size_t n = 81;
  std::array<double, 5> beta{500.0, 0.5, 10.0, 650.0, 0.0};
  Family family = Family::Normal;
  Effect effect = Effect::None;
  bool include_interaction = true;
  double sigma_y = 200.0;     // outcome noise SD (log scale for LogNormal)
  double sigma_eps = 0.0;     // additive / measurement-error effect SD
  double tau_eps_mult = 50.0; // multiplicative Gamma(tau, tau) shape
  double r_y = 10.0;          // Gamma-family shape
  double x1_lo = 1600.0;
  double x1_hi = 3200.0;
  double x2_mean = 16.0;
  double x2_sd = 3.0;
  double x3_p = 0.5;
  double eps_outlier_frac = 0.0;  // fraction of subjects with inflated effects
  double eps_outlier_mult = 1.0;  // SD multiplier for those subjects
  std::uint64_t seed = 0;

  void validate() const;
};

struct SimEnergyResult {
  Dataset data;
  std::vector<double> eps_true;  // empty when effect == None
  SimEnergyConfig truth;
};

SimEnergyResult simulate_energy(const SimEnergyConfig& cfg);

}  // namespace hiermc
