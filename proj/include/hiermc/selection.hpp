#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hiermc/diagnostics.hpp"
#include "hiermc/sampler.hpp"

namespace hiermc {

// -2 * log-likelihood; +inf when the likelihood is -inf.
double deviance(const ModelSpec& spec, const ParameterState& state,
                const Dataset& data);

struct DicResult {
  double dbar = 0.0;        // mean deviance over pooled draws
  double d_at_mean = 0.0;   // deviance at the posterior-mean state
  double pd = 0.0;          // dbar - d_at_mean; may be negative
  double dic = 0.0;         // dbar + pd
  bool dic_defined = true;  // false when d_at_mean is not finite
  bool negative_pd = false;
  bool theta_bar_clamped = false;  // mean state nudged back into support
};

// Coordinate-wise posterior mean over pooled draws. Dispersion parameters are
// averaged on the SD scale and squared; fields whose draws are all identical
// pass through exactly.
ParameterState posterior_mean_state(const ModelSpec& spec,
                                    const std::vector<PosteriorSamples>& chains,
                                    bool* clamped = nullptr);

DicResult compute_dic(const ModelSpec& spec,
                      const std::vector<PosteriorSamples>& chains,
                      const Dataset& data);

// Posterior-predictive-loss MSPE on the original kcal/day scale:
// (1/n) sum (y_i - yhat_i)^2 with yhat_i the posterior mean of E[y_i | state]
// (mu_i for Normal/Gamma, exp(mu_i + var_y/2) for LogNormal).
double mspe(const ModelSpec& spec, const std::vector<PosteriorSamples>& chains,
            const Dataset& data);

// Variance-standardised predictive residuals: one replicate per retained draw
// per observation; residual_i = (y_i - mean(rep_i)) / sd(rep_i). NaN marks
// observations whose replicate spread is zero.
std::vector<double> predictive_residuals(const ModelSpec& spec,
                                         const std::vector<PosteriorSamples>& chains,
                                         const Dataset& data, RngStream& rng);

// Pearson correlation between sorted residuals and normal quantiles at
// plotting positions (i - 0.5)/n. NaN entries are dropped; requires >= 3
// defined residuals. Returns NaN when the residual variance is zero.
double residual_normal_correlation(std::span<const double> residuals);

struct FitReport {
  ModelSpec spec;
  SamplerConfig sampler;
  std::string data_path;
  std::size_t n = 0;
  DicResult dic;
  double mspe = 0.0;
  std::vector<ParamSummary> summaries;
  std::vector<double> residuals;  // observation order; NaN where undefined
  double resid_normal_corr = 0.0; // NaN when undefined
  ConvergenceReport convergence;
  bool convergence_available = false;
};

// Pools the chains and assembles DIC, MSPE, residual diagnostics, posterior
// summaries and (for >= 2 chains) the convergence report.
FitReport build_fit_report(const ModelSpec& spec, const Dataset& data,
                           const SamplerConfig& config,
                           const std::vector<PosteriorSamples>& chains,
                           const std::string& data_path, double bgr_threshold = 1.1);

// Roman-numeral column of the comparison table: I = no effect, II = additive,
// III = measurement-error / multiplicative.
int effect_column(Effect effect);

struct ComparisonCell {
  bool present = false;
  double mspe = 0.0;
  double dic = 0.0;
  bool dic_defined = true;
  bool negative_pd = false;
  std::vector<std::string> significant;  // coefficient names
};

struct ComparisonTable {
  // rows indexed by family in {Normal, LogNormal, Gamma}, columns I..III
  ComparisonCell cells[3][3];
  bool has_best_dic = false;
  bool has_best_mspe = false;
  int best_dic_row = 0, best_dic_col = 0;
  int best_mspe_row = 0, best_mspe_col = 0;
};

ComparisonTable build_comparison(const std::vector<FitReport>& reports);
std::string render_comparison_text(const ComparisonTable& table);
std::string render_comparison_csv(const ComparisonTable& table);

}  // namespace hiermc
