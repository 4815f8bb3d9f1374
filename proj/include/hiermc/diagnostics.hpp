#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hiermc/sampler.hpp"

namespace hiermc {

// Raised by bgr_statistic when every chain is constant (zero within-chain
// variance); surfaced in convergence reports instead of aborting them.
class DegenerateTraceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ParamSummary {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;
  double q025 = 0.0;
  double q50 = 0.0;
  double q975 = 0.0;
  bool significant = false;  // 95% equal-tailed interval excludes zero
};

// Mean, n-1 SD and linearly interpolated empirical quantiles of one trace.
ParamSummary summarize(std::span<const double> trace, std::string name);

// Brooks-Gelman-Rubin potential scale reduction sqrt(V_hat / W) with
// W  = mean of within-chain sample variances,
// B/n = sample variance of the chain means,
// V_hat = (n-1)/n * W + B/n.
// Requires >= 2 chains of equal length >= 2; throws DegenerateTraceError
// when W == 0.
double bgr_statistic(const std::vector<std::vector<double>>& chains);

struct ConvergenceEntry {
  std::string name;
  double r_hat = 0.0;      // NaN for degenerate traces
  bool pass = false;
  bool degenerate = false;
};

struct ConvergenceReport {
  double threshold = 1.1;
  bool pass = false;  // all defined R-hats below threshold
  std::vector<ConvergenceEntry> entries;
};

// R-hat for every monitored scalar: each coefficient, each dispersion
// parameter on its sampled scale, the Gamma shape when present, and the
// deviance trace as the predictive-loss aggregate.
ConvergenceReport check_convergence(const std::vector<PosteriorSamples>& chains,
                                    double threshold = 1.1);

// Names and per-draw values of the monitored scalars for one chain, in the
// order check_convergence uses them.
std::vector<std::string> monitored_names(const ModelSpec& spec);
std::vector<double> monitored_trace(const PosteriorSamples& samples,
                                    const std::string& name);

}  // namespace hiermc
