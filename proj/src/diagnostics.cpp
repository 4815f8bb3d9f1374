#include "hiermc/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hiermc {

namespace {

double mean_of(std::span<const double> v) {
  double total = 0.0;
  for (double x : v) total += x;
  return total / static_cast<double>(v.size());
}

double sample_variance(std::span<const double> v, double mean) {
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(v.size() - 1);
}

double quantile_sorted(const std::vector<double>& sorted, double p) {
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

ParamSummary summarize(std::span<const double> trace, std::string name) {
  if (trace.size() < 2) {
    throw std::invalid_argument("summarize: need at least 2 samples");
  }
  ParamSummary s;
  s.name = std::move(name);
  s.mean = mean_of(trace);
  s.sd = std::sqrt(sample_variance(trace, s.mean));
  std::vector<double> sorted(trace.begin(), trace.end());
  std::sort(sorted.begin(), sorted.end());
  s.q025 = quantile_sorted(sorted, 0.025);
  s.q50 = quantile_sorted(sorted, 0.5);
  s.q975 = quantile_sorted(sorted, 0.975);
  s.significant = (s.q025 > 0.0) || (s.q975 < 0.0);
  return s;
}

double bgr_statistic(const std::vector<std::vector<double>>& chains) {
  const std::size_t m = chains.size();
  if (m < 2) throw std::invalid_argument("bgr_statistic: need at least 2 chains");
  const std::size_t n = chains.front().size();
  if (n < 2) throw std::invalid_argument("bgr_statistic: chains must have length >= 2");
  for (const auto& chain : chains) {
    if (chain.size() != n) {
      throw std::invalid_argument("bgr_statistic: chains must have equal length");
    }
  }
  double w = 0.0;
  std::vector<double> means(m);
  for (std::size_t j = 0; j < m; ++j) {
    means[j] = mean_of(chains[j]);
    w += sample_variance(chains[j], means[j]);
  }
  w /= static_cast<double>(m);
  if (w == 0.0) {
    throw DegenerateTraceError("bgr_statistic: all chains are constant (W = 0)");
  }
  const double grand = mean_of(means);
  const double b_over_n = sample_variance(means, grand);
  const double nn = static_cast<double>(n);
  const double v_hat = (nn - 1.0) / nn * w + b_over_n;
  return std::sqrt(v_hat / w);
}

std::vector<std::string> monitored_names(const ModelSpec& spec) {
  std::vector<std::string> names;
  for (std::size_t k = 0; k < spec.n_beta(); ++k) {
    names.push_back("beta" + std::to_string(k));
  }
  for (std::size_t k = 0; k < spec.n_beta(); ++k) {
    names.push_back("s_beta" + std::to_string(k));
  }
  if (spec.has_var_y()) names.push_back("s_y");
  if (spec.has_effects()) {
    if (spec.multiplicative() || spec.has_overdispersed_hyper()) {
      names.push_back("tau_eps");
    } else {
      names.push_back("s_eps");
    }
    if (spec.has_overdispersed_hyper()) {
      names.push_back("alpha1");
      names.push_back("alpha2");
    }
  }
  if (spec.has_r_y()) names.push_back("r_y");
  names.push_back("deviance");
  return names;
}

std::vector<double> monitored_trace(const PosteriorSamples& samples,
                                    const std::string& name) {
  std::vector<double> trace;
  trace.reserve(samples.draws.size());
  if (name == "deviance") return samples.deviance_trace;
  for (const ParameterState& ps : samples.draws) {
    if (name.rfind("s_beta", 0) == 0) {
      trace.push_back(std::sqrt(ps.var_beta[static_cast<std::size_t>(
          std::stoul(name.substr(6)))]));
    } else if (name.rfind("beta", 0) == 0) {
      trace.push_back(ps.beta[static_cast<std::size_t>(std::stoul(name.substr(4)))]);
    } else if (name == "s_y") {
      trace.push_back(std::sqrt(ps.var_y));
    } else if (name == "s_eps") {
      trace.push_back(std::sqrt(ps.var_eps));
    } else if (name == "tau_eps") {
      trace.push_back(ps.var_eps);
    } else if (name == "alpha1") {
      trace.push_back(ps.alpha1);
    } else if (name == "alpha2") {
      trace.push_back(ps.alpha2);
    } else if (name == "r_y") {
      trace.push_back(ps.r_y);
    } else {
      throw std::invalid_argument("monitored_trace: unknown scalar " + name);
    }
  }
  return trace;
}

ConvergenceReport check_convergence(const std::vector<PosteriorSamples>& chains,
                                    double threshold) {
  if (chains.size() < 2) {
    throw std::invalid_argument("check_convergence: need at least 2 chains");
  }
  ConvergenceReport report;
  report.threshold = threshold;
  report.pass = true;
  for (const std::string& name : monitored_names(chains.front().spec)) {
    std::vector<std::vector<double>> traces;
    traces.reserve(chains.size());
    for (const PosteriorSamples& chain : chains) {
      traces.push_back(monitored_trace(chain, name));
    }
    ConvergenceEntry entry;
    entry.name = name;
    try {
      entry.r_hat = bgr_statistic(traces);
      entry.pass = entry.r_hat < threshold;
      if (!entry.pass) report.pass = false;
    } catch (const DegenerateTraceError&) {
      entry.r_hat = std::numeric_limits<double>::quiet_NaN();
      entry.degenerate = true;
      entry.pass = true;  // listed, not fatal
    }
    report.entries.push_back(std::move(entry));
  }
  return report;
}

}  // namespace hiermc
