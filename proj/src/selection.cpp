#include "hiermc/selection.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "hiermc/distributions.hpp"

namespace hiermc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kPosInf = std::numeric_limits<double>::infinity();

std::size_t pooled_size(const std::vector<PosteriorSamples>& chains) {
  std::size_t total = 0;
  for (const auto& c : chains) total += c.draws.size();
  return total;
}

// Mean that passes identical inputs through exactly, so a degenerate
// posterior (all draws equal) yields pD = 0 exactly.
class ExactMean {
 public:
  void add(double v) {
    if (count_ == 0) {
      first_ = v;
    } else if (v != first_) {
      constant_ = false;
    }
    sum_ += v;
    ++count_;
  }
  double value() const {
    if (count_ == 0) return kNaN;
    return constant_ ? first_ : sum_ / static_cast<double>(count_);
  }

 private:
  double sum_ = 0.0;
  double first_ = 0.0;
  std::size_t count_ = 0;
  bool constant_ = true;
};

template <typename Extract>
double pooled_mean(const std::vector<PosteriorSamples>& chains, Extract&& get) {
  ExactMean m;
  for (const auto& chain : chains) {
    for (const ParameterState& ps : chain.draws) m.add(get(ps));
  }
  return m.value();
}

template <typename Extract>
double pooled_sd_scale_mean(const std::vector<PosteriorSamples>& chains,
                            Extract&& get) {
  ExactMean m;
  bool constant = true;
  double first = 0.0;
  bool started = false;
  for (const auto& chain : chains) {
    for (const ParameterState& ps : chain.draws) {
      const double v = get(ps);
      if (!started) {
        first = v;
        started = true;
      } else if (v != first) {
        constant = false;
      }
      m.add(std::sqrt(v));
    }
  }
  if (constant) return first;  // avoid the sqrt/square round trip
  const double s = m.value();
  return s * s;
}

}  // namespace

double deviance(const ModelSpec& spec, const ParameterState& state,
                const Dataset& data) {
  const double ll = log_likelihood(spec, state, data);
  return std::isfinite(ll) ? -2.0 * ll : kPosInf;
}

ParameterState posterior_mean_state(const ModelSpec& spec,
                                    const std::vector<PosteriorSamples>& chains,
                                    bool* clamped) {
  if (pooled_size(chains) == 0) {
    throw std::invalid_argument("posterior_mean_state: no draws");
  }
  bool did_clamp = false;
  const PriorConfig& pc = spec.priors();
  const std::size_t p = spec.n_beta();
  ParameterState mean;
  mean.beta.resize(p);
  mean.var_beta.resize(p);
  for (std::size_t k = 0; k < p; ++k) {
    mean.beta[k] = pooled_mean(chains, [k](const ParameterState& ps) { return ps.beta[k]; });
    mean.var_beta[k] =
        pooled_sd_scale_mean(chains, [k](const ParameterState& ps) { return ps.var_beta[k]; });
  }
  if (spec.has_var_y()) {
    mean.var_y = pooled_sd_scale_mean(chains, [](const ParameterState& ps) { return ps.var_y; });
  }
  if (spec.has_effects()) {
    const std::size_t n = chains.front().draws.front().eps.size();
    mean.eps.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      mean.eps[i] = pooled_mean(chains, [i](const ParameterState& ps) { return ps.eps[i]; });
    }
    if (spec.multiplicative()) {
      mean.var_eps = pooled_mean(chains, [](const ParameterState& ps) { return ps.var_eps; });
    } else {
      mean.var_eps =
          pooled_sd_scale_mean(chains, [](const ParameterState& ps) { return ps.var_eps; });
    }
    if (spec.has_overdispersed_hyper()) {
      mean.alpha1 = pooled_mean(chains, [](const ParameterState& ps) { return ps.alpha1; });
      mean.alpha2 = pooled_mean(chains, [](const ParameterState& ps) { return ps.alpha2; });
    }
  }
  if (spec.has_r_y()) {
    mean.r_y = pooled_mean(chains, [](const ParameterState& ps) { return ps.r_y; });
  }

  // Averaging cannot leave a convex support, but guard the uniform bounds
  // against floating-point edge cases anyway.
  auto clamp_sd = [&did_clamp](double var, double bound) {
    if (std::sqrt(var) >= bound) {
      did_clamp = true;
      const double s = 0.999999 * bound;
      return s * s;
    }
    return var;
  };
  for (std::size_t k = 0; k < p; ++k) {
    mean.var_beta[k] = clamp_sd(mean.var_beta[k], pc.b_beta);
  }
  if (spec.has_var_y()) mean.var_y = clamp_sd(mean.var_y, pc.b_y);
  if (spec.has_effects()) {
    if (spec.multiplicative()) {
      if (mean.var_eps >= pc.mult_tau_bound) {
        did_clamp = true;
        mean.var_eps = 0.999999 * pc.mult_tau_bound;
      }
    } else if (!spec.has_overdispersed_hyper()) {
      mean.var_eps = clamp_sd(mean.var_eps, pc.b_eps);
    }
  }
  if (clamped != nullptr) *clamped = did_clamp;
  return mean;
}

DicResult compute_dic(const ModelSpec& spec,
                      const std::vector<PosteriorSamples>& chains,
                      const Dataset& data) {
  if (pooled_size(chains) < 2) {
    throw std::invalid_argument("compute_dic: need at least 2 pooled draws");
  }
  DicResult result;
  ExactMean dbar;
  for (const auto& chain : chains) {
    for (double d : chain.deviance_trace) dbar.add(d);
  }
  result.dbar = dbar.value();
  const ParameterState mean_state =
      posterior_mean_state(spec, chains, &result.theta_bar_clamped);
  result.d_at_mean = deviance(spec, mean_state, data);
  if (!std::isfinite(result.d_at_mean)) {
    result.dic_defined = false;
    result.pd = kNaN;
    result.dic = kNaN;
    return result;
  }
  result.pd = result.dbar - result.d_at_mean;
  result.dic = result.dbar + result.pd;
  result.negative_pd = result.pd < 0.0;
  return result;
}

double mspe(const ModelSpec& spec, const std::vector<PosteriorSamples>& chains,
            const Dataset& data) {
  const std::size_t n_draws = pooled_size(chains);
  if (n_draws == 0) throw std::invalid_argument("mspe: need at least 1 draw");
  const std::size_t n = data.n();
  std::vector<double> yhat(n, 0.0);
  for (const auto& chain : chains) {
    for (const ParameterState& ps : chain.draws) {
      for (std::size_t i = 0; i < n; ++i) {
        const double mu = linear_predictor(spec, ps, data, i);
        const double expected = spec.family() == Family::LogNormal
                                    ? std::exp(mu + 0.5 * ps.var_y)
                                    : mu;
        yhat[i] += expected;
      }
    }
  }
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = data.y()[i] - yhat[i] / static_cast<double>(n_draws);
    total += r * r;
  }
  return total / static_cast<double>(n);
}

std::vector<double> predictive_residuals(const ModelSpec& spec,
                                         const std::vector<PosteriorSamples>& chains,
                                         const Dataset& data, RngStream& rng) {
  if (pooled_size(chains) < 2) {
    throw std::invalid_argument("predictive_residuals: need at least 2 draws");
  }
  const std::size_t n = data.n();
  // Welford accumulators over replicates, per observation.
  std::vector<double> mean(n, 0.0), m2(n, 0.0);
  std::size_t count = 0;
  for (const auto& chain : chains) {
    for (const ParameterState& ps : chain.draws) {
      ++count;
      for (std::size_t i = 0; i < n; ++i) {
        const double mu = linear_predictor(spec, ps, data, i);
        double rep = 0.0;
        switch (spec.family()) {
          case Family::Normal:
            rep = sample_normal(rng, mu, ps.var_y);
            break;
          case Family::LogNormal:
            rep = std::exp(sample_normal(rng, mu, ps.var_y));
            break;
          case Family::Gamma:
            rep = sample_gamma(rng, ps.r_y, ps.r_y / mu);
            break;
        }
        const double delta = rep - mean[i];
        mean[i] += delta / static_cast<double>(count);
        m2[i] += delta * (rep - mean[i]);
      }
    }
  }
  std::vector<double> residuals(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double var = m2[i] / static_cast<double>(count - 1);
    const double sd = std::sqrt(var);
    residuals[i] = sd > 0.0 ? (data.y()[i] - mean[i]) / sd : kNaN;
  }
  return residuals;
}

double residual_normal_correlation(std::span<const double> residuals) {
  std::vector<double> defined;
  defined.reserve(residuals.size());
  for (double r : residuals) {
    if (!std::isnan(r)) defined.push_back(r);
  }
  const std::size_t m = defined.size();
  if (m < 3) {
    throw std::invalid_argument(
        "residual_normal_correlation: need at least 3 defined residuals");
  }
  std::sort(defined.begin(), defined.end());
  std::vector<double> quantiles(m);
  for (std::size_t i = 0; i < m; ++i) {
    quantiles[i] =
        normal_quantile((static_cast<double>(i) + 0.5) / static_cast<double>(m));
  }
  double mr = 0.0, mq = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mr += defined[i];
    mq += quantiles[i];
  }
  mr /= static_cast<double>(m);
  mq /= static_cast<double>(m);
  double srq = 0.0, srr = 0.0, sqq = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double dr = defined[i] - mr;
    const double dq = quantiles[i] - mq;
    srq += dr * dq;
    srr += dr * dr;
    sqq += dq * dq;
  }
  if (srr == 0.0) return kNaN;
  return srq / std::sqrt(srr * sqq);
}

FitReport build_fit_report(const ModelSpec& spec, const Dataset& data,
                           const SamplerConfig& config,
                           const std::vector<PosteriorSamples>& chains,
                           const std::string& data_path, double bgr_threshold) {
  FitReport report;
  report.spec = spec;
  report.sampler = config;
  report.data_path = data_path;
  report.n = data.n();
  report.dic = compute_dic(spec, chains, data);
  report.mspe = mspe(spec, chains, data);

  for (const std::string& name : monitored_names(spec)) {
    std::vector<double> pooled;
    for (const PosteriorSamples& chain : chains) {
      const std::vector<double> trace = monitored_trace(chain, name);
      pooled.insert(pooled.end(), trace.begin(), trace.end());
    }
    report.summaries.push_back(summarize(pooled, name));
  }

  // A dedicated stream keeps replicate draws clear of the chain streams.
  constexpr std::uint64_t kResidualStream = 1u << 20;
  RngStream resid_rng(config.seed, kResidualStream);
  report.residuals = predictive_residuals(spec, chains, data, resid_rng);
  try {
    report.resid_normal_corr = residual_normal_correlation(report.residuals);
  } catch (const std::invalid_argument&) {
    report.resid_normal_corr = kNaN;
  }

  if (chains.size() >= 2) {
    report.convergence = check_convergence(chains, bgr_threshold);
    report.convergence_available = true;
  } else {
    report.convergence.threshold = bgr_threshold;
    report.convergence_available = false;
  }
  return report;
}

int effect_column(Effect effect) {
  switch (effect) {
    case Effect::None: return 0;
    case Effect::Additive: return 1;
    case Effect::MeasErr:
    case Effect::Multiplicative: return 2;
  }
  return 0;
}

namespace {

int family_row(Family family) {
  switch (family) {
    case Family::Normal: return 0;
    case Family::LogNormal: return 1;
    case Family::Gamma: return 2;
  }
  return 0;
}

const char* kRowNames[3] = {"normal", "lognormal", "gamma"};
const char* kColNames[3] = {"I", "II", "III"};

std::string format_value(double v) {
  if (std::isnan(v)) return "undef";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += ",";
    out += parts[i];
  }
  return out.empty() ? "-" : out;
}

}  // namespace

ComparisonTable build_comparison(const std::vector<FitReport>& reports) {
  if (reports.empty()) {
    throw std::invalid_argument("build_comparison: need at least 1 report");
  }
  ComparisonTable table;
  for (const FitReport& report : reports) {
    const int row = family_row(report.spec.family());
    const int col = effect_column(report.spec.effect());
    ComparisonCell& cell = table.cells[row][col];
    cell.present = true;
    cell.mspe = report.mspe;
    cell.dic = report.dic.dic;
    cell.dic_defined = report.dic.dic_defined;
    cell.negative_pd = report.dic.negative_pd;
    cell.significant.clear();
    for (const ParamSummary& s : report.summaries) {
      if (s.significant && s.name.rfind("beta", 0) == 0) {
        cell.significant.push_back(s.name);
      }
    }
  }
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      const ComparisonCell& cell = table.cells[r][c];
      if (!cell.present) continue;
      if (cell.dic_defined &&
          (!table.has_best_dic || cell.dic < table.cells[table.best_dic_row][table.best_dic_col].dic)) {
        table.has_best_dic = true;
        table.best_dic_row = r;
        table.best_dic_col = c;
      }
      if (!table.has_best_mspe ||
          cell.mspe < table.cells[table.best_mspe_row][table.best_mspe_col].mspe) {
        table.has_best_mspe = true;
        table.best_mspe_row = r;
        table.best_mspe_col = c;
      }
    }
  }
  return table;
}

std::string render_comparison_text(const ComparisonTable& table) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-10s %-24s %-24s %-24s\n", "", "I", "II", "III");
  out += line;
  std::snprintf(line, sizeof(line), "%-10s %-11s %-12s %-11s %-12s %-11s %-12s\n",
                "family", "MSPE", "DIC", "MSPE", "DIC", "MSPE", "DIC");
  out += line;
  bool any_negative_pd = false;
  for (int r = 0; r < 3; ++r) {
    bool row_present = false;
    for (int c = 0; c < 3; ++c) row_present = row_present || table.cells[r][c].present;
    if (!row_present) continue;
    std::string cols[3][2];
    std::string sig[3];
    for (int c = 0; c < 3; ++c) {
      const ComparisonCell& cell = table.cells[r][c];
      if (!cell.present) {
        cols[c][0] = "-";
        cols[c][1] = "-";
        sig[c] = "";
        continue;
      }
      std::string mspe_text = format_value(cell.mspe);
      if (table.has_best_mspe && table.best_mspe_row == r && table.best_mspe_col == c) {
        mspe_text = "[" + mspe_text + "]";
      }
      std::string dic_text = cell.dic_defined ? format_value(cell.dic) : "undef";
      if (table.has_best_dic && table.best_dic_row == r && table.best_dic_col == c) {
        dic_text = "[" + dic_text + "]";
      }
      if (cell.negative_pd) {
        dic_text += "*";
        any_negative_pd = true;
      }
      cols[c][0] = mspe_text;
      cols[c][1] = dic_text;
      sig[c] = join(cell.significant);
    }
    std::snprintf(line, sizeof(line), "%-10s %-11s %-12s %-11s %-12s %-11s %-12s\n",
                  kRowNames[r], cols[0][0].c_str(), cols[0][1].c_str(),
                  cols[1][0].c_str(), cols[1][1].c_str(), cols[2][0].c_str(),
                  cols[2][1].c_str());
    out += line;
    std::snprintf(line, sizeof(line), "%-10s %-24s %-24s %-24s\n", "  signif.",
                  sig[0].c_str(), sig[1].c_str(), sig[2].c_str());
    out += line;
  }
  out += "[] lowest DIC / lowest MSPE among fitted cells\n";
  if (any_negative_pd) {
    out += "*  negative pD: the DIC cannot be fully relied on for this cell\n";
  }
  return out;
}

std::string render_comparison_csv(const ComparisonTable& table) {
  std::string out = "family,effect,mspe,dic,dic_defined,negative_pd,significant\n";
  char line[256];
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      const ComparisonCell& cell = table.cells[r][c];
      if (!cell.present) continue;
      std::string sig;
      for (std::size_t i = 0; i < cell.significant.size(); ++i) {
        if (i > 0) sig += ";";
        sig += cell.significant[i];
      }
      std::snprintf(line, sizeof(line), "%s,%s,%.17g,%.17g,%d,%d,%s\n", kRowNames[r],
                    kColNames[c], cell.mspe, cell.dic, cell.dic_defined ? 1 : 0,
                    cell.negative_pd ? 1 : 0, sig.c_str());
      out += line;
    }
  }
  return out;
}

}  // namespace hiermc
