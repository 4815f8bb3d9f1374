#include "hiermc/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "hiermc/distributions.hpp"
#include "hiermc/errors.hpp"

namespace hiermc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kPosInf = std::numeric_limits<double>::infinity();

enum class CoordKind {
  Beta,         // regression coefficient, unbounded
  SBeta,        // coefficient prior SD, uniform on (0, B_beta)
  SY,           // outcome SD, uniform on (0, B_y)
  Eps,          // subject effect
  SEps,         // effect SD, uniform on (0, B_eps)
  TauEpsVar,    // effect variance under the overdispersed gamma prior
  TauEpsShape,  // multiplicative effect shape, uniform on (0, mult_tau_bound)
  Alpha1,
  Alpha2,
  RY,           // Gamma-family shape
};

struct Coord {
  CoordKind kind;
  std::size_t index;
  std::string name;
  Interval support;
};

std::vector<Coord> build_coords(const ModelSpec& spec, std::size_t n) {
  const PriorConfig& pc = spec.priors();
  std::vector<Coord> coords;
  const std::size_t p = spec.n_beta();
  coords.reserve(2 * p + n + 5);
  for (std::size_t k = 0; k < p; ++k) {
    coords.push_back({CoordKind::Beta, k, "beta" + std::to_string(k), {}});
  }
  for (std::size_t k = 0; k < p; ++k) {
    coords.push_back(
        {CoordKind::SBeta, k, "s_beta" + std::to_string(k), {0.0, pc.b_beta}});
  }
  if (spec.has_var_y()) {
    coords.push_back({CoordKind::SY, 0, "s_y", {0.0, pc.b_y}});
  }
  if (spec.has_effects()) {
    for (std::size_t i = 0; i < n; ++i) {
      const Interval sup =
          spec.multiplicative() ? Interval{0.0, kPosInf} : Interval{};
      coords.push_back({CoordKind::Eps, i, "eps[" + std::to_string(i) + "]", sup});
    }
    if (spec.multiplicative()) {
      coords.push_back({CoordKind::TauEpsShape, 0, "tau_eps", {0.0, pc.mult_tau_bound}});
    } else if (spec.has_overdispersed_hyper()) {
      coords.push_back({CoordKind::TauEpsVar, 0, "tau_eps", {0.0, kPosInf}});
      coords.push_back({CoordKind::Alpha1, 0, "alpha1", {0.0, kPosInf}});
      coords.push_back({CoordKind::Alpha2, 0, "alpha2", {0.0, kPosInf}});
    } else {
      coords.push_back({CoordKind::SEps, 0, "s_eps", {0.0, pc.b_eps}});
    }
  }
  if (spec.has_r_y()) {
    coords.push_back({CoordKind::RY, 0, "r_y", {0.0, kPosInf}});
  }
  return coords;
}

double get_coord(const Coord& c, const ParameterState& ps) {
  switch (c.kind) {
    case CoordKind::Beta: return ps.beta[c.index];
    case CoordKind::SBeta: return std::sqrt(ps.var_beta[c.index]);
    case CoordKind::SY: return std::sqrt(ps.var_y);
    case CoordKind::Eps: return ps.eps[c.index];
    case CoordKind::SEps: return std::sqrt(ps.var_eps);
    case CoordKind::TauEpsVar:
    case CoordKind::TauEpsShape: return ps.var_eps;
    case CoordKind::Alpha1: return ps.alpha1;
    case CoordKind::Alpha2: return ps.alpha2;
    case CoordKind::RY: return ps.r_y;
  }
  return 0.0;
}

void set_coord(const Coord& c, ParameterState& ps, double v) {
  switch (c.kind) {
    case CoordKind::Beta: ps.beta[c.index] = v; break;
    case CoordKind::SBeta: ps.var_beta[c.index] = v * v; break;
    case CoordKind::SY: ps.var_y = v * v; break;
    case CoordKind::Eps: ps.eps[c.index] = v; break;
    case CoordKind::SEps: ps.var_eps = v * v; break;
    case CoordKind::TauEpsVar:
    case CoordKind::TauEpsShape: ps.var_eps = v; break;
    case CoordKind::Alpha1: ps.alpha1 = v; break;
    case CoordKind::Alpha2: ps.alpha2 = v; break;
    case CoordKind::RY: ps.r_y = v; break;
  }
}

class SweepRunner {
 public:
  SweepRunner(const ModelSpec& spec, const Dataset& data)
      : spec_(spec), data_(data), coords_(build_coords(spec, data.n())) {}

  const std::vector<Coord>& coords() const { return coords_; }

  void sweep(ParameterState& ps, RngStream& rng, SliceWidths& widths,
             std::size_t iteration) const {
    for (std::size_t k = 0; k < coords_.size(); ++k) {
      const Coord& c = coords_[k];
      const double current = get_coord(c, ps);
      double next = current;
      try {
        if (c.kind == CoordKind::Eps) {
          auto target = [&](double v) {
            return eps_conditional(spec_, ps, data_, c.index, v);
          };
          next = slice_sample_scalar(target, current, widths.width(k), rng, c.support);
        } else {
          auto target = [&](double v) {
            set_coord(c, ps, v);
            return log_joint(spec_, ps, data_);
          };
          next = slice_sample_scalar(target, current, widths.width(k), rng, c.support);
        }
      } catch (const SamplerFault& fault) {
        set_coord(c, ps, current);
        throw SamplerFault(c.name, iteration, fault.what());
      }
      set_coord(c, ps, next);
      widths.observe(k, std::abs(next - current));
    }
  }

 private:
  const ModelSpec& spec_;
  const Dataset& data_;
  std::vector<Coord> coords_;
};

// Least squares of the (possibly log-scale) outcome on the design matrix,
// solved by Gaussian elimination with a tiny ridge so degenerate columns pin
// their coefficient near zero instead of blowing up.
std::vector<double> ols_coefficients(const ModelSpec& spec, const Dataset& data) {
  const std::size_t p = spec.n_beta();
  const std::size_t n = data.n();
  std::vector<double> a(p * p, 0.0);
  std::vector<double> b(p, 0.0);
  std::vector<double> row(p);
  for (std::size_t i = 0; i < n; ++i) {
    row[0] = 1.0;
    row[1] = spec.t_value(data, i);
    row[2] = data.x2()[i];
    row[3] = data.x3()[i];
    if (p == 5) row[4] = data.x2()[i] * data.x3()[i];
    const double z = spec.family() == Family::LogNormal ? std::log(data.y()[i])
                                                        : data.y()[i];
    for (std::size_t r = 0; r < p; ++r) {
      for (std::size_t s = 0; s < p; ++s) a[r * p + s] += row[r] * row[s];
      b[r] += row[r] * z;
    }
  }
  double trace = 0.0;
  for (std::size_t r = 0; r < p; ++r) trace += a[r * p + r];
  const double ridge = 1e-8 * (trace / static_cast<double>(p) + 1.0);
  for (std::size_t r = 0; r < p; ++r) a[r * p + r] += ridge;

  for (std::size_t col = 0; col < p; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < p; ++r) {
      if (std::abs(a[r * p + col]) > std::abs(a[pivot * p + col])) pivot = r;
    }
    if (pivot != col) {
      for (std::size_t s = 0; s < p; ++s) std::swap(a[col * p + s], a[pivot * p + s]);
      std::swap(b[col], b[pivot]);
    }
    const double diag = a[col * p + col];
    for (std::size_t r = col + 1; r < p; ++r) {
      const double factor = a[r * p + col] / diag;
      for (std::size_t s = col; s < p; ++s) a[r * p + s] -= factor * a[col * p + s];
      b[r] -= factor * b[col];
    }
  }
  std::vector<double> beta(p, 0.0);
  for (std::size_t ri = p; ri-- > 0;) {
    double acc = b[ri];
    for (std::size_t s = ri + 1; s < p; ++s) acc -= a[ri * p + s] * beta[s];
    beta[ri] = acc / a[ri * p + ri];
  }
  return beta;
}

double clamp(double v, double lo, double hi) {
  return v < lo ? lo : (v > hi ? hi : v);
}

}  // namespace

void SamplerConfig::validate() const {
  if (iterations == 0) throw std::invalid_argument("sampler config: iterations must be > 0");
  if (burn_in >= iterations) {
    throw std::invalid_argument("sampler config: burn_in must be < iterations");
  }
  if (thin < 1) throw std::invalid_argument("sampler config: thin must be >= 1");
  if (retained_per_chain() < 2) {
    throw std::invalid_argument(
        "sampler config: fewer than 2 retained draws per chain; increase "
        "iterations or reduce thinning");
  }
  if (n_chains < 1) throw std::invalid_argument("sampler config: need at least 1 chain");
  if (!(init_jitter >= 0.0)) {
    throw std::invalid_argument("sampler config: init_jitter must be >= 0");
  }
}

std::vector<std::string> coordinate_names(const ModelSpec& spec, std::size_t n) {
  std::vector<std::string> names;
  for (const Coord& c : build_coords(spec, n)) names.push_back(c.name);
  return names;
}

double eps_conditional(const ModelSpec& spec, ParameterState& state,
                       const Dataset& data, std::size_t i, double value) {
  state.eps[i] = value;
  const double prior = effect_logpdf(spec, state, value);
  if (prior == kNegInf) return kNegInf;
  return obs_log_likelihood(spec, state, data, i) + prior;
}

ParameterState gibbs_sweep(const ModelSpec& spec, ParameterState state,
                           const Dataset& data, RngStream& rng, SliceWidths& widths,
                           std::size_t iteration) {
  SweepRunner runner(spec, data);
  if (widths.size() != runner.coords().size()) {
    throw std::invalid_argument("gibbs_sweep: widths sized for a different model");
  }
  runner.sweep(state, rng, widths, iteration);
  return state;
}

ParameterState initial_state(const ModelSpec& spec, const Dataset& data,
                             RngStream& rng, double init_jitter) {
  const PriorConfig& pc = spec.priors();
  const std::size_t p = spec.n_beta();
  ParameterState ps;
  ps.beta = ols_coefficients(spec, data);
  for (std::size_t k = 0; k < p; ++k) {
    const double scale = 0.2 * std::max(std::abs(ps.beta[k]), 1e-3);
    ps.beta[k] += init_jitter * scale * normal_quantile(rng.next_unit());
  }
  auto jittered_sd = [&](double bound) {
    const double s = 0.1 * bound * std::exp(0.5 * init_jitter * normal_quantile(rng.next_unit()));
    return clamp(s, 1e-6 * bound, 0.999 * bound);
  };
  ps.var_beta.resize(p);
  for (std::size_t k = 0; k < p; ++k) {
    const double s = jittered_sd(pc.b_beta);
    ps.var_beta[k] = s * s;
  }
  if (spec.has_var_y()) {
    const double s = jittered_sd(pc.b_y);
    ps.var_y = s * s;
  }
  if (spec.has_effects()) {
    ps.eps.assign(data.n(), spec.multiplicative() ? 1.0 : 0.0);
    if (spec.multiplicative()) {
      const double t = 0.1 * pc.mult_tau_bound *
                       std::exp(0.5 * init_jitter * normal_quantile(rng.next_unit()));
      ps.var_eps = clamp(t, 1e-3, 0.999 * pc.mult_tau_bound);
    } else if (spec.has_overdispersed_hyper()) {
      const GammaHyper& gh = pc.gamma_hyper;
      auto jittered = [&](double v) {
        return v * std::exp(0.25 * init_jitter * normal_quantile(rng.next_unit()));
      };
      ps.alpha1 = jittered(gh.a1_shape / gh.a1_rate);
      ps.alpha2 = jittered(gh.a2_shape / gh.a2_rate);
      ps.var_eps = jittered(ps.alpha1 / ps.alpha2);
    } else {
      const double s = jittered_sd(pc.b_eps);
      ps.var_eps = s * s;
    }
  }
  if (spec.has_r_y()) {
    const std::size_t n = data.n();
    double mean = 0.0;
    for (double v : data.y()) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : data.y()) ss += (v - mean) * (v - mean);
    const double var = ss / static_cast<double>(n - 1);
    double r = var > 0.0 ? mean * mean / var : 1.0;
    r = clamp(r, 1e-3, 1e6);
    ps.r_y = r * std::exp(0.5 * init_jitter * normal_quantile(rng.next_unit()));
  }

  if (log_joint(spec, ps, data) == kNegInf) {
    // OLS starts can leave the Gamma mean negative somewhere; fall back to a
    // flat mean-only start.
    std::fill(ps.beta.begin(), ps.beta.end(), 0.0);
    double mean = 0.0;
    for (double v : data.y()) {
      mean += spec.family() == Family::LogNormal ? std::log(v) : v;
    }
    ps.beta[0] = mean / static_cast<double>(data.n());
    if (log_joint(spec, ps, data) == kNegInf) {
      throw SamplerFault("initialization", 0,
                         "could not construct an in-support starting state");
    }
  }
  return ps;
}

PosteriorSamples run_chain(const ModelSpec& spec, const Dataset& data,
                           const SamplerConfig& config, std::size_t chain_id) {
  config.validate();
  RngStream rng(config.seed, chain_id);
  ParameterState ps = initial_state(spec, data, rng, config.init_jitter);
  SweepRunner runner(spec, data);
  SliceWidths widths(runner.coords().size());
  if (config.burn_in == 0) widths.freeze();

  PosteriorSamples out;
  out.spec = spec;
  out.chain_id = chain_id;
  out.draws.reserve(config.retained_per_chain());
  out.deviance_trace.reserve(config.retained_per_chain());
  for (std::size_t t = 1; t <= config.iterations; ++t) {
    runner.sweep(ps, rng, widths, t);
    if (t == config.burn_in) widths.freeze();
    if (t > config.burn_in && (t - config.burn_in) % config.thin == 0) {
      out.draws.push_back(ps);
      out.deviance_trace.push_back(-2.0 * log_likelihood(spec, ps, data));
    }
  }
  return out;
}

MultiChainResult run_multi(const ModelSpec& spec, const Dataset& data,
                           const SamplerConfig& config) {
  config.validate();
  std::vector<std::future<PosteriorSamples>> futures;
  futures.reserve(config.n_chains);
  for (std::size_t c = 0; c < config.n_chains; ++c) {
    futures.push_back(std::async(std::launch::async, [&spec, &data, &config, c] {
      return run_chain(spec, data, config, c);
    }));
  }
  MultiChainResult result;
  for (std::size_t c = 0; c < config.n_chains; ++c) {
    try {
      result.chains.push_back(futures[c].get());
    } catch (const SamplerFault& fault) {
      result.faults.push_back({c, fault.coordinate(), fault.iteration(), fault.what()});
    } catch (const std::exception& e) {
      result.faults.push_back({c, "", 0, e.what()});
    }
  }
  return result;
}

}  // namespace hiermc
