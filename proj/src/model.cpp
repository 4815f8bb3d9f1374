#include "hiermc/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "hiermc/distributions.hpp"

namespace hiermc {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

const char* to_string(Family f) {
  switch (f) {
    case Family::Normal: return "normal";
    case Family::LogNormal: return "lognormal";
    case Family::Gamma: return "gamma";
  }
  return "?";
}

const char* to_string(Effect e) {
  switch (e) {
    case Effect::None: return "none";
    case Effect::Additive: return "additive";
    case Effect::MeasErr: return "measerr";
    case Effect::Multiplicative: return "multiplicative";
  }
  return "?";
}

const char* to_string(EffectPrior p) {
  switch (p) {
    case EffectPrior::GelmanUniform: return "gelman";
    case EffectPrior::GammaOverdispersed: return "gamma-od";
    case EffectPrior::UniformShape: return "uniform-shape";
  }
  return "?";
}

void PriorConfig::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(b_beta) || !positive(b_eps) || !positive(b_y) ||
      !positive(mult_tau_bound)) {
    throw std::invalid_argument("prior config: all uniform bounds must be > 0");
  }
  if (!positive(gamma_hyper.a1_shape) || !positive(gamma_hyper.a1_rate) ||
      !positive(gamma_hyper.a2_shape) || !positive(gamma_hyper.a2_rate) ||
      !positive(r_y_prior.shape) || !positive(r_y_prior.rate)) {
    throw std::invalid_argument("prior config: gamma prior parameters must be > 0");
  }
}

ModelSpec::ModelSpec(Family family, Effect effect, bool include_interaction,
                     std::optional<EffectPrior> effect_prior, PriorConfig priors)
    : family_(family),
      effect_(effect),
      include_interaction_(include_interaction),
      effect_prior_(effect_prior),
      priors_(priors) {
  priors_.validate();
  switch (effect_) {
    case Effect::None:
      if (effect_prior_.has_value()) {
        throw std::invalid_argument(
            "model spec: effect prior is meaningless without subject effects");
      }
      break;
    case Effect::Additive:
    case Effect::MeasErr:
      if (effect_ == Effect::MeasErr && family_ == Family::LogNormal) {
        throw std::invalid_argument(
            "model spec: the log-normal model III uses the multiplicative effect");
      }
      if (!effect_prior_.has_value()) effect_prior_ = EffectPrior::GelmanUniform;
      if (*effect_prior_ == EffectPrior::UniformShape) {
        throw std::invalid_argument(
            "model spec: uniform-shape prior applies only to multiplicative effects");
      }
      break;
    case Effect::Multiplicative:
      if (family_ != Family::LogNormal) {
        throw std::invalid_argument(
            "model spec: multiplicative effects require the log-normal family");
      }
      if (!effect_prior_.has_value()) effect_prior_ = EffectPrior::UniformShape;
      if (*effect_prior_ != EffectPrior::UniformShape) {
        throw std::invalid_argument(
            "model spec: multiplicative effects take the uniform-shape prior");
      }
      break;
  }
}

double ModelSpec::t_value(const Dataset& data, std::size_t i) const {
  const double x = data.x1()[i];
  return family_ == Family::LogNormal ? std::log(x) : x;
}

double linear_predictor(const ModelSpec& spec, const ParameterState& state,
                        const Dataset& data, std::size_t i) {
  if (i >= data.n()) {
    throw std::out_of_range("linear_predictor: observation index out of range");
  }
  const auto& b = state.beta;
  const double t = spec.t_value(data, i);
  double slope_arg = t;
  switch (spec.effect()) {
    case Effect::None:
    case Effect::Additive:
      break;
    case Effect::MeasErr:
      slope_arg = t + state.eps[i];
      break;
    case Effect::Multiplicative:
      slope_arg = t * state.eps[i];
      break;
  }
  double mu = b[0] + b[1] * slope_arg + b[2] * data.x2()[i] + b[3] * data.x3()[i];
  if (spec.include_interaction()) {
    mu += b[4] * data.x2()[i] * data.x3()[i];
  }
  if (spec.effect() == Effect::Additive) {
    mu += state.eps[i];
  }
  return mu;
}

double obs_log_likelihood(const ModelSpec& spec, const ParameterState& state,
                          const Dataset& data, std::size_t i) {
  const double mu = linear_predictor(spec, state, data, i);
  if (!std::isfinite(mu)) return kNegInf;
  switch (spec.family()) {
    case Family::Normal:
      if (!(state.var_y > 0.0)) return kNegInf;
      return normal_logpdf(data.y()[i], mu, state.var_y);
    case Family::LogNormal:
      // Density of log(y); the deviance lives on the log(y) scale.
      if (!(state.var_y > 0.0)) return kNegInf;
      return normal_logpdf(std::log(data.y()[i]), mu, state.var_y);
    case Family::Gamma:
      if (!(state.r_y > 0.0) || !(mu > 0.0)) return kNegInf;
      return gamma_logpdf(data.y()[i], state.r_y, state.r_y / mu);
  }
  return kNegInf;
}

double log_likelihood(const ModelSpec& spec, const ParameterState& state,
                      const Dataset& data) {
  double total = 0.0;
  for (std::size_t i = 0; i < data.n(); ++i) {
    const double term = obs_log_likelihood(spec, state, data, i);
    if (term == kNegInf) return kNegInf;
    total += term;
  }
  return total;
}

double effect_logpdf(const ModelSpec& spec, const ParameterState& state, double eps) {
  if (spec.multiplicative()) {
    if (!(eps > 0.0) || !(state.var_eps > 0.0)) return kNegInf;
    return gamma_logpdf(eps, state.var_eps, state.var_eps);
  }
  if (!(state.var_eps > 0.0)) return kNegInf;
  return normal_logpdf(eps, 0.0, state.var_eps);
}

namespace {

// Support checks for everything outside the likelihood. Uniform-on-SD and
// uniform-on-shape priors only constrain; their density is constant inside.
bool in_prior_support(const ModelSpec& spec, const ParameterState& state) {
  const PriorConfig& pc = spec.priors();
  if (state.beta.size() != spec.n_beta() || state.var_beta.size() != spec.n_beta()) {
    return false;
  }
  for (double v : state.beta) {
    if (!std::isfinite(v)) return false;
  }
  for (double v : state.var_beta) {
    if (!(v > 0.0) || !(std::sqrt(v) < pc.b_beta)) return false;
  }
  if (spec.has_var_y()) {
    if (!(state.var_y > 0.0) || !(std::sqrt(state.var_y) < pc.b_y)) return false;
  }
  if (spec.has_effects()) {
    if (state.eps.size() == 0) return false;
    if (spec.multiplicative()) {
      if (!(state.var_eps > 0.0) || !(state.var_eps < pc.mult_tau_bound)) return false;
      for (double e : state.eps) {
        if (!(e > 0.0)) return false;
      }
    } else if (spec.has_overdispersed_hyper()) {
      if (!(state.var_eps > 0.0) || !(state.alpha1 > 0.0) || !(state.alpha2 > 0.0)) {
        return false;
      }
    } else {
      if (!(state.var_eps > 0.0) || !(std::sqrt(state.var_eps) < pc.b_eps)) {
        return false;
      }
    }
  }
  if (spec.has_r_y() && !(state.r_y > 0.0)) return false;
  return true;
}

}  // namespace

double log_joint(const ModelSpec& spec, const ParameterState& state,
                 const Dataset& data) {
  if (!in_prior_support(spec, state)) return kNegInf;

  const double ll = log_likelihood(spec, state, data);
  if (ll == kNegInf) return kNegInf;
  double total = ll;

  for (std::size_t k = 0; k < state.beta.size(); ++k) {
    total += normal_logpdf(state.beta[k], 0.0, state.var_beta[k]);
  }
  if (spec.has_effects()) {
    for (double e : state.eps) {
      const double term = effect_logpdf(spec, state, e);
      if (term == kNegInf) return kNegInf;
      total += term;
    }
    if (spec.has_overdispersed_hyper()) {
      const GammaHyper& gh = spec.priors().gamma_hyper;
      total += gamma_logpdf(state.var_eps, state.alpha1, state.alpha2);
      total += gamma_logpdf(state.alpha1, gh.a1_shape, gh.a1_rate);
      total += gamma_logpdf(state.alpha2, gh.a2_shape, gh.a2_rate);
    }
  }
  if (spec.has_r_y()) {
    const GammaShapePrior& rp = spec.priors().r_y_prior;
    total += gamma_logpdf(state.r_y, rp.shape, rp.rate);
  }
  return total;
}

}  // namespace hiermc
