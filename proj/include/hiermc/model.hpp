#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hiermc/dataset.hpp"

namespace hiermc {

// Outcome families and subject-effect structures. The model lattice is
// family x {None, Additive, model-III form}, where the model-III form is
// MeasErr for Normal/Gamma outcomes and Multiplicative for LogNormal.
enum class Family { Normal, LogNormal, Gamma };
enum class Effect { None, Additive, MeasErr, Multiplicative };

// Prior on the subject-effect dispersion parameter. GelmanUniform puts a
// uniform prior on the effect SD, GammaOverdispersed a gamma prior (with
// gamma hyper-hyperpriors) on the effect variance, UniformShape a uniform
// prior on the shape of the multiplicative Gamma(tau, tau) effect.
enum class EffectPrior { GelmanUniform, GammaOverdispersed, UniformShape };

const char* to_string(Family f);
const char* to_string(Effect e);
const char* to_string(EffectPrior p);

struct GammaHyper {
  double a1_shape = 10.0;
  double a1_rate = 0.1;
  double a2_shape = 1.0;
  double a2_rate = 0.01;
};

struct GammaShapePrior {
  double shape = 0.1;
  double rate = 0.001;
};

struct PriorConfig {
  double b_beta = 1000.0;        // uniform bound on each coefficient prior SD
  double b_eps = 1000.0;         // uniform bound on the additive effect SD
  double b_y = 250.0;            // uniform bound on the outcome SD
  GammaHyper gamma_hyper{};      // hyper-hyperpriors for the overdispersed variant
  double mult_tau_bound = 500.0; // uniform bound on the multiplicative effect shape
  GammaShapePrior r_y_prior{};   // prior for the Gamma-family shape

  void validate() const;  // throws std::invalid_argument
};

// One cell of the model lattice plus its prior hierarchy. Immutable;
// invalid combinations are rejected at construction.
class ModelSpec {
 public:
  ModelSpec() = default;  // Normal outcome, no subject effects
  ModelSpec(Family family, Effect effect, bool include_interaction = true,
            std::optional<EffectPrior> effect_prior = std::nullopt,
            PriorConfig priors = {});

  Family family() const { return family_; }
  Effect effect() const { return effect_; }
  bool include_interaction() const { return include_interaction_; }
  std::optional<EffectPrior> effect_prior() const { return effect_prior_; }
  const PriorConfig& priors() const { return priors_; }

  std::size_t n_beta() const { return include_interaction_ ? 5 : 4; }
  bool has_effects() const { return effect_ != Effect::None; }
  bool multiplicative() const { return effect_ == Effect::Multiplicative; }
  bool has_var_y() const { return family_ != Family::Gamma; }
  bool has_r_y() const { return family_ == Family::Gamma; }
  bool has_overdispersed_hyper() const {
    return effect_prior_ == EffectPrior::GammaOverdispersed;
  }
  // Covariate entering the DLW slope: log(x1) for LogNormal, x1 otherwise.
  double t_value(const Dataset& data, std::size_t i) const;

 private:
  Family family_ = Family::Normal;
  Effect effect_ = Effect::None;
  bool include_interaction_ = true;
  std::optional<EffectPrior> effect_prior_{};
  PriorConfig priors_{};
};

// One full point in parameter space. Fields not used by a spec are ignored.
// var_eps holds the effect variance for Additive/MeasErr and the Gamma(tau,
// tau) shape for Multiplicative.
struct ParameterState {
  std::vector<double> beta;
  std::vector<double> var_beta;
  std::vector<double> eps;
  double var_y = 0.0;
  double var_eps = 0.0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double r_y = 0.0;
};

double linear_predictor(const ModelSpec& spec, const ParameterState& state,
                        const Dataset& data, std::size_t i);

// One observation's contribution to the log-likelihood; -inf where the family
// cannot support the state (e.g. Gamma with mu_i <= 0).
double obs_log_likelihood(const ModelSpec& spec, const ParameterState& state,
                          const Dataset& data, std::size_t i);

double log_likelihood(const ModelSpec& spec, const ParameterState& state,
                      const Dataset& data);

// Prior log-density of one subject effect value under the spec's effect
// distribution; -inf outside support.
double effect_logpdf(const ModelSpec& spec, const ParameterState& state, double eps);

// Unnormalised log posterior over the sampled parameterisation (SDs for
// uniform-on-SD hyperpriors, variances/shapes elsewhere). Uniform hyperprior
// factors are constant inside their support and contribute zero; any support
// violation yields -inf, never a throw.
double log_joint(const ModelSpec& spec, const ParameterState& state,
                 const Dataset& data);

}  // namespace hiermc
