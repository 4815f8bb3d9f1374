#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "hiermc/dataset.hpp"
#include "hiermc/model.hpp"
#include "hiermc/rng.hpp"
#include "hiermc/slice.hpp"

namespace hiermc {

struct SamplerConfig {
  std::size_t iterations = 200000;
  std::size_t burn_in = 100000;
  std::size_t thin = 50;
  std::size_t n_chains = 3;
  std::uint64_t seed = 0;
  double init_jitter = 0.5;  // overdispersion scale applied to chain starts

  void validate() const;  // throws std::invalid_argument
  std::size_t retained_per_chain() const { return (iterations - burn_in) / thin; }
};

// Thinned post-burn-in draws from one chain, with the deviance recorded at
// each retained draw.
struct PosteriorSamples {
  ModelSpec spec;
  std::size_t chain_id = 0;
  std::vector<ParameterState> draws;
  std::vector<double> deviance_trace;
};

struct ChainFault {
  std::size_t chain_id = 0;
  std::string coordinate;
  std::size_t iteration = 0;
  std::string message;
};

struct MultiChainResult {
  std::vector<PosteriorSamples> chains;  // successful chains, by chain_id
  std::vector<ChainFault> faults;
  bool ok() const { return faults.empty(); }
};

// Per-coordinate slice widths: 1.0 initially, tracked against observed move
// sizes during burn-in, frozen afterwards.
class SliceWidths {
 public:
  explicit SliceWidths(std::size_t n_coords) : ema_(n_coords, -1.0) {}

  double width(std::size_t k) const {
    const double ema = ema_[k];
    if (ema < 0.0) return 1.0;
    const double w = 2.0 * ema;
    return w > 1e-8 ? w : 1e-8;
  }
  void observe(std::size_t k, double abs_move) {
    if (frozen_ || !(abs_move > 0.0)) return;
    ema_[k] = ema_[k] < 0.0 ? abs_move : 0.9 * ema_[k] + 0.1 * abs_move;
  }
  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }
  std::size_t size() const { return ema_.size(); }

 private:
  std::vector<double> ema_;
  bool frozen_ = false;
};

// Names of every coordinate a sweep updates, in update order: beta0..beta4,
// their prior SDs, the outcome SD, subject effects, the effect dispersion
// parameter(s) and the Gamma-family shape.
std::vector<std::string> coordinate_names(const ModelSpec& spec, std::size_t n);

// Full conditional (up to a constant) for one subject effect; cheap because
// only observation i and the effect prior involve eps_i. Used by the sweep,
// exposed so tests can pin it against log_joint differences.
double eps_conditional(const ModelSpec& spec, ParameterState& state,
                       const Dataset& data, std::size_t i, double value);

// One Gibbs sweep: every active coordinate updated once by slice sampling its
// full conditional under log_joint. Returns the new state (always in
// support). `iteration` only labels fault reports.
ParameterState gibbs_sweep(const ModelSpec& spec, ParameterState state,
                           const Dataset& data, RngStream& rng, SliceWidths& widths,
                           std::size_t iteration = 0);

// Overdispersed chain start: OLS coefficients, effects at their prior mean,
// SDs at 10% of their uniform bound, jittered per chain.
ParameterState initial_state(const ModelSpec& spec, const Dataset& data,
                             RngStream& rng, double init_jitter);

PosteriorSamples run_chain(const ModelSpec& spec, const Dataset& data,
                           const SamplerConfig& config, std::size_t chain_id);

// Independent chains on distinct RNG streams, run concurrently. Chains that
// fault are reported; the rest are returned in chain_id order.
MultiChainResult run_multi(const ModelSpec& spec, const Dataset& data,
                           const SamplerConfig& config);

}  // namespace hiermc
