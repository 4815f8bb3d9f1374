#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "hiermc/errors.hpp"
#include "hiermc/rng.hpp"

namespace hiermc {

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
};

// Univariate slice sampler: stepping out then shrinkage (Neal 2003, Fig. 3/5),
// with the stepping-out budget split at random so the capped version remains a
// valid transition kernel. logdensity may return -inf; it must be finite at
// `current`. Never returns a point whose log density is -inf.
template <typename F>
double slice_sample_scalar(F&& logdensity, double current, double width,
                           RngStream& rng, Interval support = {}) {
  if (!(width > 0.0)) {
    throw std::invalid_argument("slice_sample_scalar: width must be > 0");
  }
  if (!(support.lo < support.hi)) {
    throw std::invalid_argument("slice_sample_scalar: empty support interval");
  }
  const double g0 = logdensity(current);
  if (!std::isfinite(g0)) {
    throw SamplerFault("", 0, "slice start point has non-finite log density");
  }
  const double logy = g0 + std::log(rng.next_unit());

  const double u = width * rng.next_unit();
  double left = current - u;
  double right = current + (width - u);
  if (left < support.lo) left = support.lo;
  if (right > support.hi) right = support.hi;

  constexpr int kMaxSteps = 1000;
  int budget_left = static_cast<int>(kMaxSteps * rng.next_unit());
  int budget_right = kMaxSteps - 1 - budget_left;
  while (budget_left-- > 0 && left > support.lo && logdensity(left) > logy) {
    left -= width;
  }
  while (budget_right-- > 0 && right < support.hi && logdensity(right) > logy) {
    right += width;
  }
  if (left < support.lo) left = support.lo;
  if (right > support.hi) right = support.hi;

  for (int contraction = 0; contraction < 1000; ++contraction) {
    const double x = left + (right - left) * rng.next_unit();
    if (logdensity(x) >= logy) return x;
    if (x < current) {
      left = x;
    } else {
      right = x;
    }
  }
  throw SamplerFault("", 0,
                     "slice shrinkage failed to find an in-slice point after "
                     "1000 contractions");
}

}  // namespace hiermc
