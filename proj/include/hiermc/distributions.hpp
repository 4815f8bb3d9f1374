#pragma once

#include "hiermc/rng.hpp"

namespace hiermc {

inline constexpr double kLogTwoPi = 1.8378770664093454836;

// log N(x | mean, variance). The second argument is always a variance,
// never a precision.
double normal_logpdf(double x, double mean, double variance);

// log Gamma(x | shape, rate); mean = shape/rate.
double gamma_logpdf(double x, double shape, double rate);

// Standard normal CDF and its inverse. normal_quantile is a rational
// approximation polished by Halley steps against the erfc-based CDF.
double normal_cdf(double x);
double normal_quantile(double p);

double sample_normal(RngStream& rng, double mean, double variance);
double sample_gamma(RngStream& rng, double shape, double rate);
double sample_uniform(RngStream& rng, double lo, double hi);

}  // namespace hiermc
