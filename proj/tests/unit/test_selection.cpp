#include <doctest.h>

#include <cmath>
#include <limits>

#include "hiermc/distributions.hpp"
#include "hiermc/selection.hpp"
#include "hiermc/simulate.hpp"

#include "test_support.hpp"

using namespace hiermc;
using test_support::make_dataset;
using test_support::make_state;

namespace {

// Two observations, flat covariates: everything is hand-computable.
Dataset tiny_data() { return Dataset({1.0, 3.0}, {1.0, 1.0}, {0.0, 0.0}, {0.0, 0.0}); }

ParameterState intercept_state(double b0, double var_y) {
  ParameterState ps;
  ps.beta = {b0, 0.0, 0.0, 0.0, 0.0};
  ps.var_beta.assign(5, 100.0);
  ps.var_y = var_y;
  return ps;
}

PosteriorSamples samples_of(const ModelSpec& spec,
                            std::vector<ParameterState> draws,
                            const Dataset& data) {
  PosteriorSamples s;
  s.spec = spec;
  for (const ParameterState& ps : draws) {
    s.deviance_trace.push_back(deviance(spec, ps, data));
  }
  s.draws = std::move(draws);
  return s;
}

}  // namespace

TEST_CASE("deviance closed forms and additivity") {
  ModelSpec spec(Family::Normal, Effect::None);
  const Dataset data({5.0, 5.0}, {2.0, 2.0}, {0.0, 0.0}, {0.0, 0.0});
  const ParameterState ps = intercept_state(5.0, 1.0);
  // Both observations sit at the mean: deviance is 2 * (-2 * -(1/2)log(2pi)).
  CHECK(deviance(spec, ps, data) == doctest::Approx(2.0 * 1.8378771).epsilon(1e-6));

  // Duplicating the dataset doubles the deviance.
  const Dataset doubled({5.0, 5.0, 5.0, 5.0}, {2.0, 2.0, 2.0, 2.0},
                        {0.0, 0.0, 0.0, 0.0}, {0.0, 0.0, 0.0, 0.0});
  CHECK(deviance(spec, ps, doubled) ==
        doctest::Approx(2.0 * deviance(spec, ps, data)).epsilon(1e-12));

  // Out-of-support likelihood maps to +inf.
  ModelSpec gamma_spec(Family::Gamma, Effect::None);
  ParameterState bad = intercept_state(-1.0, 1.0);
  bad.r_y = 2.0;
  CHECK(deviance(gamma_spec, bad, data) == std::numeric_limits<double>::infinity());
}

TEST_CASE("deviance equals -2 times the independent likelihood") {
  const Dataset data = make_dataset(12, 201);
  RngStream rng(202, 0);
  for (const ModelSpec& spec : test_support::all_specs()) {
    const ParameterState ps = make_state(spec, data, rng);
    const double want = -2.0 * log_likelihood(spec, ps, data);
    CHECK(deviance(spec, ps, data) ==
          doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("dic arithmetic on a hand-computable two-draw posterior") {
  ModelSpec spec(Family::Normal, Effect::None);
  const Dataset data = tiny_data();
  // Draws at b0 = 1 and b0 = 3, unit variance: both deviances are c + 4 with
  // c = 2 log(2pi); the mean state sits at b0 = 2 with deviance c + 2.
  const std::vector<PosteriorSamples> chains{samples_of(
      spec, {intercept_state(1.0, 1.0), intercept_state(3.0, 1.0)}, data)};
  const DicResult dic = compute_dic(spec, chains, data);
  const double c = 2.0 * kLogTwoPi;
  CHECK(dic.dbar == doctest::Approx(c + 4.0).epsilon(1e-12));
  CHECK(dic.d_at_mean == doctest::Approx(c + 2.0).epsilon(1e-12));
  CHECK(dic.pd == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(dic.dic == doctest::Approx(c + 6.0).epsilon(1e-12));
  CHECK(dic.dic == dic.dbar + dic.pd);
  CHECK_FALSE(dic.negative_pd);
  CHECK(dic.dic_defined);
}

TEST_CASE("dic degenerates exactly with identical draws") {
  ModelSpec spec(Family::Normal, Effect::None);
  const Dataset data = tiny_data();
  const ParameterState draw = intercept_state(1.7, 2.3);
  const std::vector<PosteriorSamples> chains{
      samples_of(spec, {draw, draw, draw}, data)};
  const DicResult dic = compute_dic(spec, chains, data);
  CHECK(dic.pd == 0.0);  // exact
  CHECK(dic.dic == deviance(spec, draw, data));
}

TEST_CASE("mspe closed forms") {
  ModelSpec spec(Family::Normal, Effect::None);
  const Dataset data = tiny_data();  // y = (1, 3)
  // yhat = (2, 2): mspe = ((1-2)^2 + (3-2)^2)/2 = 1.
  const std::vector<PosteriorSamples> chains{
      samples_of(spec, {intercept_state(2.0, 1.0)}, data)};
  CHECK(mspe(spec, chains, data) == doctest::Approx(1.0).epsilon(1e-12));

  // Predictions equal to the data give zero.
  const Dataset flat({2.0, 2.0}, {1.0, 1.0}, {0.0, 0.0}, {0.0, 0.0});
  const std::vector<PosteriorSamples> exact{
      samples_of(spec, {intercept_state(2.0, 1.0)}, flat)};
  CHECK(mspe(spec, exact, flat) == 0.0);
}

TEST_CASE("mspe is invariant under draw reordering and observation permutation") {
  const Dataset data = make_dataset(10, 210);
  ModelSpec spec(Family::Normal, Effect::None);
  RngStream rng(211, 0);
  std::vector<ParameterState> draws;
  for (int i = 0; i < 6; ++i) draws.push_back(make_state(spec, data, rng));
  const std::vector<PosteriorSamples> fwd{samples_of(spec, draws, data)};
  std::reverse(draws.begin(), draws.end());
  const std::vector<PosteriorSamples> rev{samples_of(spec, draws, data)};
  CHECK(mspe(spec, fwd, data) == doctest::Approx(mspe(spec, rev, data)).epsilon(1e-12));

  std::vector<double> y, x1, x2, x3;
  for (std::size_t i = data.n(); i-- > 0;) {
    y.push_back(data.y()[i]);
    x1.push_back(data.x1()[i]);
    x2.push_back(data.x2()[i]);
    x3.push_back(data.x3()[i]);
  }
  const Dataset reversed(y, x1, x2, x3);
  CHECK(mspe(spec, fwd, reversed) ==
        doctest::Approx(mspe(spec, fwd, data)).epsilon(1e-12));
}

TEST_CASE("well-specified fits calibrate their predictive residuals") {
  // Data simulated from the fitted model itself: residual mean near 0, SD
  // near 1, and a residual-normal correlation above 0.98 in >= 9/10 seeds.
  int high_corr = 0, calibrated = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SimEnergyConfig cfg;
    cfg.n = 81;
    cfg.sigma_y = 200.0;
    cfg.x2_sd = 3.0;
    cfg.seed = 500 + seed;
    const Dataset data = simulate_energy(cfg).data;
    ModelSpec spec(Family::Normal, Effect::None);
    SamplerConfig config{.iterations = 2500, .burn_in = 1000, .thin = 5,
                         .n_chains = 1, .seed = 600 + seed};
    const MultiChainResult result = run_multi(spec, data, config);
    REQUIRE(result.ok());
    RngStream rng(600 + seed, 1u << 20);
    const std::vector<double> resid =
        predictive_residuals(spec, result.chains, data, rng);
    double mean = 0.0;
    for (double r : resid) mean += r;
    mean /= static_cast<double>(resid.size());
    double ss = 0.0;
    for (double r : resid) ss += (r - mean) * (r - mean);
    const double sd = std::sqrt(ss / static_cast<double>(resid.size() - 1));
    if (std::abs(mean) < 0.1 && sd > 0.8 && sd < 1.2) ++calibrated;
    if (residual_normal_correlation(resid) > 0.98) ++high_corr;
  }
  CHECK(high_corr >= 9);
  CHECK(calibrated >= 9);
}

TEST_CASE("lognormal mspe lives on the original scale") {
  ModelSpec spec(Family::LogNormal, Effect::None);
  const Dataset data({10.0, 10.0}, {1.0, 1.0}, {0.0, 0.0}, {0.0, 0.0});
  ParameterState ps = intercept_state(std::log(10.0), 0.5);
  // E[y] = exp(mu + var/2) = 10 * exp(0.25).
  const std::vector<PosteriorSamples> chains{samples_of(spec, {ps}, data)};
  const double yhat = 10.0 * std::exp(0.25);
  const double want = (10.0 - yhat) * (10.0 - yhat);
  CHECK(mspe(spec, chains, data) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("predictive residuals: determinism and the point-mass flag") {
  ModelSpec spec(Family::Normal, Effect::None);
  const Dataset data = tiny_data();
  RngStream rng_a(301, 0), rng_b(301, 0);
  const std::vector<PosteriorSamples> chains{samples_of(
      spec, {intercept_state(2.0, 1.0), intercept_state(2.2, 1.5)}, data)};
  const auto ra = predictive_residuals(spec, chains, data, rng_a);
  const auto rb = predictive_residuals(spec, chains, data, rng_b);
  REQUIRE(ra.size() == 2);
  CHECK(ra == rb);

  // A variance small enough that mu + noise rounds back to mu collapses the
  // replicates to a point mass: flagged as NaN, no crash.
  const Dataset exact({2.0, 2.0}, {1.0, 1.0}, {0.0, 0.0}, {0.0, 0.0});
  const ParameterState point = intercept_state(2.0, 1e-320);
  RngStream rng_c(302, 0);
  const std::vector<PosteriorSamples> degenerate{
      samples_of(spec, {point, point}, exact)};
  const auto rc = predictive_residuals(spec, degenerate, exact, rng_c);
  CHECK(std::isnan(rc[0]));
  CHECK(std::isnan(rc[1]));

  CHECK_THROWS_AS(
      predictive_residuals(
          spec, {samples_of(spec, {intercept_state(2.0, 1.0)}, exact)}, exact, rng_c),
      std::invalid_argument);
}

TEST_CASE("residual-normal correlation on exact quantile sequences") {
  const std::size_t n = 25;
  std::vector<double> quantiles(n);
  for (std::size_t i = 0; i < n; ++i) {
    quantiles[i] = normal_quantile((static_cast<double>(i) + 0.5) / n);
  }
  CHECK(residual_normal_correlation(quantiles) == doctest::Approx(1.0).epsilon(1e-12));

  // Negating an antisymmetric sequence permutes it, so sorting restores the
  // quantiles themselves and the correlation stays +1 (sorted residuals can
  // never anti-correlate with increasing quantiles).
  std::vector<double> negated;
  for (double q : quantiles) negated.push_back(-q);
  CHECK(residual_normal_correlation(negated) == doctest::Approx(1.0).epsilon(1e-12));

  // Positive affine maps keep it exactly 1; a nonlinear map lowers it.
  std::vector<double> affine;
  for (double q : quantiles) affine.push_back(3.0 * q + 2.0);
  CHECK(residual_normal_correlation(affine) == doctest::Approx(1.0).epsilon(1e-12));
  std::vector<double> cubed;
  for (double q : quantiles) cubed.push_back(q * q * q);
  const double corr = residual_normal_correlation(cubed);
  CHECK(corr < 1.0);
  CHECK(corr > -1.0);

  // Zero spread -> undefined marker; too few defined values -> error.
  CHECK(std::isnan(residual_normal_correlation(std::vector<double>(5, 1.0))));
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(residual_normal_correlation(std::vector<double>{1.0, nan, 2.0}),
                  std::invalid_argument);
}

TEST_CASE("heavy-tailed residuals drop the correlation below 0.99") {
  int below = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RngStream rng(400 + seed, 0);
    std::vector<double> t2(200);
    for (auto& v : t2) {
      const double z = sample_normal(rng, 0.0, 1.0);
      const double chi2 = sample_gamma(rng, 1.0, 0.5);  // chi-squared, 2 df
      v = z / std::sqrt(chi2 / 2.0);
    }
    if (residual_normal_correlation(t2) < 0.99) ++below;
  }
  CHECK(below >= 19);
}

TEST_CASE("comparison table: placement, highlights, footnotes") {
  auto report_for = [](Family family, Effect effect, double mspe_v, double dic_v,
                       bool negative_pd) {
    FitReport r;
    r.spec = ModelSpec(family, effect);
    r.mspe = mspe_v;
    r.dic.dbar = dic_v;
    r.dic.d_at_mean = dic_v;
    r.dic.pd = negative_pd ? -1.0 : 0.0;
    r.dic.dic = dic_v;
    r.dic.negative_pd = negative_pd;
    ParamSummary sig;
    sig.name = "beta1";
    sig.significant = true;
    r.summaries.push_back(sig);
    return r;
  };

  // Single report: one populated cell.
  const ComparisonTable single =
      build_comparison({report_for(Family::Normal, Effect::None, 10.0, 5.0, false)});
  CHECK(single.cells[0][0].present);
  CHECK_FALSE(single.cells[0][1].present);
  CHECK(single.cells[0][0].significant == std::vector<std::string>{"beta1"});

  // DIC values (3, 1, 2) across columns: the middle one is highlighted.
  const ComparisonTable three = build_comparison(
      {report_for(Family::Normal, Effect::None, 9.0, 3.0, false),
       report_for(Family::Normal, Effect::Additive, 8.0, 1.0, false),
       report_for(Family::Normal, Effect::MeasErr, 7.0, 2.0, true)});
  CHECK(three.best_dic_col == 1);
  CHECK(three.best_mspe_col == 2);
  const std::string text = render_comparison_text(three);
  CHECK(text.find("[1]") != std::string::npos);
  CHECK(text.find("2*") != std::string::npos);  // negative-pD footnote marker
  CHECK(text.find("negative pD") != std::string::npos);
  const std::string csv = render_comparison_csv(three);
  CHECK(csv.find("normal,II,") != std::string::npos);

  CHECK_THROWS_AS(build_comparison({}), std::invalid_argument);
}
