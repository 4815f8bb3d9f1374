#include <pybind11/pybind11.h>
#include <pybind11/functional.h>
#include <pybind11/stl.h>

#include "hiermc/cli.hpp"
#include "hiermc/csv_io.hpp"
#include "hiermc/diagnostics.hpp"
#include "hiermc/distributions.hpp"
#include "hiermc/errors.hpp"
#include "hiermc/report_json.hpp"
#include "hiermc/sampler.hpp"
#include "hiermc/selection.hpp"
#include "hiermc/simulate.hpp"

namespace py = pybind11;
using namespace hiermc;

PYBIND11_MODULE(_hiermc, m) {
  m.doc() = "Bayesian hierarchical FFQ/DLW regression engine";

  py::register_exception<DataError>(m, "DataError");
  py::register_exception<SamplerFault>(m, "SamplerFaultError");

  // stats primitives
  py::class_<RngStream>(m, "RngStream")
      .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("seed"),
           py::arg("stream_id") = 0)
      .def("next_u64", &RngStream::next_u64)
      .def("next_unit", &RngStream::next_unit)
      .def_property_readonly("seed", &RngStream::seed)
      .def_property_readonly("stream_id", &RngStream::stream_id);
  m.def("normal_logpdf", &normal_logpdf, py::arg("x"), py::arg("mean"),
        py::arg("variance"));
  m.def("gamma_logpdf", &gamma_logpdf, py::arg("x"), py::arg("shape"), py::arg("rate"));
  m.def("normal_cdf", &normal_cdf);
  m.def("normal_quantile", &normal_quantile);
  m.def("sample_normal", &sample_normal);
  m.def("sample_gamma", &sample_gamma);
  m.def("sample_uniform", &sample_uniform);
  m.def(
      "slice_sample_scalar",
      [](const std::function<double(double)>& logdensity, double current, double width,
         RngStream& rng, double lo, double hi) {
        return slice_sample_scalar(logdensity, current, width, rng, Interval{lo, hi});
      },
      py::arg("logdensity"), py::arg("current"), py::arg("width"), py::arg("rng"),
      py::arg("lo") = -std::numeric_limits<double>::infinity(),
      py::arg("hi") = std::numeric_limits<double>::infinity());

  // model lattice
  py::enum_<Family>(m, "Family")
      .value("Normal", Family::Normal)
      .value("LogNormal", Family::LogNormal)
      .value("Gamma", Family::Gamma);
  py::enum_<Effect>(m, "Effect")
      .value("NoEffect", Effect::None)
      .value("Additive", Effect::Additive)
      .value("MeasErr", Effect::MeasErr)
      .value("Multiplicative", Effect::Multiplicative);
  py::enum_<EffectPrior>(m, "EffectPrior")
      .value("GelmanUniform", EffectPrior::GelmanUniform)
      .value("GammaOverdispersed", EffectPrior::GammaOverdispersed)
      .value("UniformShape", EffectPrior::UniformShape);

  py::class_<GammaHyper>(m, "GammaHyper")
      .def(py::init<>())
      .def_readwrite("a1_shape", &GammaHyper::a1_shape)
      .def_readwrite("a1_rate", &GammaHyper::a1_rate)
      .def_readwrite("a2_shape", &GammaHyper::a2_shape)
      .def_readwrite("a2_rate", &GammaHyper::a2_rate);
  py::class_<GammaShapePrior>(m, "GammaShapePrior")
      .def(py::init<>())
      .def_readwrite("shape", &GammaShapePrior::shape)
      .def_readwrite("rate", &GammaShapePrior::rate);
  py::class_<PriorConfig>(m, "PriorConfig")
      .def(py::init<>())
      .def_readwrite("b_beta", &PriorConfig::b_beta)
      .def_readwrite("b_eps", &PriorConfig::b_eps)
      .def_readwrite("b_y", &PriorConfig::b_y)
      .def_readwrite("gamma_hyper", &PriorConfig::gamma_hyper)
      .def_readwrite("mult_tau_bound", &PriorConfig::mult_tau_bound)
      .def_readwrite("r_y_prior", &PriorConfig::r_y_prior);

  py::class_<Dataset>(m, "Dataset")
      .def(py::init<std::vector<double>, std::vector<double>, std::vector<double>,
                    std::vector<double>>(),
           py::arg("y"), py::arg("x1"), py::arg("x2"), py::arg("x3"))
      .def_property_readonly("n", &Dataset::n)
      .def_property_readonly("y", &Dataset::y)
      .def_property_readonly("x1", &Dataset::x1)
      .def_property_readonly("x2", &Dataset::x2)
      .def_property_readonly("x3", &Dataset::x3);

  py::class_<ModelSpec>(m, "ModelSpec")
      .def(py::init<Family, Effect, bool, std::optional<EffectPrior>, PriorConfig>(),
           py::arg("family"), py::arg("effect"), py::arg("include_interaction") = true,
           py::arg("effect_prior") = std::nullopt, py::arg("priors") = PriorConfig{})
      .def_property_readonly("family", &ModelSpec::family)
      .def_property_readonly("effect", &ModelSpec::effect)
      .def_property_readonly("include_interaction", &ModelSpec::include_interaction)
      .def_property_readonly("effect_prior", &ModelSpec::effect_prior)
      .def_property_readonly("n_beta", &ModelSpec::n_beta);

  py::class_<ParameterState>(m, "ParameterState")
      .def(py::init<>())
      .def_readwrite("beta", &ParameterState::beta)
      .def_readwrite("var_beta", &ParameterState::var_beta)
      .def_readwrite("eps", &ParameterState::eps)
      .def_readwrite("var_y", &ParameterState::var_y)
      .def_readwrite("var_eps", &ParameterState::var_eps)
      .def_readwrite("alpha1", &ParameterState::alpha1)
      .def_readwrite("alpha2", &ParameterState::alpha2)
      .def_readwrite("r_y", &ParameterState::r_y);

  m.def("linear_predictor", &linear_predictor);
  m.def("log_likelihood", &log_likelihood);
  m.def("log_joint", &log_joint);
  m.def("deviance", &deviance);

  // sampling
  py::class_<SamplerConfig>(m, "SamplerConfig")
      .def(py::init<>())
      .def_readwrite("iterations", &SamplerConfig::iterations)
      .def_readwrite("burn_in", &SamplerConfig::burn_in)
      .def_readwrite("thin", &SamplerConfig::thin)
      .def_readwrite("n_chains", &SamplerConfig::n_chains)
      .def_readwrite("seed", &SamplerConfig::seed)
      .def_readwrite("init_jitter", &SamplerConfig::init_jitter)
      .def("retained_per_chain", &SamplerConfig::retained_per_chain);
  py::class_<PosteriorSamples>(m, "PosteriorSamples")
      .def_readonly("chain_id", &PosteriorSamples::chain_id)
      .def_readonly("draws", &PosteriorSamples::draws)
      .def_readonly("deviance_trace", &PosteriorSamples::deviance_trace);
  py::class_<ChainFault>(m, "ChainFault")
      .def_readonly("chain_id", &ChainFault::chain_id)
      .def_readonly("coordinate", &ChainFault::coordinate)
      .def_readonly("iteration", &ChainFault::iteration)
      .def_readonly("message", &ChainFault::message);
  py::class_<MultiChainResult>(m, "MultiChainResult")
      .def_readonly("chains", &MultiChainResult::chains)
      .def_readonly("faults", &MultiChainResult::faults)
      .def("ok", &MultiChainResult::ok);

  m.def("coordinate_names", &coordinate_names);
  m.def(
      "run_chain",
      [](const ModelSpec& spec, const Dataset& data, const SamplerConfig& config,
         std::size_t chain_id) {
        py::gil_scoped_release release;
        return run_chain(spec, data, config, chain_id);
      },
      py::arg("spec"), py::arg("data"), py::arg("config"), py::arg("chain_id") = 0);
  m.def("run_multi", [](const ModelSpec& spec, const Dataset& data,
                        const SamplerConfig& config) {
    py::gil_scoped_release release;
    return run_multi(spec, data, config);
  });

  // diagnostics and selection
  py::class_<ParamSummary>(m, "ParamSummary")
      .def_readonly("name", &ParamSummary::name)
      .def_readonly("mean", &ParamSummary::mean)
      .def_readonly("sd", &ParamSummary::sd)
      .def_readonly("q025", &ParamSummary::q025)
      .def_readonly("q50", &ParamSummary::q50)
      .def_readonly("q975", &ParamSummary::q975)
      .def_readonly("significant", &ParamSummary::significant);
  m.def("summarize", [](const std::vector<double>& trace, const std::string& name) {
    return summarize(std::span<const double>(trace), name);
  });
  m.def("bgr_statistic", &bgr_statistic);
  py::class_<ConvergenceEntry>(m, "ConvergenceEntry")
      .def_readonly("name", &ConvergenceEntry::name)
      .def_readonly("r_hat", &ConvergenceEntry::r_hat)
      .def_readonly("pass_", &ConvergenceEntry::pass)
      .def_readonly("degenerate", &ConvergenceEntry::degenerate);
  py::class_<ConvergenceReport>(m, "ConvergenceReport")
      .def_readonly("threshold", &ConvergenceReport::threshold)
      .def_readonly("pass_", &ConvergenceReport::pass)
      .def_readonly("entries", &ConvergenceReport::entries);
  m.def("check_convergence", &check_convergence, py::arg("chains"),
        py::arg("threshold") = 1.1);

  py::class_<DicResult>(m, "DicResult")
      .def_readonly("dbar", &DicResult::dbar)
      .def_readonly("d_at_mean", &DicResult::d_at_mean)
      .def_readonly("pd", &DicResult::pd)
      .def_readonly("dic", &DicResult::dic)
      .def_readonly("dic_defined", &DicResult::dic_defined)
      .def_readonly("negative_pd", &DicResult::negative_pd)
      .def_readonly("theta_bar_clamped", &DicResult::theta_bar_clamped);
  m.def("compute_dic", &compute_dic);
  m.def("mspe", &mspe);
  m.def("posterior_mean_state", [](const ModelSpec& spec,
                                   const std::vector<PosteriorSamples>& chains) {
    return posterior_mean_state(spec, chains);
  });
  m.def("predictive_residuals", &predictive_residuals);
  m.def("residual_normal_correlation", [](const std::vector<double>& residuals) {
    return residual_normal_correlation(std::span<const double>(residuals));
  });

  py::class_<FitReport>(m, "FitReport")
      .def_readonly("spec", &FitReport::spec)
      .def_readonly("sampler", &FitReport::sampler)
      .def_readonly("data_path", &FitReport::data_path)
      .def_readonly("n", &FitReport::n)
      .def_readonly("dic", &FitReport::dic)
      .def_readonly("mspe", &FitReport::mspe)
      .def_readonly("summaries", &FitReport::summaries)
      .def_readonly("residuals", &FitReport::residuals)
      .def_readonly("resid_normal_corr", &FitReport::resid_normal_corr)
      .def_readonly("convergence", &FitReport::convergence)
      .def_readonly("convergence_available", &FitReport::convergence_available)
      .def("to_json", [](const FitReport& r) { return report_to_json(r).dump(2); });
  m.def(
      "build_fit_report",
      [](const ModelSpec& spec, const Dataset& data, const SamplerConfig& config,
         const std::vector<PosteriorSamples>& chains, const std::string& data_path,
         double bgr_threshold) {
        return build_fit_report(spec, data, config, chains, data_path, bgr_threshold);
      },
      py::arg("spec"), py::arg("data"), py::arg("config"), py::arg("chains"),
      py::arg("data_path") = "", py::arg("bgr_threshold") = 1.1);

  // simulation and IO
  py::class_<SimLogLogConfig>(m, "SimLogLogConfig")
      .def(py::init<>())
      .def_readwrite("n", &SimLogLogConfig::n)
      .def_readwrite("beta0", &SimLogLogConfig::beta0)
      .def_readwrite("beta1", &SimLogLogConfig::beta1)
      .def_readwrite("sigma_e", &SimLogLogConfig::sigma_e)
      .def_readwrite("x_lo", &SimLogLogConfig::x_lo)
      .def_readwrite("x_hi", &SimLogLogConfig::x_hi)
      .def_readwrite("seed", &SimLogLogConfig::seed);
  m.def("simulate_loglog", &simulate_loglog);
  py::class_<SimEnergyConfig>(m, "SimEnergyConfig")
      .def(py::init<>())
      .def_readwrite("n", &SimEnergyConfig::n)
      .def_readwrite("beta", &SimEnergyConfig::beta)
      .def_readwrite("family", &SimEnergyConfig::family)
      .def_readwrite("effect", &SimEnergyConfig::effect)
      .def_readwrite("include_interaction", &SimEnergyConfig::include_interaction)
      .def_readwrite("sigma_y", &SimEnergyConfig::sigma_y)
      .def_readwrite("sigma_eps", &SimEnergyConfig::sigma_eps)
      .def_readwrite("tau_eps_mult", &SimEnergyConfig::tau_eps_mult)
      .def_readwrite("r_y", &SimEnergyConfig::r_y)
      .def_readwrite("x1_lo", &SimEnergyConfig::x1_lo)
      .def_readwrite("x1_hi", &SimEnergyConfig::x1_hi)
      .def_readwrite("x2_mean", &SimEnergyConfig::x2_mean)
      .def_readwrite("x2_sd", &SimEnergyConfig::x2_sd)
      .def_readwrite("x3_p", &SimEnergyConfig::x3_p)
      .def_readwrite("eps_outlier_frac", &SimEnergyConfig::eps_outlier_frac)
      .def_readwrite("eps_outlier_mult", &SimEnergyConfig::eps_outlier_mult)
      .def_readwrite("seed", &SimEnergyConfig::seed);
  py::class_<SimEnergyResult>(m, "SimEnergyResult")
      .def_readonly("data", &SimEnergyResult::data)
      .def_readonly("eps_true", &SimEnergyResult::eps_true);
  m.def("simulate_energy", &simulate_energy);
  m.def("load_csv", &load_csv);
  m.def("write_csv", &write_csv);

  m.def("cli_main", [](const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.push_back("hiermc");
    for (const std::string& a : args) argv.push_back(a.c_str());
    return cli_main(static_cast<int>(argv.size()), argv.data());
  });
}
