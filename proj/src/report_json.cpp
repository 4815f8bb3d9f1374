#include "hiermc/report_json.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "hiermc/errors.hpp"

namespace hiermc {

namespace {

using nlohmann::json;

json number_or_null(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

double number_from(const json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j.get<double>();
}

Family family_from(const std::string& s) {
  if (s == "normal") return Family::Normal;
  if (s == "lognormal") return Family::LogNormal;
  if (s == "gamma") return Family::Gamma;
  throw DataError("report json: unknown family '" + s + "'");
}

Effect effect_from(const std::string& s) {
  if (s == "none") return Effect::None;
  if (s == "additive") return Effect::Additive;
  if (s == "measerr") return Effect::MeasErr;
  if (s == "multiplicative") return Effect::Multiplicative;
  throw DataError("report json: unknown effect '" + s + "'");
}

EffectPrior effect_prior_from(const std::string& s) {
  if (s == "gelman") return EffectPrior::GelmanUniform;
  if (s == "gamma-od") return EffectPrior::GammaOverdispersed;
  if (s == "uniform-shape") return EffectPrior::UniformShape;
  throw DataError("report json: unknown effect prior '" + s + "'");
}

json model_to_json(const ModelSpec& spec) {
  const PriorConfig& pc = spec.priors();
  json priors = {
      {"b_beta", pc.b_beta},
      {"b_eps", pc.b_eps},
      {"b_y", pc.b_y},
      {"gamma_hyper",
       {{"a1_shape", pc.gamma_hyper.a1_shape},
        {"a1_rate", pc.gamma_hyper.a1_rate},
        {"a2_shape", pc.gamma_hyper.a2_shape},
        {"a2_rate", pc.gamma_hyper.a2_rate}}},
      {"mult_tau_bound", pc.mult_tau_bound},
      {"r_y_prior", {{"shape", pc.r_y_prior.shape}, {"rate", pc.r_y_prior.rate}}},
  };
  json j = {
      {"family", to_string(spec.family())},
      {"effect", to_string(spec.effect())},
      {"include_interaction", spec.include_interaction()},
      {"priors", priors},
  };
  if (spec.effect_prior().has_value()) {
    j["effect_prior"] = to_string(*spec.effect_prior());
  } else {
    j["effect_prior"] = nullptr;
  }
  return j;
}

ModelSpec model_from_json(const json& j) {
  PriorConfig pc;
  const json& priors = j.at("priors");
  pc.b_beta = priors.at("b_beta").get<double>();
  pc.b_eps = priors.at("b_eps").get<double>();
  pc.b_y = priors.at("b_y").get<double>();
  const json& gh = priors.at("gamma_hyper");
  pc.gamma_hyper.a1_shape = gh.at("a1_shape").get<double>();
  pc.gamma_hyper.a1_rate = gh.at("a1_rate").get<double>();
  pc.gamma_hyper.a2_shape = gh.at("a2_shape").get<double>();
  pc.gamma_hyper.a2_rate = gh.at("a2_rate").get<double>();
  pc.mult_tau_bound = priors.at("mult_tau_bound").get<double>();
  pc.r_y_prior.shape = priors.at("r_y_prior").at("shape").get<double>();
  pc.r_y_prior.rate = priors.at("r_y_prior").at("rate").get<double>();
  std::optional<EffectPrior> ep;
  if (!j.at("effect_prior").is_null()) {
    ep = effect_prior_from(j.at("effect_prior").get<std::string>());
  }
  return ModelSpec(family_from(j.at("family").get<std::string>()),
                   effect_from(j.at("effect").get<std::string>()),
                   j.at("include_interaction").get<bool>(), ep, pc);
}

}  // namespace

nlohmann::json report_to_json(const FitReport& report) {
  json summaries = json::array();
  for (const ParamSummary& s : report.summaries) {
    summaries.push_back({{"name", s.name},
                         {"mean", number_or_null(s.mean)},
                         {"sd", number_or_null(s.sd)},
                         {"q025", number_or_null(s.q025)},
                         {"q50", number_or_null(s.q50)},
                         {"q975", number_or_null(s.q975)},
                         {"significant", s.significant}});
  }
  json residuals = json::array();
  for (double r : report.residuals) residuals.push_back(number_or_null(r));
  json entries = json::array();
  for (const ConvergenceEntry& e : report.convergence.entries) {
    entries.push_back({{"name", e.name},
                       {"r_hat", number_or_null(e.r_hat)},
                       {"pass", e.pass},
                       {"degenerate", e.degenerate}});
  }
  return json{
      {"model", model_to_json(report.spec)},
      {"sampler",
       {{"iterations", report.sampler.iterations},
        {"burn_in", report.sampler.burn_in},
        {"thin", report.sampler.thin},
        {"n_chains", report.sampler.n_chains},
        {"seed", report.sampler.seed},
        {"init_jitter", report.sampler.init_jitter}}},
      {"data", {{"path", report.data_path}, {"n", report.n}}},
      {"dic",
       {{"dbar", number_or_null(report.dic.dbar)},
        {"d_at_mean", number_or_null(report.dic.d_at_mean)},
        {"pd", number_or_null(report.dic.pd)},
        {"dic", number_or_null(report.dic.dic)},
        {"dic_defined", report.dic.dic_defined},
        {"negative_pd", report.dic.negative_pd},
        {"theta_bar_clamped", report.dic.theta_bar_clamped}}},
      {"mspe", number_or_null(report.mspe)},
      {"summaries", summaries},
      {"residuals", residuals},
      {"resid_normal_corr", number_or_null(report.resid_normal_corr)},
      {"convergence",
       {{"available", report.convergence_available},
        {"threshold", report.convergence.threshold},
        {"pass", report.convergence.pass},
        {"entries", entries}}},
  };
}

FitReport report_from_json(const nlohmann::json& j) {
  FitReport report;
  report.spec = model_from_json(j.at("model"));
  const json& sampler = j.at("sampler");
  report.sampler.iterations = sampler.at("iterations").get<std::size_t>();
  report.sampler.burn_in = sampler.at("burn_in").get<std::size_t>();
  report.sampler.thin = sampler.at("thin").get<std::size_t>();
  report.sampler.n_chains = sampler.at("n_chains").get<std::size_t>();
  report.sampler.seed = sampler.at("seed").get<std::uint64_t>();
  report.sampler.init_jitter = sampler.at("init_jitter").get<double>();
  report.data_path = j.at("data").at("path").get<std::string>();
  report.n = j.at("data").at("n").get<std::size_t>();
  const json& dic = j.at("dic");
  report.dic.dbar = number_from(dic.at("dbar"));
  report.dic.d_at_mean = number_from(dic.at("d_at_mean"));
  report.dic.pd = number_from(dic.at("pd"));
  report.dic.dic = number_from(dic.at("dic"));
  report.dic.dic_defined = dic.at("dic_defined").get<bool>();
  report.dic.negative_pd = dic.at("negative_pd").get<bool>();
  report.dic.theta_bar_clamped = dic.at("theta_bar_clamped").get<bool>();
  report.mspe = number_from(j.at("mspe"));
  for (const json& s : j.at("summaries")) {
    ParamSummary summary;
    summary.name = s.at("name").get<std::string>();
    summary.mean = number_from(s.at("mean"));
    summary.sd = number_from(s.at("sd"));
    summary.q025 = number_from(s.at("q025"));
    summary.q50 = number_from(s.at("q50"));
    summary.q975 = number_from(s.at("q975"));
    summary.significant = s.at("significant").get<bool>();
    report.summaries.push_back(std::move(summary));
  }
  for (const json& r : j.at("residuals")) report.residuals.push_back(number_from(r));
  report.resid_normal_corr = number_from(j.at("resid_normal_corr"));
  const json& conv = j.at("convergence");
  report.convergence_available = conv.at("available").get<bool>();
  report.convergence.threshold = conv.at("threshold").get<double>();
  report.convergence.pass = conv.at("pass").get<bool>();
  for (const json& e : conv.at("entries")) {
    ConvergenceEntry entry;
    entry.name = e.at("name").get<std::string>();
    entry.r_hat = number_from(e.at("r_hat"));
    entry.pass = e.at("pass").get<bool>();
    entry.degenerate = e.at("degenerate").get<bool>();
    report.convergence.entries.push_back(std::move(entry));
  }
  return report;
}

void write_report_json(const FitReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << report_to_json(report).dump(2) << '\n';
}

FitReport read_report_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open for reading: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw DataError(path + ": invalid json: " + e.what());
  }
  return report_from_json(j);
}

}  // namespace hiermc
