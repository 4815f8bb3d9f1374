#include "hiermc/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hiermc/csv_io.hpp"
#include "hiermc/diagnostics.hpp"
#include "hiermc/errors.hpp"
#include "hiermc/report_json.hpp"
#include "hiermc/sampler.hpp"
#include "hiermc/selection.hpp"
#include "hiermc/simulate.hpp"

namespace hiermc {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitSampler = 3;
constexpr int kExitConvergence = 4;

constexpr std::uint64_t kDefaultSeed = 1729;

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag.has_value()) return *flag;
  if (const char* env = std::getenv("HIERMC_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw DataError("HIERMC_SEED is not a valid unsigned integer: " +
                      std::string(env));
    }
  }
  return kDefaultSeed;
}

Family parse_family(const std::string& s) {
  if (s == "normal") return Family::Normal;
  if (s == "lognormal") return Family::LogNormal;
  if (s == "gamma") return Family::Gamma;
  throw std::invalid_argument("unknown family: " + s);
}

// CLI effect names follow the comparison-table columns; model3 resolves to
// the family-appropriate form.
Effect parse_effect(const std::string& s, Family family) {
  if (s == "none") return Effect::None;
  if (s == "additive") return Effect::Additive;
  if (s == "model3") {
    return family == Family::LogNormal ? Effect::Multiplicative : Effect::MeasErr;
  }
  throw std::invalid_argument("unknown effect: " + s);
}

struct FitOptions {
  std::string data_path;
  std::string family = "normal";
  std::string effect = "none";
  std::string effect_prior;  // empty = default for the effect
  bool no_interaction = false;
  SamplerConfig sampler;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  bool dump_effects = false;
  bool require_converged = false;
  double bgr_threshold = 1.1;
  PriorConfig priors;
  std::string config_path;
};

// key=value lines, '#' comments. Command-line flags take precedence: a key is
// applied only when its option was not given explicitly.
void apply_config_file(FitOptions& opt, const CLI::App& fit_cmd) {
  std::ifstream in(opt.config_path);
  if (!in) throw DataError("cannot open config file: " + opt.config_path);
  auto given = [&](const std::string& flag) {
    return fit_cmd.get_option(flag)->count() > 0;
  };
  auto as_bool = [](const std::string& v) {
    return v == "1" || v == "true" || v == "yes" || v == "on";
  };
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto strip = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r\n");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t\r\n");
      return s.substr(b, e - b + 1);
    };
    line = strip(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(opt.config_path + ":" + std::to_string(line_no) +
                                  ": expected key=value");
    }
    const std::string key = strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));
    static const std::vector<std::string> known = {
        "data",   "family", "effect", "effect-prior", "no-interaction",
        "iters",  "burnin", "thin",   "chains",       "seed",
        "init-jitter", "b-beta", "b-eps", "b-y", "out", "dump-effects",
        "require-converged", "bgr-threshold"};
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw std::invalid_argument(opt.config_path + ":" + std::to_string(line_no) +
                                  ": unknown key '" + key + "'");
    }
    try {
      if (key == "data") {
        if (!given("--data")) opt.data_path = value;
      } else if (key == "family") {
        if (!given("--family")) opt.family = value;
      } else if (key == "effect") {
        if (!given("--effect")) opt.effect = value;
      } else if (key == "effect-prior") {
        if (!given("--effect-prior")) opt.effect_prior = value;
      } else if (key == "no-interaction") {
        if (!given("--no-interaction")) opt.no_interaction = as_bool(value);
      } else if (key == "iters") {
        if (!given("--iters")) opt.sampler.iterations = std::stoull(value);
      } else if (key == "burnin") {
        if (!given("--burnin")) opt.sampler.burn_in = std::stoull(value);
      } else if (key == "thin") {
        if (!given("--thin")) opt.sampler.thin = std::stoull(value);
      } else if (key == "chains") {
        if (!given("--chains")) opt.sampler.n_chains = std::stoull(value);
      } else if (key == "seed") {
        if (!given("--seed")) opt.seed = std::stoull(value);
      } else if (key == "init-jitter") {
        if (!given("--init-jitter")) opt.sampler.init_jitter = std::stod(value);
      } else if (key == "b-beta") {
        if (!given("--b-beta")) opt.priors.b_beta = std::stod(value);
      } else if (key == "b-eps") {
        if (!given("--b-eps")) opt.priors.b_eps = std::stod(value);
      } else if (key == "b-y") {
        if (!given("--b-y")) opt.priors.b_y = std::stod(value);
      } else if (key == "out") {
        if (!given("--out")) opt.out_dir = value;
      } else if (key == "dump-effects") {
        if (!given("--dump-effects")) opt.dump_effects = as_bool(value);
      } else if (key == "require-converged") {
        if (!given("--require-converged")) opt.require_converged = as_bool(value);
      } else if (key == "bgr-threshold") {
        if (!given("--bgr-threshold")) opt.bgr_threshold = std::stod(value);
      }
    } catch (const std::logic_error&) {
      throw std::invalid_argument(opt.config_path + ":" + std::to_string(line_no) +
                                  ": bad value for '" + key + "': " + value);
    }
  }
}

int run_fit(const FitOptions& opt) {
  const Family family = parse_family(opt.family);
  const Effect effect = parse_effect(opt.effect, family);
  std::optional<EffectPrior> effect_prior;
  if (!opt.effect_prior.empty()) {
    if (effect == Effect::Multiplicative) {
      std::cerr << "error: --effect-prior does not apply to the log-normal model3 "
                   "(its multiplicative effect always takes the uniform-shape prior)\n";
      return kExitUsage;
    }
    if (opt.effect_prior == "gelman") {
      effect_prior = EffectPrior::GelmanUniform;
    } else if (opt.effect_prior == "gamma-od") {
      effect_prior = EffectPrior::GammaOverdispersed;
    } else {
      std::cerr << "error: unknown effect prior: " << opt.effect_prior << "\n";
      return kExitUsage;
    }
  }

  ModelSpec spec(family, effect, !opt.no_interaction, effect_prior, opt.priors);
  SamplerConfig config = opt.sampler;
  config.seed = resolve_seed(opt.seed);
  config.validate();

  const Dataset data = load_csv(opt.data_path);
  std::filesystem::create_directories(opt.out_dir);
  const auto out = [&](const char* name) {
    return (std::filesystem::path(opt.out_dir) / name).string();
  };

  const MultiChainResult result = run_multi(spec, data, config);
  if (!result.chains.empty()) {
    write_samples_csv(out("samples.csv"), spec, result.chains, config,
                      opt.dump_effects);
  }
  if (!result.ok()) {
    for (const ChainFault& fault : result.faults) {
      std::cerr << "sampler fault: chain " << fault.chain_id << ", coordinate '"
                << fault.coordinate << "', iteration " << fault.iteration << ": "
                << fault.message << "\n";
    }
    std::cerr << result.chains.size() << "/" << config.n_chains
              << " chains completed; partial samples written\n";
    return kExitSampler;
  }

  const FitReport report = build_fit_report(spec, data, config, result.chains,
                                            opt.data_path, opt.bgr_threshold);
  write_report_json(report, out("report.json"));
  write_residuals_csv(out("residuals.csv"), report.residuals);
  write_convergence_txt(out("convergence.txt"), report.convergence,
                        report.convergence_available);

  std::cout << "fit: " << to_string(spec.family()) << "/" << to_string(spec.effect())
            << " n=" << data.n() << " chains=" << config.n_chains
            << " retained=" << config.retained_per_chain() * config.n_chains << "\n";
  std::cout << "  DIC=" << report.dic.dic << " (dbar=" << report.dic.dbar
            << ", pD=" << report.dic.pd << (report.dic.negative_pd ? ", negative" : "")
            << ")  MSPE=" << report.mspe
            << "  resid_corr=" << report.resid_normal_corr << "\n";
  if (report.convergence_available) {
    std::cout << "  convergence: " << (report.convergence.pass ? "pass" : "FAIL")
              << " (threshold " << report.convergence.threshold << ")\n";
  } else {
    std::cout << "  convergence: unavailable (single chain)\n";
  }

  if (opt.require_converged && report.convergence_available &&
      !report.convergence.pass) {
    std::cerr << "error: convergence check failed and --require-converged is set\n";
    return kExitConvergence;
  }
  return kExitOk;
}

struct CompareOptions {
  std::vector<std::string> dirs;
  std::string csv_path;
};

int run_compare(const CompareOptions& opt) {
  std::vector<FitReport> reports;
  for (const std::string& dir : opt.dirs) {
    reports.push_back(read_report_json(
        (std::filesystem::path(dir) / "report.json").string()));
  }
  const ComparisonTable table = build_comparison(reports);
  std::cout << render_comparison_text(table);
  if (!opt.csv_path.empty()) {
    std::ofstream out(opt.csv_path);
    if (!out) throw DataError("cannot open for writing: " + opt.csv_path);
    out << render_comparison_csv(table);
  }
  return kExitOk;
}

struct DiagnoseOptions {
  std::string dir;
  double threshold = 1.1;
};

int run_diagnose(const DiagnoseOptions& opt) {
  const std::filesystem::path dir(opt.dir);
  const FitReport report = read_report_json((dir / "report.json").string());
  const SampleTable table = read_samples_csv((dir / "samples.csv").string());

  const std::size_t chain_col = table.column_index("chain");
  std::vector<std::size_t> chain_ids;
  for (const auto& row : table.rows) {
    const auto id = static_cast<std::size_t>(row[chain_col]);
    if (std::find(chain_ids.begin(), chain_ids.end(), id) == chain_ids.end()) {
      chain_ids.push_back(id);
    }
  }

  if (chain_ids.size() < 2) {
    std::cout << "convergence: unavailable (need at least 2 chains for BGR)\n";
  } else {
    auto column_traces = [&](const std::string& column,
                             bool sqrt_scale) -> std::vector<std::vector<double>> {
      const std::size_t col = table.column_index(column);
      std::vector<std::vector<double>> traces(chain_ids.size());
      for (const auto& row : table.rows) {
        const auto id = static_cast<std::size_t>(row[chain_col]);
        const std::size_t slot = static_cast<std::size_t>(
            std::find(chain_ids.begin(), chain_ids.end(), id) - chain_ids.begin());
        traces[slot].push_back(sqrt_scale ? std::sqrt(row[col]) : row[col]);
      }
      return traces;
    };

    const ModelSpec& spec = report.spec;
    std::vector<std::pair<std::string, std::vector<std::vector<double>>>> monitored;
    for (std::size_t k = 0; k < spec.n_beta(); ++k) {
      const std::string col = "beta" + std::to_string(k);
      monitored.emplace_back(col, column_traces(col, false));
    }
    if (spec.has_var_y()) monitored.emplace_back("s_y", column_traces("var_y", true));
    if (spec.has_effects()) {
      if (spec.multiplicative() || spec.has_overdispersed_hyper()) {
        monitored.emplace_back("tau_eps", column_traces("var_eps", false));
      } else {
        monitored.emplace_back("s_eps", column_traces("var_eps", true));
      }
      if (spec.has_overdispersed_hyper()) {
        monitored.emplace_back("alpha1", column_traces("alpha1", false));
        monitored.emplace_back("alpha2", column_traces("alpha2", false));
      }
    }
    if (spec.has_r_y()) monitored.emplace_back("r_y", column_traces("r_y", false));
    monitored.emplace_back("deviance", column_traces("deviance", false));

    std::printf("%-12s %-10s %s\n", "name", "R_hat", "status");
    bool all_pass = true;
    for (const auto& [name, traces] : monitored) {
      try {
        const double r_hat = bgr_statistic(traces);
        const bool pass = r_hat < opt.threshold;
        all_pass = all_pass && pass;
        std::printf("%-12s %-10.4f %s\n", name.c_str(), r_hat, pass ? "pass" : "FAIL");
      } catch (const DegenerateTraceError&) {
        std::printf("%-12s %-10s %s\n", name.c_str(), "-", "degenerate");
      }
    }
    std::printf("overall: %s (threshold %.3f)\n", all_pass ? "pass" : "FAIL",
                opt.threshold);
  }

  const auto pairs = read_residuals_csv((dir / "residuals.csv").string());
  std::vector<double> residuals;
  for (const auto& [q, r] : pairs) residuals.push_back(r);
  if (residuals.size() >= 3) {
    std::printf("residual-normal correlation: %.6f\n",
                residual_normal_correlation(residuals));
  } else {
    std::printf("residual-normal correlation: unavailable (%zu defined residuals)\n",
                residuals.size());
  }
  return kExitOk;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Bayesian hierarchical FFQ/DLW regression: MCMC fitting, model "
               "selection (DIC, MSPE) and residual diagnostics"};
  app.require_subcommand(1);

  // ---- fit ----------------------------------------------------------------
  FitOptions fit;
  std::uint64_t seed_value = 0;
  CLI::App* fit_cmd = app.add_subcommand("fit", "Fit one model cell to a CSV dataset");
  fit_cmd->add_option("--config", fit.config_path,
                      "Key=value config file; explicit flags take precedence");
  fit_cmd->add_option("--data", fit.data_path, "Input CSV (header ffq,dlw,socdes,edu)")
      ->required();
  fit_cmd->add_option("--family", fit.family, "Outcome family")
      ->check(CLI::IsMember({"normal", "lognormal", "gamma"}))
      ->required();
  fit_cmd->add_option("--effect", fit.effect, "Subject-effect structure (table column)")
      ->check(CLI::IsMember({"none", "additive", "model3"}))
      ->required();
  fit_cmd->add_option("--effect-prior", fit.effect_prior,
                      "Prior on the effect dispersion (additive/model3, "
                      "normal-effects models)")
      ->check(CLI::IsMember({"gelman", "gamma-od"}));
  fit_cmd->add_flag("--no-interaction", fit.no_interaction,
                    "Drop the socdes x edu interaction term");
  fit_cmd->add_option("--iters", fit.sampler.iterations, "MCMC iterations per chain")
                      ->capture_default_str();
  fit_cmd->add_option("--burnin", fit.sampler.burn_in, "Burn-in iterations")->capture_default_str();
  fit_cmd->add_option("--thin", fit.sampler.thin, "Keep every thin-th draw")->capture_default_str();
  fit_cmd->add_option("--chains", fit.sampler.n_chains, "Number of chains")->capture_default_str();
  auto* seed_opt = fit_cmd->add_option("--seed", seed_value,
                                       "RNG seed (falls back to HIERMC_SEED, then "
                                       "a fixed default)");
  fit_cmd->add_option("--init-jitter", fit.sampler.init_jitter,
                      "Overdispersion scale for chain starts")->capture_default_str();
  fit_cmd->add_option("--b-beta", fit.priors.b_beta,
                      "Uniform bound on coefficient prior SDs")->capture_default_str();
  fit_cmd->add_option("--b-eps", fit.priors.b_eps,
                      "Uniform bound on the additive effect SD")->capture_default_str();
  fit_cmd->add_option("--b-y", fit.priors.b_y, "Uniform bound on the outcome SD")
                      ->capture_default_str();
  fit_cmd->add_option("--out", fit.out_dir, "Output directory")->required();
  fit_cmd->add_flag("--dump-effects", fit.dump_effects,
                    "Include per-subject effect columns in samples.csv");
  fit_cmd->add_flag("--require-converged", fit.require_converged,
                    "Exit 4 when any monitored R-hat exceeds the threshold");
  fit_cmd->add_option("--bgr-threshold", fit.bgr_threshold, "BGR pass threshold")
                      ->capture_default_str();

  // ---- simulate -----------------------------------------------------------
  CLI::App* sim_cmd = app.add_subcommand("simulate", "Generate synthetic datasets");
  sim_cmd->require_subcommand(1);

  SimLogLogConfig loglog;
  std::string loglog_out;
  std::uint64_t loglog_seed = 0;
  CLI::App* loglog_cmd =
      sim_cmd->add_subcommand("loglog", "y = beta0 * x^beta1 * exp(e)");
  loglog_cmd->add_option("--n", loglog.n, "Observations")->capture_default_str();
  loglog_cmd->add_option("--beta0", loglog.beta0, "Scale coefficient")->capture_default_str();
  loglog_cmd->add_option("--beta1", loglog.beta1, "Power coefficient")->capture_default_str();
  loglog_cmd->add_option("--sigma-e", loglog.sigma_e, "Log-scale error SD")->capture_default_str();
  loglog_cmd->add_option("--x-lo", loglog.x_lo, "Lower x bound")->capture_default_str();
  loglog_cmd->add_option("--x-hi", loglog.x_hi, "Upper x bound")->capture_default_str();
  auto* loglog_seed_opt = loglog_cmd->add_option("--seed", loglog_seed, "RNG seed");
  loglog_cmd->add_option("--out", loglog_out, "Output CSV path")->required();

  SimEnergyConfig energy;
  std::string energy_out, energy_truth_out;
  std::string energy_family = "normal", energy_effect = "none";
  bool energy_no_interaction = false;
  std::uint64_t energy_seed = 0;
  CLI::App* energy_cmd =
      sim_cmd->add_subcommand("energy", "Cohort-like dataset with known truth");
  energy_cmd->add_option("--n", energy.n, "Subjects")->capture_default_str();
  energy_cmd->add_option("--beta0", energy.beta[0], "Intercept")->capture_default_str();
  energy_cmd->add_option("--beta1", energy.beta[1], "DLW coefficient")->capture_default_str();
  energy_cmd->add_option("--beta2", energy.beta[2], "Social desirability coefficient")
                         ->capture_default_str();
  energy_cmd->add_option("--beta3", energy.beta[3], "Education coefficient")->capture_default_str();
  energy_cmd->add_option("--beta4", energy.beta[4], "Interaction coefficient")->capture_default_str();
  energy_cmd->add_option("--family", energy_family, "Outcome family")
      ->check(CLI::IsMember({"normal", "lognormal", "gamma"}));
  energy_cmd->add_option("--effect", energy_effect, "Effect structure")
      ->check(CLI::IsMember({"none", "additive", "model3"}));
  energy_cmd->add_flag("--no-interaction", energy_no_interaction,
                       "Generate without the interaction term");
  energy_cmd->add_option("--sigma-y", energy.sigma_y, "Outcome noise SD")->capture_default_str();
  energy_cmd->add_option("--sigma-eps", energy.sigma_eps, "Effect SD")->capture_default_str();
  energy_cmd->add_option("--tau-eps", energy.tau_eps_mult,
                         "Multiplicative effect shape")->capture_default_str();
  energy_cmd->add_option("--r-y", energy.r_y, "Gamma-family shape")->capture_default_str();
  energy_cmd->add_option("--x1-lo", energy.x1_lo, "DLW lower bound")->capture_default_str();
  energy_cmd->add_option("--x1-hi", energy.x1_hi, "DLW upper bound")->capture_default_str();
  energy_cmd->add_option("--x2-mean", energy.x2_mean, "Score mean")->capture_default_str();
  energy_cmd->add_option("--x2-sd", energy.x2_sd, "Score SD")->capture_default_str();
  energy_cmd->add_option("--x3-p", energy.x3_p, "P(college degree)")->capture_default_str();
  energy_cmd->add_option("--outlier-frac", energy.eps_outlier_frac,
                         "Fraction of subjects with inflated effects")->capture_default_str();
  energy_cmd->add_option("--outlier-mult", energy.eps_outlier_mult,
                         "Effect SD multiplier for those subjects")->capture_default_str();
  auto* energy_seed_opt = energy_cmd->add_option("--seed", energy_seed, "RNG seed");
  energy_cmd->add_option("--out", energy_out, "Output CSV path")->required();
  energy_cmd->add_option("--truth-out", energy_truth_out,
                         "Truth JSON path (default: <out>.truth.json)");

  // ---- compare / diagnose --------------------------------------------------
  CompareOptions compare;
  CLI::App* compare_cmd =
      app.add_subcommand("compare", "Render the model-comparison table");
  compare_cmd->add_option("dirs", compare.dirs, "Fit output directories")
      ->required()
      ->expected(-1);
  compare_cmd->add_option("--csv", compare.csv_path, "Also write the table as CSV");

  DiagnoseOptions diagnose;
  CLI::App* diagnose_cmd = app.add_subcommand(
      "diagnose", "Recompute convergence and residual diagnostics from fit outputs");
  diagnose_cmd->add_option("dir", diagnose.dir, "Fit output directory")->required();
  diagnose_cmd->add_option("--bgr-threshold", diagnose.threshold, "BGR pass threshold")
                           ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (fit_cmd->parsed()) {
      if (seed_opt->count() > 0) fit.seed = seed_value;
      if (!fit.config_path.empty()) apply_config_file(fit, *fit_cmd);
      return run_fit(fit);
    }
    if (loglog_cmd->parsed()) {
      if (loglog_seed_opt->count() > 0) {
        loglog.seed = loglog_seed;
      } else {
        loglog.seed = resolve_seed(std::nullopt);
      }
      const Dataset data = simulate_loglog(loglog);
      write_csv(data, loglog_out);
      std::cout << "wrote " << data.n() << " rows to " << loglog_out << "\n";
      return kExitOk;
    }
    if (energy_cmd->parsed()) {
      energy.family = parse_family(energy_family);
      energy.effect = parse_effect(energy_effect, energy.family);
      energy.include_interaction = !energy_no_interaction;
      energy.seed = energy_seed_opt->count() > 0 ? energy_seed
                                                 : resolve_seed(std::nullopt);
      const SimEnergyResult sim = simulate_energy(energy);
      write_csv(sim.data, energy_out);
      const std::string truth_path =
          energy_truth_out.empty() ? energy_out + ".truth.json" : energy_truth_out;
      nlohmann::json truth = {
          {"beta", sim.truth.beta},
          {"family", to_string(sim.truth.family)},
          {"effect", to_string(sim.truth.effect)},
          {"include_interaction", sim.truth.include_interaction},
          {"sigma_y", sim.truth.sigma_y},
          {"sigma_eps", sim.truth.sigma_eps},
          {"tau_eps_mult", sim.truth.tau_eps_mult},
          {"r_y", sim.truth.r_y},
          {"seed", sim.truth.seed},
          {"eps_true", sim.eps_true},
      };
      std::ofstream out(truth_path);
      if (!out) throw DataError("cannot open for writing: " + truth_path);
      out << truth.dump(2) << '\n';
      std::cout << "wrote " << sim.data.n() << " rows to " << energy_out
                << " (truth: " << truth_path << ")\n";
      return kExitOk;
    }
    if (compare_cmd->parsed()) return run_compare(compare);
    if (diagnose_cmd->parsed()) return run_diagnose(diagnose);
    return kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const SamplerFault& e) {
    std::cerr << "sampler fault at coordinate '" << e.coordinate() << "', iteration "
              << e.iteration() << ": " << e.what() << "\n";
    return kExitSampler;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}

}  // namespace hiermc
