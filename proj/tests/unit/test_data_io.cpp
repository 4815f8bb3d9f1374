#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "hiermc/cli.hpp"
#include "hiermc/csv_io.hpp"
#include "hiermc/errors.hpp"
#include "hiermc/report_json.hpp"
#include "hiermc/simulate.hpp"

#include "test_support.hpp"

using namespace hiermc;

namespace {

namespace fs = std::filesystem;

fs::path temp_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("hiermc_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"hiermc"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("load_csv accepts a minimal valid file") {
  const fs::path dir = temp_dir("load_ok");
  write_file(dir / "d.csv", "ffq,dlw,socdes,edu\n2000,2200,15,1\n1800,2100,12,0\n");
  const Dataset data = load_csv((dir / "d.csv").string());
  CHECK(data.n() == 2);
  CHECK(data.y()[0] == 2000.0);
  CHECK(data.x3()[1] == 0.0);
}

TEST_CASE("load_csv reports precise locations for every failure mode") {
  const fs::path dir = temp_dir("load_bad");

  write_file(dir / "missing.csv", "ffq,dlw,socdes\n1,2,3\n");
  CHECK_THROWS_WITH_AS(load_csv((dir / "missing.csv").string()),
                       doctest::Contains("edu"), DataError);

  write_file(dir / "nonnum.csv",
             "ffq,dlw,socdes,edu\n2000,2200,15,1\n1800,oops,12,0\n");
  CHECK_THROWS_WITH_AS(load_csv((dir / "nonnum.csv").string()),
                       doctest::Contains("row 3"), DataError);

  write_file(dir / "edu.csv",
             "ffq,dlw,socdes,edu\n2000,2200,15,1\n1800,2100,12,0\n1700,2000,11,0\n"
             "1600,1900,10,2\n");
  CHECK_THROWS_WITH_AS(load_csv((dir / "edu.csv").string()),
                       doctest::Contains("row 5"), DataError);

  write_file(dir / "nonpos.csv", "ffq,dlw,socdes,edu\n-5,2200,15,1\n1800,2100,12,0\n");
  CHECK_THROWS_WITH_AS(load_csv((dir / "nonpos.csv").string()),
                       doctest::Contains("row 2"), DataError);

  write_file(dir / "short.csv", "ffq,dlw,socdes,edu\n2000,2200,15,1\n");
  CHECK_THROWS_WITH_AS(load_csv((dir / "short.csv").string()),
                       doctest::Contains("at least 2"), DataError);

  CHECK_THROWS_AS(load_csv((dir / "nope.csv").string()), DataError);
}

TEST_CASE("csv round trip preserves values exactly") {
  const fs::path dir = temp_dir("roundtrip");
  const Dataset data = test_support::make_dataset(23, 77);
  write_csv(data, (dir / "d.csv").string());
  const Dataset back = load_csv((dir / "d.csv").string());
  REQUIRE(back.n() == data.n());
  for (std::size_t i = 0; i < data.n(); ++i) {
    CHECK(back.y()[i] == data.y()[i]);
    CHECK(back.x1()[i] == data.x1()[i]);
    CHECK(back.x2()[i] == data.x2()[i]);
    CHECK(back.x3()[i] == data.x3()[i]);
  }
}

TEST_CASE("simulate_loglog: exact relationships at zero noise") {
  SimLogLogConfig cfg;
  cfg.n = 50;
  cfg.beta0 = 1.0;
  cfg.beta1 = 1.0;
  cfg.sigma_e = 0.0;
  cfg.seed = 5;
  const Dataset data = simulate_loglog(cfg);
  for (std::size_t i = 0; i < data.n(); ++i) {
    CHECK(data.y()[i] == doctest::Approx(data.x1()[i]).epsilon(1e-15));
  }

  // log y on log x recovers (log beta0, beta1) exactly at zero noise.
  cfg.beta0 = 2.5;
  cfg.beta1 = 1.7;
  const Dataset curve = simulate_loglog(cfg);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const auto n = static_cast<double>(curve.n());
  for (std::size_t i = 0; i < curve.n(); ++i) {
    const double lx = std::log(curve.x1()[i]);
    const double ly = std::log(curve.y()[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;
  CHECK(slope == doctest::Approx(1.7).epsilon(1e-10));
  CHECK(intercept == doctest::Approx(std::log(2.5)).epsilon(1e-10));

  // Positivity and determinism with noise on.
  cfg.sigma_e = 0.4;
  const Dataset noisy = simulate_loglog(cfg);
  const Dataset again = simulate_loglog(cfg);
  for (std::size_t i = 0; i < noisy.n(); ++i) {
    CHECK(noisy.y()[i] > 0.0);
    CHECK(noisy.y()[i] == again.y()[i]);
  }
  SimLogLogConfig bad = cfg;
  bad.x_lo = -1.0;
  CHECK_THROWS_AS(simulate_loglog(bad), std::invalid_argument);
}

namespace {

// Least-squares residual skewness of z on w.
double ols_resid_skewness(const std::vector<double>& w, const std::vector<double>& z) {
  const auto n = static_cast<double>(w.size());
  double sw = 0, sz = 0, sww = 0, swz = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    sw += w[i];
    sz += z[i];
    sww += w[i] * w[i];
    swz += w[i] * z[i];
  }
  const double slope = (n * swz - sw * sz) / (n * sww - sw * sw);
  const double intercept = (sz - slope * sw) / n;
  std::vector<double> resid(w.size());
  double mean = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    resid[i] = z[i] - intercept - slope * w[i];
    mean += resid[i];
  }
  mean /= n;
  double m2 = 0, m3 = 0;
  for (double r : resid) {
    m2 += (r - mean) * (r - mean);
    m3 += (r - mean) * (r - mean) * (r - mean);
  }
  return (m3 / n) / std::pow(m2 / n, 1.5);
}

}  // namespace

TEST_CASE("loglog data skews a naive linear fit but not the log-log fit") {
  SimLogLogConfig cfg;
  cfg.n = 500;
  cfg.beta0 = 2.0;
  cfg.beta1 = 1.2;
  cfg.sigma_e = 0.3;
  cfg.x_lo = 1.0;
  cfg.x_hi = 10.0;
  cfg.seed = 42;
  const Dataset data = simulate_loglog(cfg);
  std::vector<double> log_x(data.n()), log_y(data.n());
  for (std::size_t i = 0; i < data.n(); ++i) {
    log_x[i] = std::log(data.x1()[i]);
    log_y[i] = std::log(data.y()[i]);
  }
  const double naive_skew = ols_resid_skewness(data.x1(), data.y());
  const double loglog_skew = ols_resid_skewness(log_x, log_y);
  CHECK(naive_skew > 0.3);             // heavy right tail
  CHECK(std::abs(loglog_skew) < 0.3);  // symmetric on the log scale
}

TEST_CASE("simulate_energy: zero-noise exactness, determinism, rejection") {
  SimEnergyConfig cfg;
  cfg.n = 20;
  cfg.sigma_y = 0.0;
  cfg.effect = Effect::None;
  cfg.seed = 9;
  const SimEnergyResult sim = simulate_energy(cfg);
  for (std::size_t i = 0; i < sim.data.n(); ++i) {
    const double mu = cfg.beta[0] + cfg.beta[1] * sim.data.x1()[i] +
                      cfg.beta[2] * sim.data.x2()[i] + cfg.beta[3] * sim.data.x3()[i] +
                      cfg.beta[4] * sim.data.x2()[i] * sim.data.x3()[i];
    CHECK(sim.data.y()[i] == doctest::Approx(mu).epsilon(1e-14));
  }

  cfg.sigma_y = 150.0;
  const SimEnergyResult a = simulate_energy(cfg);
  const SimEnergyResult b = simulate_energy(cfg);
  for (std::size_t i = 0; i < a.data.n(); ++i) CHECK(a.data.y()[i] == b.data.y()[i]);

  // A Gamma configuration whose mean goes negative is rejected.
  SimEnergyConfig bad;
  bad.family = Family::Gamma;
  bad.beta = {-10000.0, 0.5, 0.0, 0.0, 0.0};
  bad.seed = 2;
  CHECK_THROWS_AS(simulate_energy(bad), std::invalid_argument);

  // Multiplicative effects only exist for the log-normal family.
  SimEnergyConfig mult;
  mult.family = Family::Normal;
  mult.effect = Effect::Multiplicative;
  CHECK_THROWS_AS(simulate_energy(mult), std::invalid_argument);
}

TEST_CASE("cli fit produces its four artifacts and deterministic samples") {
  const fs::path dir = temp_dir("cli_fit");
  SimEnergyConfig cfg;
  cfg.n = 15;
  cfg.sigma_y = 100.0;
  cfg.seed = 31;
  write_csv(simulate_energy(cfg).data, (dir / "data.csv").string());

  const std::vector<std::string> fit_args{
      "fit",           "--data", (dir / "data.csv").string(),
      "--family",      "normal", "--effect",
      "none",          "--iters", "120",
      "--burnin",      "40",      "--thin",
      "4",             "--chains", "2",
      "--seed",        "5",       "--out",
      (dir / "out1").string()};
  CHECK(run_cli(fit_args) == 0);
  CHECK(fs::exists(dir / "out1" / "samples.csv"));
  CHECK(fs::exists(dir / "out1" / "report.json"));
  CHECK(fs::exists(dir / "out1" / "residuals.csv"));
  CHECK(fs::exists(dir / "out1" / "convergence.txt"));

  auto args2 = fit_args;
  args2.back() = (dir / "out2").string();
  CHECK(run_cli(args2) == 0);
  CHECK(read_file(dir / "out1" / "samples.csv") ==
        read_file(dir / "out2" / "samples.csv"));

  // Unknown family is a usage error.
  CHECK(run_cli({"fit", "--data", (dir / "data.csv").string(), "--family", "cauchy",
                 "--effect", "none", "--out", (dir / "out3").string()}) == 1);
  // Missing file is a data error.
  CHECK(run_cli({"fit", "--data", (dir / "nothere.csv").string(), "--family",
                 "normal", "--effect", "none", "--iters", "120", "--burnin", "40",
                 "--thin", "4", "--out", (dir / "out4").string()}) == 2);

  // diagnose re-renders from the stored outputs.
  CHECK(run_cli({"diagnose", (dir / "out1").string()}) == 0);

  // An impossible threshold forces exit 4 under --require-converged.
  CHECK(run_cli({"fit", "--data", (dir / "data.csv").string(), "--family", "normal",
                 "--effect", "none", "--iters", "120", "--burnin", "40", "--thin",
                 "4", "--chains", "2", "--seed", "5", "--require-converged",
                 "--bgr-threshold", "0.1", "--out", (dir / "out5").string()}) == 4);
}

TEST_CASE("cli flags override config-file values") {
  const fs::path dir = temp_dir("cli_config");
  SimEnergyConfig cfg;
  cfg.n = 12;
  cfg.sigma_y = 90.0;
  cfg.seed = 21;
  write_csv(simulate_energy(cfg).data, (dir / "data.csv").string());
  write_file(dir / "fit.conf",
             "iters=200\nburnin=80\nthin=4\nchains=1\nseed=33\n");

  // Config alone.
  CHECK(run_cli({"fit", "--data", (dir / "data.csv").string(), "--family", "normal",
                 "--effect", "none", "--config", (dir / "fit.conf").string(),
                 "--out", (dir / "cfg").string()}) == 0);
  // Same config, seed overridden on the command line.
  CHECK(run_cli({"fit", "--data", (dir / "data.csv").string(), "--family", "normal",
                 "--effect", "none", "--config", (dir / "fit.conf").string(),
                 "--seed", "34", "--out", (dir / "cfg_override").string()}) == 0);
  const FitReport from_cfg = read_report_json((dir / "cfg" / "report.json").string());
  const FitReport overridden =
      read_report_json((dir / "cfg_override" / "report.json").string());
  CHECK(from_cfg.sampler.seed == 33);
  CHECK(from_cfg.sampler.iterations == 200);
  CHECK(overridden.sampler.seed == 34);
  CHECK(overridden.sampler.iterations == 200);
}

TEST_CASE("cli seed falls back to HIERMC_SEED") {
  const fs::path dir = temp_dir("cli_env");
  SimEnergyConfig cfg;
  cfg.n = 12;
  cfg.sigma_y = 80.0;
  cfg.seed = 13;
  write_csv(simulate_energy(cfg).data, (dir / "data.csv").string());
  const std::vector<std::string> base{
      "fit",      "--data", (dir / "data.csv").string(), "--family", "normal",
      "--effect", "none",   "--iters", "80", "--burnin", "20", "--thin", "3",
      "--chains", "1"};

  setenv("HIERMC_SEED", "4242", 1);
  auto args_env = base;
  args_env.insert(args_env.end(), {"--out", (dir / "env").string()});
  CHECK(run_cli(args_env) == 0);
  unsetenv("HIERMC_SEED");

  auto args_flag = base;
  args_flag.insert(args_flag.end(),
                   {"--seed", "4242", "--out", (dir / "flag").string()});
  CHECK(run_cli(args_flag) == 0);
  CHECK(read_file(dir / "env" / "samples.csv") ==
        read_file(dir / "flag" / "samples.csv"));
}

TEST_CASE("report json round trips without loss") {
  const fs::path dir = temp_dir("report_json");
  SimEnergyConfig cfg;
  cfg.n = 12;
  cfg.sigma_y = 90.0;
  cfg.seed = 17;
  const Dataset data = simulate_energy(cfg).data;
  ModelSpec spec(Family::Normal, Effect::Additive, true,
                 EffectPrior::GammaOverdispersed);
  SamplerConfig config{.iterations = 100, .burn_in = 40, .thin = 3, .n_chains = 2,
                       .seed = 23};
  const MultiChainResult result = run_multi(spec, data, config);
  REQUIRE(result.ok());
  FitReport report = build_fit_report(spec, data, config, result.chains, "data.csv");
  // Force a negative pD into the serialized form to pin its representability.
  report.dic.pd = -3.25;
  report.dic.negative_pd = true;

  const nlohmann::json j1 = report_to_json(report);
  write_report_json(report, (dir / "report.json").string());
  const FitReport back = read_report_json((dir / "report.json").string());
  const nlohmann::json j2 = report_to_json(back);
  CHECK(j1 == j2);
  CHECK(back.dic.pd == -3.25);
  CHECK(back.dic.negative_pd);
}

TEST_CASE("cli simulate and compare round trip") {
  const fs::path dir = temp_dir("cli_sim");
  CHECK(run_cli({"simulate", "loglog", "--n", "30", "--sigma-e", "0.2", "--seed",
                 "3", "--out", (dir / "ll.csv").string()}) == 0);
  const Dataset ll = load_csv((dir / "ll.csv").string());
  CHECK(ll.n() == 30);

  CHECK(run_cli({"simulate", "energy", "--n", "14", "--sigma-y", "120", "--seed",
                 "4", "--out", (dir / "en.csv").string()}) == 0);
  CHECK(fs::exists(dir / "en.csv.truth.json"));

  // Two tiny fits, then a comparison table over their reports.
  for (const char* effect : {"none", "additive"}) {
    CHECK(run_cli({"fit", "--data", (dir / "en.csv").string(), "--family", "normal",
                   "--effect", effect, "--iters", "100", "--burnin", "40", "--thin",
                   "3", "--chains", "1", "--seed", "6", "--out",
                   (dir / effect).string()}) == 0);
  }
  CHECK(run_cli({"compare", (dir / "none").string(), (dir / "additive").string(),
                 "--csv", (dir / "table.csv").string()}) == 0);
  const std::string table = read_file(dir / "table.csv");
  CHECK(table.find("normal,I,") != std::string::npos);
  CHECK(table.find("normal,II,") != std::string::npos);
}
