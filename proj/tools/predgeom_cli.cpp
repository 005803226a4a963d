#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "predgeom/report.hpp"
#include "predgeom/risk.hpp"

using nlohmann::json;

namespace {

// invalid flag/config usage: exits with code 2, like a CLI parse error
struct usage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --config support: a JSON object whose keys mirror the long flag names
// (underscores for dashes).  Explicit flags win; config fills the rest.
class ConfigOverride {
 public:
  ConfigOverride(const CLI::App& sub, const std::string& path) : sub_(sub) {
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw usage_error("cannot open config file " + path);
    try {
      in >> cfg_;
    } catch (const json::exception& e) {
      throw usage_error(std::string("config file is not valid JSON: ") +
                        e.what());
    }
    for (const auto& item : cfg_.items()) {
      if (!sub_.get_option_no_throw(flag_name(item.key())))
        throw usage_error("config key '" + item.key() + "' matches no " +
                          sub.get_name() + " flag");
    }
  }

  template <typename T>
  void apply(const std::string& key, T& var) const {
    if (cfg_.is_null() || !cfg_.contains(key)) return;
    const CLI::Option* opt = sub_.get_option_no_throw(flag_name(key));
    if (opt && opt->count() == 0) var = cfg_.at(key).get<T>();
  }

 private:
  static std::string flag_name(const std::string& key) {
    std::string flag = "--" + key;
    for (char& c : flag)
      if (c == '_') c = '-';
    return flag;
  }

  const CLI::App& sub_;
  json cfg_;
};

double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
}

struct CircleArgs {
  long n = 25;
  double sigma2 = 1.0;
  long trials = 1000000;
  std::uint64_t seed = 1;
  std::string out;
  std::string config;
};

int run_circle(CircleArgs a, const CLI::App& sub) {
  const ConfigOverride cfg(sub, a.config);
  cfg.apply("n", a.n);
  cfg.apply("sigma2", a.sigma2);
  cfg.apply("trials", a.trials);
  cfg.apply("seed", a.seed);
  cfg.apply("out", a.out);

  predgeom::CircleRiskConfig rc;
  rc.n = a.n;
  rc.sigma2 = a.sigma2;
  rc.trials = a.trials;
  rc.seed = a.seed;

  const auto t0 = std::chrono::steady_clock::now();
  const predgeom::RiskEstimate est = predgeom::run_circle_risk(rc);
  const double wall = elapsed_since(t0);

  predgeom::Csv csv;
  csv.header = {"predictive",  "mean_risk",   "stderr",
                "paired_diff_vs_mle_plugin", "diff_stderr",
                "ratio_to_analytic_constant"};
  for (size_t i = 0; i < est.names.size(); ++i) {
    const double c = est.analytic_diff_constant[i];
    const double ratio = (c > 0.0) ? est.diff_vs_first[i] / c : 0.0;
    csv.rows.push_back({est.names[i],
                        predgeom::format_csv_number(est.mean_risk[i]),
                        predgeom::format_csv_number(est.stderr_risk[i]),
                        predgeom::format_csv_number(est.diff_vs_first[i]),
                        predgeom::format_csv_number(est.diff_stderr[i]),
                        predgeom::format_csv_number(ratio)});
  }
  csv.write(a.out);

  json resolved = {{"n", rc.n},       {"sigma2", rc.sigma2},
                   {"trials", rc.trials}, {"omega_true", rc.omega_true},
                   {"seed", rc.seed}, {"radial_nodes", rc.radial_nodes},
                   {"out", a.out},    {"resampled", est.resampled}};
  predgeom::write_manifest(a.out, "circle-risk", resolved.dump(), rc.seed,
                           wall);
  print_warnings(est.warnings);
  std::cout << "circle-risk: " << est.trials << " trials in " << wall
            << " s -> " << a.out << "\n";
  return 0;
}

struct SpikedArgs {
  int l = 5;
  long n = 20;
  std::vector<double> lambda_grid{0.5, 1.0, 2.0, 4.0, 8.0};
  long trials = 200;
  long draws = 1000;
  long burn_in = 250;
  long y_samples = 1000;
  double log_lambda_scale = 0.6;
  double u_scale_factor = 0.35;
  std::uint64_t seed = 1;
  std::string out;
  std::string svg;
  std::string config;
};

int run_spiked(SpikedArgs a, const CLI::App& sub) {
  const ConfigOverride cfg(sub, a.config);
  cfg.apply("l", a.l);
  cfg.apply("n", a.n);
  cfg.apply("lambda_grid", a.lambda_grid);
  cfg.apply("trials", a.trials);
  cfg.apply("draws", a.draws);
  cfg.apply("burn_in", a.burn_in);
  cfg.apply("y_samples", a.y_samples);
  cfg.apply("log_lambda_scale", a.log_lambda_scale);
  cfg.apply("u_scale_factor", a.u_scale_factor);
  cfg.apply("seed", a.seed);
  cfg.apply("out", a.out);
  cfg.apply("svg", a.svg);

  predgeom::SpikedRiskConfig rc;
  rc.l = a.l;
  rc.n = a.n;
  rc.lambda_grid = a.lambda_grid;
  rc.trials = a.trials;
  rc.draws = a.draws;
  rc.burn_in = a.burn_in;
  rc.y_samples = a.y_samples;
  rc.log_lambda_scale = a.log_lambda_scale;
  rc.u_scale_factor = a.u_scale_factor;
  rc.seed = a.seed;

  const auto t0 = std::chrono::steady_clock::now();
  const predgeom::SpikedRiskResult res = predgeom::run_spiked_risk(rc);
  const double wall = elapsed_since(t0);

  predgeom::Csv csv;
  csv.header = {"lambda",      "predictive",  "mean_risk", "stderr",
                "paired_diff_vs_bayes_plugin", "diff_stderr",
                "paired_diff_vs_prev", "diff_prev_stderr"};
  for (size_t li = 0; li < res.lambda.size(); ++li) {
    const predgeom::RiskEstimate& est = res.per_lambda[li];
    for (size_t i = 0; i < est.names.size(); ++i)
      csv.rows.push_back({predgeom::format_csv_number(res.lambda[li]),
                          est.names[i],
                          predgeom::format_csv_number(est.mean_risk[i]),
                          predgeom::format_csv_number(est.stderr_risk[i]),
                          predgeom::format_csv_number(est.diff_vs_first[i]),
                          predgeom::format_csv_number(est.diff_stderr[i]),
                          predgeom::format_csv_number(est.diff_vs_prev[i]),
                          predgeom::format_csv_number(est.diff_prev_stderr[i])});
    print_warnings(est.warnings);
  }
  csv.write(a.out);

  json resolved = {{"l", rc.l},
                   {"n", rc.n},
                   {"lambda_grid", rc.lambda_grid},
                   {"trials", rc.trials},
                   {"draws", rc.draws},
                   {"burn_in", rc.burn_in},
                   {"y_samples", rc.y_samples},
                   {"log_lambda_scale", rc.log_lambda_scale},
                   {"u_scale_factor", rc.u_scale_factor},
                   {"seed", rc.seed},
                   {"out", a.out}};
  if (!a.svg.empty()) resolved["svg"] = a.svg;
  predgeom::write_manifest(a.out, "spiked-risk", resolved.dump(), rc.seed,
                           wall);

  if (!a.svg.empty()) {
    std::vector<predgeom::SvgSeries> series(3);
    const char* colors[3] = {"#1f77b4", "#ff7f0e", "#2ca02c"};
    for (int j = 0; j < 3; ++j) {
      series[j].label = res.per_lambda.front().names[j];
      series[j].color = colors[j];
      for (size_t li = 0; li < res.lambda.size(); ++li) {
        series[j].x.push_back(res.lambda[li]);
        series[j].y.push_back(res.per_lambda[li].mean_risk[j]);
      }
    }
    predgeom::write_svg_chart(a.svg, "KL risk by spike strength",
                              "lambda", "mean KL risk", series);
  }

  std::cout << "spiked-risk: " << rc.trials << " trials x "
            << res.lambda.size() << " lambda values in " << wall << " s -> "
            << a.out << "\n";
  return 0;
}

struct ExpansionArgs {
  std::vector<long> n_list{50, 100, 200, 400};
  double r = 1.0;
  std::string out;
  std::string config;
};

int run_expansion(ExpansionArgs a, const CLI::App& sub) {
  const ConfigOverride cfg(sub, a.config);
  cfg.apply("n_list", a.n_list);
  cfg.apply("r", a.r);
  cfg.apply("out", a.out);

  const auto t0 = std::chrono::steady_clock::now();
  const predgeom::ExpansionCheck chk = predgeom::verify_expansions(a.n_list, a.r);
  const double wall = elapsed_since(t0);

  predgeom::Csv csv;
  csv.header = {"n", "exact_norm_gap", "expansion_gap_times_n",
                "orthogonality_residual"};
  for (size_t i = 0; i < chk.n_values.size(); ++i)
    csv.rows.push_back(
        {std::to_string(chk.n_values[i]),
         predgeom::format_csv_number(chk.exact_norm_gap[i]),
         predgeom::format_csv_number(chk.gap_times_n[i]),
         predgeom::format_csv_number(chk.orthogonality_residual[i])});
  csv.write(a.out);

  json resolved = {{"n_list", a.n_list}, {"r", a.r}, {"out", a.out}};
  predgeom::write_manifest(a.out, "verify-expansion", resolved.dump(), 0,
                           wall);
  std::cout << "verify-expansion: " << chk.n_values.size()
            << " sample sizes in " << wall << " s -> " << a.out << "\n";
  return 0;
}

struct BenchArgs {
  int l = 80;
  long draws = 2000;
  long points = 1000;
  std::uint64_t seed = 1;
  std::string out;
  std::string config;
};

int run_bench(BenchArgs a, const CLI::App& sub) {
  const ConfigOverride cfg(sub, a.config);
  cfg.apply("l", a.l);
  cfg.apply("draws", a.draws);
  cfg.apply("points", a.points);
  cfg.apply("seed", a.seed);
  cfg.apply("out", a.out);

  const auto t0 = std::chrono::steady_clock::now();
  const predgeom::TimingReport rep =
      predgeom::benchmark_eval(a.l, a.draws, a.points, a.seed);
  const double wall = elapsed_since(t0);

  predgeom::Csv csv;
  csv.header = {"predictive", "eval_seconds", "bytes"};
  csv.rows.push_back({"mixture",
                      predgeom::format_csv_number(rep.mixture_seconds),
                      std::to_string(rep.mixture_bytes)});
  csv.rows.push_back({"extended_plugin",
                      predgeom::format_csv_number(rep.extended_seconds),
                      std::to_string(rep.extended_bytes)});
  csv.write(a.out);

  json resolved = {{"l", a.l},
                   {"draws", a.draws},
                   {"points", a.points},
                   {"seed", a.seed},
                   {"out", a.out}};
  predgeom::write_manifest(a.out, "benchmark-eval", resolved.dump(), a.seed,
                           wall);
  std::cout << "benchmark-eval: time ratio mixture/extended = "
            << rep.time_ratio() << ", size ratio = " << rep.size_ratio()
            << " -> " << a.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Predictive-density experiments for curved exponential "
               "families: circle and spiked-covariance KL risk, expansion "
               "verification, and evaluation benchmarks"};
  app.require_subcommand(1);

  CircleArgs ca;
  CLI::App* circle = app.add_subcommand(
      "circle-risk", "Paired KL-risk Monte Carlo on the circle model");
  circle->add_option("--n", ca.n, "Samples per trial")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  circle->add_option("--sigma2", ca.sigma2, "Noise variance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  circle->add_option("--trials", ca.trials, "Monte Carlo trials")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  circle->add_option("--seed", ca.seed, "Master RNG seed")
      ->capture_default_str();
  circle->add_option("--out", ca.out, "Output CSV path")->required();
  circle->add_option("--config", ca.config, "JSON config file (flags win)");

  SpikedArgs sa;
  CLI::App* spiked = app.add_subcommand(
      "spiked-risk", "KL-risk Monte Carlo on the spiked covariance model");
  spiked->add_option("--l", sa.l, "Dimension")
      ->check(CLI::Range(2, 100000))
      ->capture_default_str();
  spiked->add_option("--n", sa.n, "Samples per trial")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  spiked->add_option("--lambda-grid", sa.lambda_grid, "Spike strengths")
      ->delimiter(',')
      ->capture_default_str();
  spiked->add_option("--trials", sa.trials, "Monte Carlo trials")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  spiked->add_option("--draws", sa.draws, "Posterior draws kept per trial")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  spiked->add_option("--burn-in", sa.burn_in, "Discarded warmup iterations")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  spiked->add_option("--log-lambda-scale", sa.log_lambda_scale,
                     "Random-walk step on log(lambda)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  spiked->add_option("--u-scale-factor", sa.u_scale_factor,
                     "Direction step is this over sqrt(l)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  spiked->add_option("--y-samples", sa.y_samples,
                     "Monte Carlo points for the mixture KL")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  spiked->add_option("--seed", sa.seed, "Master RNG seed")
      ->capture_default_str();
  spiked->add_option("--out", sa.out, "Output CSV path")->required();
  spiked->add_option("--svg", sa.svg, "Optional SVG chart path");
  spiked->add_option("--config", sa.config, "JSON config file (flags win)");

  ExpansionArgs ea;
  CLI::App* expansion = app.add_subcommand(
      "verify-expansion",
      "Exact-vs-expansion gaps for the posterior mean of eta");
  expansion->add_option("--n-list", ea.n_list, "Sample sizes")
      ->delimiter(',')
      ->capture_default_str();
  expansion->add_option("--r", ea.r, "Resultant length of xbar")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  expansion->add_option("--out", ea.out, "Output CSV path")->required();
  expansion->add_option("--config", ea.config,
                        "JSON config file (flags win)");

  BenchArgs ba;
  CLI::App* bench = app.add_subcommand(
      "benchmark-eval",
      "Time and size of mixture vs extended-plugin evaluation");
  bench->add_option("--l", ba.l, "Dimension")
      ->check(CLI::Range(2, 100000))
      ->capture_default_str();
  bench->add_option("--draws", ba.draws, "Mixture components")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench->add_option("--points", ba.points, "Evaluation points")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench->add_option("--seed", ba.seed, "Master RNG seed")
      ->capture_default_str();
  bench->add_option("--out", ba.out, "Output CSV path")->required();
  bench->add_option("--config", ba.config, "JSON config file (flags win)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (circle->parsed()) return run_circle(ca, *circle);
    if (spiked->parsed()) return run_spiked(sa, *spiked);
    if (expansion->parsed()) return run_expansion(ea, *expansion);
    if (bench->parsed()) return run_bench(ba, *bench);
  } catch (const usage_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const predgeom::domain_error& e) {
    // out-of-domain parameter values are usage problems, however they arrive
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
