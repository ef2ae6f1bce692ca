#include "tlasso/tlasso.h"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kCompute = 3 };

struct Failure {
  int code;
};

int exit_code(tlasso_status s) {
  switch (s) {
    case TLASSO_OK: return kOk;
    case TLASSO_ERR_INVALID_ARGUMENT:
    case TLASSO_ERR_INVALID_QUANTILE:
    case TLASSO_ERR_TOO_MANY_EDGES:
      return kUsage;
    case TLASSO_ERR_EMPTY_MATRIX:
    case TLASSO_ERR_DIMENSION_MISMATCH:
    case TLASSO_ERR_INSUFFICIENT_TIMEPOINTS:
    case TLASSO_ERR_INSUFFICIENT_ROWS:
    case TLASSO_ERR_EMPTY_TRUTH:
    case TLASSO_ERR_MISSING_CELL:
    case TLASSO_ERR_NON_RECTANGULAR:
    case TLASSO_ERR_PARSE:
    case TLASSO_ERR_IO:
      return kData;
    default:
      return kCompute;
  }
}

void check(tlasso_status s) {
  if (s == TLASSO_OK) return;
  std::fprintf(stderr, "tlasso: %s: %s\n", tlasso_status_string(s), tlasso_last_error());
  throw Failure{exit_code(s)};
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Dataset = std::unique_ptr<tlasso_dataset, Deleter<tlasso_dataset, tlasso_dataset_free>>;
using Config = std::unique_ptr<tlasso_config, Deleter<tlasso_config, tlasso_config_free>>;
using Estimate = std::unique_ptr<tlasso_estimate, Deleter<tlasso_estimate, tlasso_estimate_free>>;
using SimSpec = std::unique_ptr<tlasso_sim_spec, Deleter<tlasso_sim_spec, tlasso_sim_spec_free>>;
using Network = std::unique_ptr<tlasso_network, Deleter<tlasso_network, tlasso_network_free>>;
using Metrics = std::unique_ptr<tlasso_metrics, Deleter<tlasso_metrics, tlasso_metrics_free>>;
using Benchmark = std::unique_ptr<tlasso_benchmark, Deleter<tlasso_benchmark, tlasso_benchmark_free>>;

template <class Handle, class Raw = typename Handle::element_type>
Handle make(tlasso_status (*create)(Raw**)) {
  Raw* raw = nullptr;
  check(create(&raw));
  return Handle(raw);
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    std::fprintf(stderr, "tlasso: cannot create output directory %s\n", dir.c_str());
    throw Failure{kData};
  }
}

struct EstimateArgs {
  std::string input, output, truth;
  std::string penalty = "truncating_adaptive_lasso";
  double alpha = 0.1, beta = 0.1;
  std::size_t dmax = 0;
  std::optional<double> lambda, multiplier;
  std::string response_mode = "auto";
  int max_sweeps = 100;
  double sweep_tol = 1e-6;
  double tol = 1e-7;
  int max_iter = 10000;
  unsigned threads = 0;
};

struct SimArgs {
  std::size_t p = 100, T = 10, n = 50, d = 2, edges = 50, burn_in = 50;
  double rho = 0.7, sigma = 0.2;
  std::uint64_t seed = 1;
  std::string sign_mode = "all_positive", noise_mode = "process";
};

struct SimulateArgs {
  SimArgs sim;
  std::string output, format = "wide";
};

struct BenchmarkArgs {
  SimArgs sim;
  std::string output, methods;
  std::size_t runs = 50, dmax = 0;
  std::vector<double> alphas{0.01, 0.02, 0.05, 0.1, 0.15, 0.2};
  double beta = 0.1;
  unsigned threads = 0;
};

void add_sim_options(CLI::App* app, SimArgs& a) {
  app->add_option("-p,--variables", a.p, "Number of variables")->capture_default_str();
  app->add_option("-T,--timepoints", a.T, "Time points per replicate")->capture_default_str();
  app->add_option("-n,--samples", a.n, "Independent replicates per dataset")->capture_default_str();
  app->add_option("-d,--order", a.d, "True VAR order")->capture_default_str();
  app->add_option("--rho", a.rho, "Magnitude of every nonzero effect")->capture_default_str();
  app->add_option("--sigma", a.sigma, "Noise standard deviation")->capture_default_str();
  app->add_option("--edges", a.edges, "Total number of true edges")->capture_default_str();
  app->add_option("--seed", a.seed, "Master seed")->capture_default_str();
  app->add_option("--sign-mode", a.sign_mode, "all_positive or random_sign")
      ->check(CLI::IsMember({"all_positive", "random_sign"}))
      ->capture_default_str();
  app->add_option("--noise-mode", a.noise_mode, "process or measurement")
      ->check(CLI::IsMember({"process", "measurement"}))
      ->capture_default_str();
  app->add_option("--burn-in", a.burn_in, "Discarded steps before recording (stable networks only)")->capture_default_str();
}

SimSpec build_spec(const SimArgs& a) {
  SimSpec spec = make<SimSpec>(tlasso_sim_spec_create);
  check(tlasso_sim_spec_set_dims(spec.get(), a.p, a.T, a.n, a.d));
  check(tlasso_sim_spec_set_signal(spec.get(), a.rho, a.sigma, a.edges));
  check(tlasso_sim_spec_set_seed(spec.get(), a.seed));
  check(tlasso_sim_spec_set_sign_mode(spec.get(), a.sign_mode.c_str()));
  check(tlasso_sim_spec_set_noise_mode(spec.get(), a.noise_mode.c_str()));
  check(tlasso_sim_spec_set_burn_in(spec.get(), a.burn_in));
  return spec;
}

unsigned thread_count(unsigned requested) { return requested ? requested : tlasso_default_threads(); }

int run_estimate(const EstimateArgs& a) {
  ensure_dir(a.output);
  Dataset data;
  {
    tlasso_dataset* raw = nullptr;
    check(tlasso_dataset_load_csv(a.input.c_str(), &raw));
    data.reset(raw);
  }
  std::size_t n = 0, T = 0, p = 0;
  check(tlasso_dataset_dims(data.get(), &n, &T, &p));

  Config config = make<Config>(tlasso_config_create);
  check(tlasso_config_set_penalty(config.get(), a.penalty.c_str()));
  check(tlasso_config_set_alpha(config.get(), a.alpha));
  check(tlasso_config_set_beta(config.get(), a.beta));
  check(tlasso_config_set_dmax(config.get(), a.dmax));
  if (a.lambda) check(tlasso_config_set_lambda(config.get(), *a.lambda));
  if (a.multiplier) check(tlasso_config_set_truncation_multiplier(config.get(), *a.multiplier));
  const std::string mode = a.response_mode == "auto" ? (n == 1 ? "rolling_window" : "last_timepoint") : a.response_mode;
  check(tlasso_config_set_response_mode(config.get(), mode.c_str()));
  check(tlasso_config_set_solver(config.get(), a.tol, a.max_iter));
  check(tlasso_config_set_sweeps(config.get(), a.sweep_tol, a.max_sweeps));
  check(tlasso_config_set_threads(config.get(), thread_count(a.threads)));

  Estimate est;
  {
    tlasso_estimate* raw = nullptr;
    check(tlasso_fit(data.get(), config.get(), &raw));
    est.reset(raw);
  }
  check(tlasso_estimate_write(est.get(), data.get(), a.output.c_str()));

  if (!a.truth.empty()) {
    tlasso_network* raw_net = nullptr;
    check(tlasso_network_read(a.truth.c_str(), data.get(), &raw_net));
    Network truth(raw_net);
    tlasso_metrics* raw_metrics = nullptr;
    check(tlasso_evaluate(est.get(), truth.get(), &raw_metrics));
    Metrics metrics(raw_metrics);
    check(tlasso_metrics_write(metrics.get(), a.output.c_str()));
  }

  std::size_t order = 0;
  int sweeps = 0, converged = 0;
  check(tlasso_estimate_order(est.get(), &order));
  check(tlasso_estimate_sweeps(est.get(), &sweeps, &converged));
  std::fprintf(stderr, "estimated order %zu after %d sweeps%s\n", order, sweeps, converged ? "" : " (not converged)");
  return kOk;
}

int run_simulate(const SimulateArgs& a) {
  ensure_dir(a.output);
  SimSpec spec = build_spec(a.sim);
  Network net;
  {
    tlasso_network* raw = nullptr;
    check(tlasso_network_generate(spec.get(), &raw));
    net.reset(raw);
  }
  double radius = 0.0;
  check(tlasso_network_spectral_radius(net.get(), &radius));
  if (radius >= 1.0)
    std::fprintf(stderr, "warning: network is explosive (companion spectral radius %.4g); burn-in skipped\n", radius);
  Dataset data;
  {
    tlasso_dataset* raw = nullptr;
    check(tlasso_simulate(spec.get(), net.get(), tlasso_default_threads(), &raw));
    data.reset(raw);
  }
  const auto dir = std::filesystem::path(a.output);
  check(tlasso_dataset_write_csv(data.get(), (dir / "data.csv").string().c_str(), a.format == "long"));
  check(tlasso_network_write(net.get(), data.get(), (dir / "truth.tsv").string().c_str()));
  return kOk;
}

int run_benchmark(const BenchmarkArgs& a) {
  ensure_dir(a.output);
  SimSpec spec = build_spec(a.sim);
  Benchmark bench;
  {
    tlasso_benchmark* raw = nullptr;
    check(tlasso_benchmark_run(spec.get(), a.runs, a.alphas.data(), a.alphas.size(), a.beta, a.dmax,
                               a.methods.empty() ? nullptr : a.methods.c_str(), thread_count(a.threads), &raw));
    bench.reset(raw);
  }
  check(tlasso_benchmark_write(bench.get(), a.output.c_str()));
  std::size_t failed = 0;
  int too_many = 0;
  check(tlasso_benchmark_failures(bench.get(), &failed, &too_many));
  if (failed) std::fprintf(stderr, "%zu of %zu replicates failed\n", failed, a.runs);
  return too_many ? kCompute : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse VAR Granger network estimation with the truncating lasso"};
  app.set_version_flag("--version", std::string(tlasso_version()));
  app.require_subcommand(1);

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "Estimate a lag-resolved Granger network from CSV data");
  estimate->add_option("-i,--input", est.input, "CSV time-course data (long or wide)")->required();
  estimate->add_option("-o,--output", est.output, "Output directory")->required();
  estimate->add_option("--penalty", est.penalty, "lasso, adaptive_lasso, truncating_lasso or truncating_adaptive_lasso")
      ->check(CLI::IsMember({"lasso", "adaptive_lasso", "truncating_lasso", "truncating_adaptive_lasso", "alasso",
                             "tlasso", "talasso"}))
      ->capture_default_str();
  estimate->add_option("--alpha", est.alpha, "False-positive control level")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  estimate->add_option("--beta", est.beta, "Allowed false-negative rate for truncation")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  estimate->add_option("--dmax", est.dmax, "Largest lag (default T - 1)");
  estimate->add_option("--lambda", est.lambda, "Override the penalty level")->check(CLI::PositiveNumber);
  estimate->add_option("--multiplier", est.multiplier, "Finite penalty multiplier M on truncated lags (default: exact zero)")
      ->check(CLI::Range(1.0, HUGE_VAL));
  estimate->add_option("--response-mode", est.response_mode, "auto, last_timepoint or rolling_window")
      ->check(CLI::IsMember({"auto", "last_timepoint", "rolling_window"}))
      ->capture_default_str();
  estimate->add_option("--truth", est.truth, "True edge list (target, source, lag[, weight]); writes metrics");
  estimate->add_option("--max-sweeps", est.max_sweeps, "Block relaxation sweep limit")->capture_default_str();
  estimate->add_option("--sweep-tol", est.sweep_tol, "Block relaxation tolerance")->capture_default_str();
  estimate->add_option("--tol", est.tol, "Coordinate descent tolerance")->capture_default_str();
  estimate->add_option("--max-iter", est.max_iter, "Coordinate descent sweep limit")->capture_default_str();
  estimate->add_option("--threads", est.threads, "Worker threads (default TLASSO_THREADS or 1)");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Simulate a sparse VAR network and replicate time series");
  add_sim_options(simulate, sim.sim);
  simulate->add_option("-o,--output", sim.output, "Output directory")->required();
  simulate->add_option("--format", sim.format, "CSV layout: wide or long")
      ->check(CLI::IsMember({"wide", "long"}))
      ->capture_default_str();

  BenchmarkArgs bench;
  auto* benchmark = app.add_subcommand("benchmark", "Simulate, fit all penalty families and tabulate metrics");
  add_sim_options(benchmark, bench.sim);
  benchmark->add_option("-o,--output", bench.output, "Output directory")->required();
  benchmark->add_option("-R,--runs", bench.runs, "Number of simulated datasets")->capture_default_str();
  benchmark->add_option("--alpha", bench.alphas, "Alpha grid")->delimiter(',')->capture_default_str();
  benchmark->add_option("--beta", bench.beta, "Allowed false-negative rate for truncation")->capture_default_str();
  benchmark->add_option("--dmax", bench.dmax, "Largest lag (default T - 1)");
  benchmark->add_option("--methods", bench.methods, "Comma-separated penalties (default: all four)");
  benchmark->add_option("--threads", bench.threads, "Worker threads (default TLASSO_THREADS or 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*estimate) return run_estimate(est);
    if (*simulate) return run_simulate(sim);
    if (*benchmark) return run_benchmark(bench);
  } catch (const Failure& f) {
    return f.code;
  }
  return kUsage;
}
