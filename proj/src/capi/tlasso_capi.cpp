#include "tlasso/tlasso.h"

#include "benchmark.hpp"
#include "csv_io.hpp"
#include "error.hpp"
#include "evaluation.hpp"
#include "granger_estimator.hpp"
#include "parallel.hpp"
#include "reports.hpp"
#include "var_simulator.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <memory>
#include <new>
#include <string>

struct tlasso_dataset {
  tlasso::TimeSeriesDataset data;
};
struct tlasso_config {
  tlasso::EstimationConfig config;
};
struct tlasso_estimate {
  tlasso::GrangerEstimate est;
};
struct tlasso_sim_spec {
  tlasso::SimulationSpec spec;
};
struct tlasso_network {
  tlasso::GroundTruthNetwork net;
};
struct tlasso_metrics {
  std::vector<tlasso::MetricsReport> reports;
};
struct tlasso_benchmark {
  tlasso::BenchmarkResult result;
};

namespace {

thread_local std::string last_error;

tlasso_status to_status(tlasso::ErrorCode code) {
  using tlasso::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return TLASSO_ERR_INVALID_ARGUMENT;
    case ErrorCode::EmptyMatrix: return TLASSO_ERR_EMPTY_MATRIX;
    case ErrorCode::DimensionMismatch: return TLASSO_ERR_DIMENSION_MISMATCH;
    case ErrorCode::InsufficientTimepoints: return TLASSO_ERR_INSUFFICIENT_TIMEPOINTS;
    case ErrorCode::InsufficientRows: return TLASSO_ERR_INSUFFICIENT_ROWS;
    case ErrorCode::InvalidQuantile: return TLASSO_ERR_INVALID_QUANTILE;
    case ErrorCode::TooManyEdges: return TLASSO_ERR_TOO_MANY_EDGES;
    case ErrorCode::LevelMismatch: return TLASSO_ERR_LEVEL_MISMATCH;
    case ErrorCode::EmptyTruth: return TLASSO_ERR_EMPTY_TRUTH;
    case ErrorCode::NoTruePositives: return TLASSO_ERR_NO_TRUE_POSITIVES;
    case ErrorCode::MissingCell: return TLASSO_ERR_MISSING_CELL;
    case ErrorCode::NonRectangular: return TLASSO_ERR_NON_RECTANGULAR;
    case ErrorCode::ParseError: return TLASSO_ERR_PARSE;
    case ErrorCode::IoError: return TLASSO_ERR_IO;
  }
  return TLASSO_ERR_INTERNAL;
}

template <class F>
tlasso_status guard(F&& body) {
  try {
    body();
    last_error.clear();
    return TLASSO_OK;
  } catch (const tlasso::Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return TLASSO_ERR_OUT_OF_MEMORY;
  } catch (const std::exception& e) {
    last_error = e.what();
    return TLASSO_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return TLASSO_ERR_INTERNAL;
  }
}

template <class T>
T& need(T* handle, const char* what) {
  if (!handle) tlasso::fail(tlasso::ErrorCode::InvalidArgument, std::string(what) + " is null");
  return *handle;
}

template <class T>
const T& need(const T* handle, const char* what) {
  if (!handle) tlasso::fail(tlasso::ErrorCode::InvalidArgument, std::string(what) + " is null");
  return *handle;
}

std::string need_string(const char* s, const char* what) {
  if (!s) tlasso::fail(tlasso::ErrorCode::InvalidArgument, std::string(what) + " is null");
  return s;
}

std::filesystem::path in_dir(const char* dir, const char* file) { return std::filesystem::path(need_string(dir, "directory")) / file; }

}  // namespace

extern "C" {

const char* tlasso_version(void) { return TLASSO_VERSION; }

const char* tlasso_status_string(tlasso_status status) {
  switch (status) {
    case TLASSO_OK: return "ok";
    case TLASSO_ERR_INVALID_ARGUMENT: return "invalid argument";
    case TLASSO_ERR_EMPTY_MATRIX: return "empty matrix";
    case TLASSO_ERR_DIMENSION_MISMATCH: return "dimension mismatch";
    case TLASSO_ERR_INSUFFICIENT_TIMEPOINTS: return "insufficient time points";
    case TLASSO_ERR_INSUFFICIENT_ROWS: return "insufficient rows";
    case TLASSO_ERR_INVALID_QUANTILE: return "invalid quantile";
    case TLASSO_ERR_TOO_MANY_EDGES: return "too many edges";
    case TLASSO_ERR_LEVEL_MISMATCH: return "level mismatch";
    case TLASSO_ERR_EMPTY_TRUTH: return "empty truth";
    case TLASSO_ERR_NO_TRUE_POSITIVES: return "no true positives";
    case TLASSO_ERR_MISSING_CELL: return "missing cell";
    case TLASSO_ERR_NON_RECTANGULAR: return "non-rectangular data";
    case TLASSO_ERR_PARSE: return "parse error";
    case TLASSO_ERR_IO: return "i/o error";
    case TLASSO_ERR_OUT_OF_MEMORY: return "out of memory";
    case TLASSO_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* tlasso_last_error(void) { return last_error.c_str(); }

unsigned tlasso_default_threads(void) { return tlasso::threads_from_env(); }

tlasso_status tlasso_dataset_create(size_t n, size_t T, size_t p, const double* values, const char* const* names,
                                    tlasso_dataset** out) {
  return guard([&] {
    need(out, "out");
    if (!values) tlasso::fail(tlasso::ErrorCode::InvalidArgument, "values is null");
    std::vector<std::string> labels;
    if (names)
      for (size_t i = 0; i < p; ++i) labels.push_back(need_string(names[i], "variable name"));
    else
      labels = tlasso::default_variable_names(p);
    *out = new tlasso_dataset{tlasso::TimeSeriesDataset(n, T, p, std::vector<double>(values, values + n * T * p), std::move(labels))};
  });
}

tlasso_status tlasso_dataset_load_csv(const char* path, tlasso_dataset** out) {
  return guard([&] {
    need(out, "out");
    *out = new tlasso_dataset{tlasso::load_csv(need_string(path, "path"))};
  });
}

tlasso_status tlasso_dataset_write_csv(const tlasso_dataset* data, const char* path, int long_format) {
  return guard([&] {
    tlasso::write_csv(need(data, "dataset").data, need_string(path, "path"),
                      long_format ? tlasso::CsvFormat::Long : tlasso::CsvFormat::Wide);
  });
}

tlasso_status tlasso_dataset_dims(const tlasso_dataset* data, size_t* n, size_t* T, size_t* p) {
  return guard([&] {
    const auto& d = need(data, "dataset").data;
    if (n) *n = d.replicates();
    if (T) *T = d.timepoints();
    if (p) *p = d.variables();
  });
}

tlasso_status tlasso_dataset_value(const tlasso_dataset* data, size_t r, size_t t, size_t i, double* out) {
  return guard([&] {
    const auto& d = need(data, "dataset").data;
    if (r >= d.replicates() || t >= d.timepoints() || i >= d.variables())
      tlasso::fail(tlasso::ErrorCode::InvalidArgument, "dataset index out of range");
    need(out, "out") = d.at(r, t, i);
  });
}

const char* tlasso_dataset_name(const tlasso_dataset* data, size_t i) {
  if (!data || i >= data->data.names().size()) return nullptr;
  return data->data.names()[i].c_str();
}

void tlasso_dataset_free(tlasso_dataset* data) { delete data; }

tlasso_status tlasso_config_create(tlasso_config** out) {
  return guard([&] { need(out, "out") = new tlasso_config{}; });
}

tlasso_status tlasso_config_set_penalty(tlasso_config* config, const char* name) {
  return guard([&] {
    const auto penalty = tlasso::parse_penalty(need_string(name, "penalty"));
    if (!penalty) tlasso::fail(tlasso::ErrorCode::InvalidArgument, std::string("unknown penalty '") + name + "'");
    need(config, "config").config.penalty = *penalty;
  });
}

tlasso_status tlasso_config_set_alpha(tlasso_config* config, double alpha) {
  return guard([&] {
    if (!(alpha > 0.0 && alpha < 1.0)) tlasso::fail(tlasso::ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
    need(config, "config").config.alpha = alpha;
  });
}

tlasso_status tlasso_config_set_beta(tlasso_config* config, double beta) {
  return guard([&] {
    if (!(beta >= 0.0 && beta < 1.0)) tlasso::fail(tlasso::ErrorCode::InvalidArgument, "beta must lie in [0, 1)");
    need(config, "config").config.beta = beta;
  });
}

tlasso_status tlasso_config_set_dmax(tlasso_config* config, size_t d_max) {
  return guard([&] {
    auto& c = need(config, "config").config;
    if (d_max == 0) c.d_max.reset();
    else c.d_max = d_max;
  });
}

tlasso_status tlasso_config_set_lambda(tlasso_config* config, double lambda) {
  return guard([&] {
    auto& c = need(config, "config").config;
    if (!std::isfinite(lambda)) tlasso::fail(tlasso::ErrorCode::InvalidArgument, "lambda must be finite");
    if (lambda <= 0.0) c.lambda_override.reset();
    else c.lambda_override = lambda;
  });
}

tlasso_status tlasso_config_set_truncation_multiplier(tlasso_config* config, double multiplier) {
  return guard([&] {
    auto& c = need(config, "config").config;
    if (multiplier <= 0.0) {
      c.truncation_multiplier.reset();
      return;
    }
    if (!(multiplier >= 1.0) || !std::isfinite(multiplier))
      tlasso::fail(tlasso::ErrorCode::InvalidArgument, "truncation multiplier must be finite and at least 1");
    c.truncation_multiplier = multiplier;
  });
}

tlasso_status tlasso_config_set_response_mode(tlasso_config* config, const char* name) {
  return guard([&] {
    const auto mode = tlasso::parse_response_mode(need_string(name, "response mode"));
    if (!mode) tlasso::fail(tlasso::ErrorCode::InvalidArgument, std::string("unknown response mode '") + name + "'");
    need(config, "config").config.response_mode = *mode;
  });
}

tlasso_status tlasso_config_set_solver(tlasso_config* config, double tol, int max_iter) {
  return guard([&] {
    if (!(tol > 0.0) || max_iter < 1) tlasso::fail(tlasso::ErrorCode::InvalidArgument, "solver needs tol > 0 and max_iter >= 1");
    auto& c = need(config, "config").config;
    c.solver.tol = tol;
    c.solver.max_iter = max_iter;
  });
}

tlasso_status tlasso_config_set_sweeps(tlasso_config* config, double tol, int max_sweeps) {
  return guard([&] {
    if (!(tol > 0.0) || max_sweeps < 1)
      tlasso::fail(tlasso::ErrorCode::InvalidArgument, "block relaxation needs tol > 0 and max_sweeps >= 1");
    auto& c = need(config, "config").config;
    c.sweep_tol = tol;
    c.max_sweeps = max_sweeps;
  });
}

tlasso_status tlasso_config_set_threads(tlasso_config* config, unsigned threads) {
  return guard([&] { need(config, "config").config.threads = threads == 0 ? 1 : threads; });
}

void tlasso_config_free(tlasso_config* config) { delete config; }

tlasso_status tlasso_fit(const tlasso_dataset* data, const tlasso_config* config, tlasso_estimate** out) {
  return guard([&] {
    need(out, "out");
    *out = new tlasso_estimate{tlasso::fit(need(data, "dataset").data, need(config, "config").config)};
  });
}

tlasso_status tlasso_estimate_dims(const tlasso_estimate* est, size_t* lags, size_t* p) {
  return guard([&] {
    const auto& e = need(est, "estimate").est;
    if (lags) *lags = e.tensor.lags();
    if (p) *p = e.tensor.variables();
  });
}

tlasso_status tlasso_estimate_order(const tlasso_estimate* est, size_t* order) {
  return guard([&] { need(order, "order") = need(est, "estimate").est.estimated_order; });
}

tlasso_status tlasso_estimate_lambda(const tlasso_estimate* est, double* lambda) {
  return guard([&] { need(lambda, "lambda") = need(est, "estimate").est.lambda_used; });
}

tlasso_status tlasso_estimate_sweeps(const tlasso_estimate* est, int* sweeps, int* converged) {
  return guard([&] {
    const auto& e = need(est, "estimate").est;
    if (sweeps) *sweeps = e.sweeps;
    if (converged) *converged = e.converged ? 1 : 0;
  });
}

tlasso_status tlasso_estimate_coefficient(const tlasso_estimate* est, size_t lag, size_t target, size_t source,
                                          double* out) {
  return guard([&] {
    const auto& e = need(est, "estimate").est;
    if (lag < 1 || lag > e.tensor.lags() || target >= e.tensor.variables() || source >= e.tensor.variables())
      tlasso::fail(tlasso::ErrorCode::InvalidArgument, "coefficient index out of range");
    need(out, "out") = e.tensor.lag(lag)(static_cast<Eigen::Index>(target), static_cast<Eigen::Index>(source));
  });
}

tlasso_status tlasso_estimate_nonzeros(const tlasso_estimate* est, size_t lag, size_t* out) {
  return guard([&] {
    const auto& e = need(est, "estimate").est;
    if (lag < 1 || lag > e.tensor.lags()) tlasso::fail(tlasso::ErrorCode::InvalidArgument, "lag out of range");
    need(out, "out") = e.tensor.nonzeros(lag);
  });
}

tlasso_status tlasso_estimate_objective_trace(const tlasso_estimate* est, double* values, size_t* count) {
  return guard([&] {
    const auto& trace = need(est, "estimate").est.objective_trace;
    if (values) std::copy(trace.begin(), trace.end(), values);
    need(count, "count") = trace.size();
  });
}

tlasso_status tlasso_estimate_write(const tlasso_estimate* est, const tlasso_dataset* data, const char* dir) {
  return guard([&] {
    const auto& e = need(est, "estimate").est;
    const auto& d = need(data, "dataset").data;
    if (d.variables() != e.tensor.variables())
      tlasso::fail(tlasso::ErrorCode::DimensionMismatch, "dataset and estimate have different numbers of variables");
    tlasso::write_text(in_dir(dir, "edges.tsv").string(), tlasso::edges_tsv(e.tensor, d.names()));
    tlasso::write_text(in_dir(dir, "network.tsv").string(), tlasso::network_tsv(e.tensor, d.names()));
    tlasso::write_text(in_dir(dir, "summary.json").string(), tlasso::summary_json(e, d).dump(2) + "\n");
  });
}

void tlasso_estimate_free(tlasso_estimate* est) { delete est; }

tlasso_status tlasso_sim_spec_create(tlasso_sim_spec** out) {
  return guard([&] { need(out, "out") = new tlasso_sim_spec{}; });
}

tlasso_status tlasso_sim_spec_set_dims(tlasso_sim_spec* spec, size_t p, size_t T, size_t n, size_t d) {
  return guard([&] {
    auto& s = need(spec, "spec").spec;
    s.p = p;
    s.T = T;
    s.n = n;
    s.d = d;
  });
}

tlasso_status tlasso_sim_spec_set_signal(tlasso_sim_spec* spec, double rho, double sigma, size_t edges) {
  return guard([&] {
    auto& s = need(spec, "spec").spec;
    s.rho = rho;
    s.sigma = sigma;
    s.n_edges = edges;
  });
}

tlasso_status tlasso_sim_spec_set_seed(tlasso_sim_spec* spec, uint64_t seed) {
  return guard([&] { need(spec, "spec").spec.seed = seed; });
}

tlasso_status tlasso_sim_spec_set_sign_mode(tlasso_sim_spec* spec, const char* name) {
  return guard([&] {
    const auto mode = tlasso::parse_sign_mode(need_string(name, "sign mode"));
    if (!mode) tlasso::fail(tlasso::ErrorCode::InvalidArgument, std::string("unknown sign mode '") + name + "'");
    need(spec, "spec").spec.sign_mode = *mode;
  });
}

tlasso_status tlasso_sim_spec_set_noise_mode(tlasso_sim_spec* spec, const char* name) {
  return guard([&] {
    const auto mode = tlasso::parse_noise_mode(need_string(name, "noise mode"));
    if (!mode) tlasso::fail(tlasso::ErrorCode::InvalidArgument, std::string("unknown noise mode '") + name + "'");
    need(spec, "spec").spec.noise_mode = *mode;
  });
}

tlasso_status tlasso_sim_spec_set_burn_in(tlasso_sim_spec* spec, size_t burn_in) {
  return guard([&] { need(spec, "spec").spec.burn_in = burn_in; });
}

void tlasso_sim_spec_free(tlasso_sim_spec* spec) { delete spec; }

tlasso_status tlasso_network_generate(const tlasso_sim_spec* spec, tlasso_network** out) {
  return guard([&] {
    need(out, "out");
    *out = new tlasso_network{tlasso::generate_network(need(spec, "spec").spec)};
  });
}

tlasso_status tlasso_network_read(const char* path, const tlasso_dataset* names_from, tlasso_network** out) {
  return guard([&] {
    need(out, "out");
    *out = new tlasso_network{tlasso::read_truth(need_string(path, "path"), need(names_from, "dataset").data.names())};
  });
}

tlasso_status tlasso_network_write(const tlasso_network* net, const tlasso_dataset* names_from, const char* path) {
  return guard([&] {
    const auto& n = need(net, "network").net;
    const auto& names = need(names_from, "dataset").data.names();
    if (names.size() != n.tensor.variables())
      tlasso::fail(tlasso::ErrorCode::DimensionMismatch, "dataset and network have different numbers of variables");
    tlasso::write_truth(n, names, need_string(path, "path"));
  });
}

tlasso_status tlasso_network_edge_count(const tlasso_network* net, size_t* count) {
  return guard([&] { need(count, "count") = need(net, "network").net.edges.size(); });
}

tlasso_status tlasso_network_spectral_radius(const tlasso_network* net, double* radius) {
  return guard([&] { need(radius, "radius") = tlasso::stability_check(need(net, "network").net).spectral_radius; });
}

void tlasso_network_free(tlasso_network* net) { delete net; }

tlasso_status tlasso_simulate(const tlasso_sim_spec* spec, const tlasso_network* net, unsigned threads,
                              tlasso_dataset** out) {
  return guard([&] {
    need(out, "out");
    *out = new tlasso_dataset{tlasso::simulate(need(spec, "spec").spec, need(net, "network").net, threads)};
  });
}

tlasso_status tlasso_evaluate(const tlasso_estimate* est, const tlasso_network* truth, tlasso_metrics** out) {
  return guard([&] {
    need(out, "out");
    const auto& e = need(est, "estimate").est;
    const auto& t = need(truth, "truth").net;
    auto m = std::make_unique<tlasso_metrics>();
    for (auto level : {tlasso::EdgeLevel::LagResolved, tlasso::EdgeLevel::Cumulative})
      m->reports.push_back(tlasso::evaluate(e.tensor, t, level));
    *out = m.release();
  });
}

tlasso_status tlasso_metrics_value(const tlasso_metrics* metrics, tlasso_level level, const char* field, double* out) {
  return guard([&] {
    const auto& reports = need(metrics, "metrics").reports;
    if (level != TLASSO_LAG_RESOLVED && level != TLASSO_CUMULATIVE)
      tlasso::fail(tlasso::ErrorCode::InvalidArgument, "unknown level");
    const auto& m = reports.at(static_cast<std::size_t>(level));
    const std::string f = need_string(field, "field");
    double& v = need(out, "out");
    if (f == "shd") v = static_cast<double>(m.shd);
    else if (f == "precision") v = m.precision;
    else if (f == "recall") v = m.recall;
    else if (f == "f1") v = m.f1;
    else if (f == "false_positive_rate") v = m.false_positive_rate;
    else if (f == "sign_accuracy") v = m.sign_accuracy.value_or(std::numeric_limits<double>::quiet_NaN());
    else tlasso::fail(tlasso::ErrorCode::InvalidArgument, "unknown metrics field '" + f + "'");
  });
}

tlasso_status tlasso_metrics_write(const tlasso_metrics* metrics, const char* dir) {
  return guard([&] {
    const auto& reports = need(metrics, "metrics").reports;
    tlasso::write_text(in_dir(dir, "metrics.tsv").string(), tlasso::metrics_tsv(reports));
    tlasso::write_text(in_dir(dir, "metrics.json").string(), tlasso::metrics_json(reports).dump(2) + "\n");
  });
}

void tlasso_metrics_free(tlasso_metrics* metrics) { delete metrics; }

tlasso_status tlasso_benchmark_run(const tlasso_sim_spec* spec, size_t replicates, const double* alphas,
                                   size_t alpha_count, double beta, size_t d_max, const char* methods,
                                   unsigned threads, tlasso_benchmark** out) {
  return guard([&] {
    need(out, "out");
    if (!alphas && alpha_count) tlasso::fail(tlasso::ErrorCode::InvalidArgument, "alphas is null");
    tlasso::BenchmarkManifest m;
    m.spec = need(spec, "spec").spec;
    m.replicates = replicates;
    m.alpha_grid.assign(alphas, alphas + alpha_count);
    m.beta = beta;
    if (d_max) m.d_max = d_max;
    m.threads = threads == 0 ? 1 : threads;
    if (methods) {
      m.methods.clear();
      std::string list = methods;
      std::size_t start = 0;
      while (start <= list.size()) {
        const auto comma = list.find(',', start);
        const std::string name = list.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        const auto penalty = tlasso::parse_penalty(name);
        if (!penalty) tlasso::fail(tlasso::ErrorCode::InvalidArgument, "unknown penalty '" + name + "'");
        m.methods.push_back(*penalty);
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
    }
    *out = new tlasso_benchmark{tlasso::run_benchmark(m)};
  });
}

tlasso_status tlasso_benchmark_failures(const tlasso_benchmark* bench, size_t* failed, int* too_many) {
  return guard([&] {
    const auto& r = need(bench, "benchmark").result;
    if (failed) *failed = r.failures.size();
    if (too_many) *too_many = r.failed() ? 1 : 0;
  });
}

tlasso_status tlasso_benchmark_write(const tlasso_benchmark* bench, const char* dir) {
  return guard([&] {
    const auto& r = need(bench, "benchmark").result;
    tlasso::write_text(in_dir(dir, "bench.tsv").string(), tlasso::bench_tsv(r));
    tlasso::write_text(in_dir(dir, "bench_summary.tsv").string(), tlasso::bench_summary_tsv(r));
    tlasso::write_text(in_dir(dir, "roc.tsv").string(), tlasso::roc_tsv(r));
    tlasso::write_text(in_dir(dir, "manifest.json").string(), tlasso::manifest_json(r.manifest).dump(2) + "\n");
  });
}

void tlasso_benchmark_free(tlasso_benchmark* bench) { delete bench; }

}  // extern "C"
