#include "benchmark.hpp"

#include "csv_io.hpp"
#include "error.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace tlasso {

namespace {

struct Moments {
  std::size_t count = 0;
  double sum = 0.0, sum_sq = 0.0;

  void add(double x) {
    ++count;
    sum += x;
    sum_sq += x * x;
  }
  double mean() const { return count ? sum / static_cast<double>(count) : std::nan(""); }
  double sd() const {
    if (count < 2) return count ? 0.0 : std::nan("");
    const double m = mean();
    return std::sqrt(std::max(0.0, (sum_sq - static_cast<double>(count) * m * m) / static_cast<double>(count - 1)));
  }
};

std::string num(double v) { return std::isfinite(v) ? format_double(v) : "NA"; }

struct ReplicateOutcome {
  std::vector<BenchmarkRow> rows;
  std::optional<BenchmarkFailure> failure;
};

ReplicateOutcome run_replicate(const BenchmarkManifest& m, std::size_t r) {
  ReplicateOutcome out;
  SimulationSpec spec = m.spec;
  spec.seed = replicate_seed(m.spec.seed, r);
  try {
    const GroundTruthNetwork truth = generate_network(spec);
    const double radius = stability_check(truth).spectral_radius;
    const TimeSeriesDataset data = simulate(spec, truth);
    for (Penalty method : m.methods) {
      for (double alpha : m.alpha_grid) {
        EstimationConfig config;
        config.penalty = method;
        config.alpha = alpha;
        config.beta = m.beta;
        config.d_max = m.d_max;
        const GrangerEstimate est = fit(data, config);
        for (EdgeLevel level : {EdgeLevel::LagResolved, EdgeLevel::Cumulative}) {
          out.rows.push_back({.replicate = r,
                              .seed = spec.seed,
                              .method = method,
                              .alpha = alpha,
                              .metrics = evaluate(est.tensor, truth, level),
                              .estimated_order = est.estimated_order,
                              .sweeps = est.sweeps,
                              .converged = est.converged,
                              .nonzeros = est.tensor.nonzeros(),
                              .spectral_radius = radius});
        }
      }
    }
  } catch (const std::exception& e) {
    out.rows.clear();
    out.failure = BenchmarkFailure{.replicate = r, .seed = spec.seed, .message = e.what()};
  }
  return out;
}

}  // namespace

void validate(const BenchmarkManifest& m) {
  validate(m.spec);
  if (m.replicates < 1) fail(ErrorCode::InvalidArgument, "benchmark needs at least one replicate");
  if (m.alpha_grid.empty()) fail(ErrorCode::InvalidArgument, "alpha grid is empty");
  for (double a : m.alpha_grid)
    if (!(a > 0.0 && a < 1.0)) fail(ErrorCode::InvalidArgument, "alpha grid values must lie in (0, 1)");
  if (m.methods.empty()) fail(ErrorCode::InvalidArgument, "no methods selected");
  if (m.spec.n_edges == 0) fail(ErrorCode::EmptyTruth, "benchmark metrics need at least one true edge");
  EstimationConfig probe;
  probe.beta = m.beta;
  probe.d_max = m.d_max;
  validate(probe, m.spec.T);
}

std::uint64_t replicate_seed(std::uint64_t master_seed, std::size_t replicate) {
  return derive_seed(derive_seed(master_seed, 2), replicate);
}

bool BenchmarkResult::failed() const { return failures.size() * 10 > manifest.replicates; }

BenchmarkResult run_benchmark(const BenchmarkManifest& manifest) {
  validate(manifest);
  std::vector<ReplicateOutcome> outcomes(manifest.replicates);
  parallel_for(manifest.replicates, manifest.threads, [&](std::size_t r) { outcomes[r] = run_replicate(manifest, r); });

  BenchmarkResult result;
  result.manifest = manifest;
  for (auto& o : outcomes) {
    if (o.failure) result.failures.push_back(std::move(*o.failure));
    for (auto& row : o.rows) result.rows.push_back(std::move(row));
  }
  return result;
}

std::string bench_tsv(const BenchmarkResult& result) {
  std::ostringstream out;
  out << "replicate\tseed\tmethod\talpha\tlevel\tshd\tprecision\trecall\tf1\tfalse_positive_rate\tsign_accuracy\t"
         "estimated_edges\testimated_order\tsweeps\tconverged\tspectral_radius\tstatus\n";
  auto failure = result.failures.begin();
  auto flush_failures_before = [&](std::size_t replicate) {
    for (; failure != result.failures.end() && failure->replicate < replicate; ++failure) {
      std::string message = failure->message;
      std::replace_if(message.begin(), message.end(), [](char c) { return c == '\t' || c == '\n'; }, ' ');
      out << failure->replicate + 1 << '\t' << failure->seed << "\tNA\tNA\tNA\tNA\tNA\tNA\tNA\tNA\tNA\tNA\tNA\tNA\tNA\tNA\t"
          << "failed: " << message << '\n';
    }
  };
  for (const auto& row : result.rows) {
    flush_failures_before(row.replicate);
    const auto& m = row.metrics;
    out << row.replicate + 1 << '\t' << row.seed << '\t' << to_string(row.method) << '\t' << num(row.alpha) << '\t'
        << to_string(m.level) << '\t' << m.shd << '\t' << num(m.precision) << '\t' << num(m.recall) << '\t' << num(m.f1)
        << '\t' << num(m.false_positive_rate) << '\t' << (m.sign_accuracy ? num(*m.sign_accuracy) : "NA") << '\t'
        << m.estimated_edges << '\t' << row.estimated_order << '\t' << row.sweeps << '\t'
        << (row.converged ? "true" : "false") << '\t' << num(row.spectral_radius) << "\tok\n";
  }
  flush_failures_before(result.manifest.replicates);
  return out.str();
}

std::string bench_summary_tsv(const BenchmarkResult& result) {
  std::ostringstream out;
  out << "method\talpha\tlevel\treplicates";
  for (const char* name : {"shd", "precision", "recall", "f1", "false_positive_rate", "sign_accuracy", "estimated_order", "sweeps"})
    out << '\t' << name << "_mean\t" << name << "_sd";
  out << '\n';
  for (Penalty method : result.manifest.methods) {
    for (double alpha : result.manifest.alpha_grid) {
      for (EdgeLevel level : {EdgeLevel::LagResolved, EdgeLevel::Cumulative}) {
        std::array<Moments, 8> acc;
        for (const auto& row : result.rows) {
          if (row.method != method || row.alpha != alpha || row.metrics.level != level) continue;
          const auto& m = row.metrics;
          acc[0].add(static_cast<double>(m.shd));
          acc[1].add(m.precision);
          acc[2].add(m.recall);
          acc[3].add(m.f1);
          acc[4].add(m.false_positive_rate);
          if (m.sign_accuracy) acc[5].add(*m.sign_accuracy);
          acc[6].add(static_cast<double>(row.estimated_order));
          acc[7].add(row.sweeps);
        }
        out << to_string(method) << '\t' << num(alpha) << '\t' << to_string(level) << '\t' << acc[0].count;
        for (const auto& a : acc) out << '\t' << num(a.mean()) << '\t' << num(a.sd());
        out << '\n';
      }
    }
  }
  return out.str();
}

std::string roc_tsv(const BenchmarkResult& result) {
  std::ostringstream out;
  out << "method\talpha\tfalse_positive_rate\ttrue_positive_rate\n";
  for (Penalty method : result.manifest.methods) {
    std::vector<RocPoint> points;
    for (double alpha : result.manifest.alpha_grid) {
      Moments fpr, tpr;
      for (const auto& row : result.rows) {
        if (row.method != method || row.alpha != alpha || row.metrics.level != EdgeLevel::LagResolved) continue;
        fpr.add(row.metrics.false_positive_rate);
        tpr.add(row.metrics.recall);
      }
      if (fpr.count) points.push_back({.false_positive_rate = fpr.mean(), .true_positive_rate = tpr.mean(), .alpha = alpha});
    }
    std::stable_sort(points.begin(), points.end(), [](const RocPoint& a, const RocPoint& b) {
      return a.false_positive_rate < b.false_positive_rate;
    });
    for (const auto& p : points)
      out << to_string(method) << '\t' << num(p.alpha) << '\t' << num(p.false_positive_rate) << '\t'
          << num(p.true_positive_rate) << '\n';
  }
  return out.str();
}

nlohmann::ordered_json manifest_json(const BenchmarkManifest& m) {
  nlohmann::ordered_json j;
  j["seed"] = m.spec.seed;
  j["replicates"] = m.replicates;
  j["p"] = m.spec.p;
  j["T"] = m.spec.T;
  j["n"] = m.spec.n;
  j["d"] = m.spec.d;
  j["rho"] = m.spec.rho;
  j["sigma"] = m.spec.sigma;
  j["edges"] = m.spec.n_edges;
  j["sign_mode"] = to_string(m.spec.sign_mode);
  j["noise_mode"] = to_string(m.spec.noise_mode);
  j["burn_in"] = m.spec.burn_in;
  j["alpha_grid"] = m.alpha_grid;
  j["beta"] = m.beta;
  j["d_max"] = m.d_max ? nlohmann::ordered_json(*m.d_max) : nlohmann::ordered_json(nullptr);
  auto& methods = j["methods"] = nlohmann::ordered_json::array();
  for (Penalty p : m.methods) methods.push_back(to_string(p));
  return j;
}

}  // namespace tlasso
