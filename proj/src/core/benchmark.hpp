#pragma once

#include "evaluation.hpp"
#include "granger_estimator.hpp"
#include "var_simulator.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tlasso {

struct BenchmarkManifest {
  /// spec.seed is the master seed; replicate seeds are derived from it.
  SimulationSpec spec;
  std::size_t replicates = 50;
  std::vector<double> alpha_grid{0.1};
  double beta = 0.1;
  std::optional<std::size_t> d_max;
  std::vector<Penalty> methods{Penalty::Lasso, Penalty::AdaptiveLasso, Penalty::TruncatingLasso,
                               Penalty::TruncatingAdaptiveLasso};
  unsigned threads = 1;
};

void validate(const BenchmarkManifest& manifest);

std::uint64_t replicate_seed(std::uint64_t master_seed, std::size_t replicate);

struct BenchmarkRow {
  std::size_t replicate = 0;
  std::uint64_t seed = 0;
  Penalty method = Penalty::Lasso;
  double alpha = 0.0;
  MetricsReport metrics;
  std::size_t estimated_order = 0;
  int sweeps = 0;
  bool converged = false;
  std::size_t nonzeros = 0;
  double spectral_radius = 0.0;
};

struct BenchmarkFailure {
  std::size_t replicate = 0;
  std::uint64_t seed = 0;
  std::string message;
};

struct BenchmarkResult {
  BenchmarkManifest manifest;
  /// Ordered by replicate, method, alpha, level.
  std::vector<BenchmarkRow> rows;
  std::vector<BenchmarkFailure> failures;

  /// More than 10% of replicates failed.
  bool failed() const;
};

/// simulate -> fit every method at every alpha -> evaluate, per replicate.
/// Replicates run in parallel; the result does not depend on the thread count.
BenchmarkResult run_benchmark(const BenchmarkManifest& manifest);

std::string bench_tsv(const BenchmarkResult& result);
/// Mean and sample sd per (method, alpha, level); sd is 0 for one replicate.
std::string bench_summary_tsv(const BenchmarkResult& result);
/// Mean lag-resolved (FPR, TPR) per (method, alpha), sorted by FPR within a method.
std::string roc_tsv(const BenchmarkResult& result);
nlohmann::ordered_json manifest_json(const BenchmarkManifest& manifest);

}  // namespace tlasso
