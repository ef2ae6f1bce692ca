#pragma once

#include "dataset.hpp"
#include "granger_estimator.hpp"
#include "var_simulator.hpp"

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace tlasso {

enum class EdgeLevel { LagResolved, Cumulative };

const char* to_string(EdgeLevel level);

/// Zero-based target and source; one-based lag, 0 at the cumulative level.
struct EdgeKey {
  std::size_t target = 0;
  std::size_t source = 0;
  std::size_t lag = 0;

  auto operator<=>(const EdgeKey&) const = default;
};

struct EdgeSet {
  EdgeLevel level = EdgeLevel::LagResolved;
  /// Edge -> sign in {-1, +1}.
  std::map<EdgeKey, int> edges;

  std::size_t size() const { return edges.size(); }
  bool contains(const EdgeKey& key) const { return edges.contains(key); }
};

/// Entries with |A^t(i, j)| > threshold.
EdgeSet lag_resolved_edges(const LagCoefficientTensor& tensor, double threshold = 0.0);

/// Edge (i, j) when any lag has |A^t(i, j)| > threshold. The sign comes from
/// the largest-magnitude lag, the earliest lag winning ties.
EdgeSet cumulative_network(const LagCoefficientTensor& tensor, double threshold = 0.0);

EdgeSet edge_set(const LagCoefficientTensor& tensor, EdgeLevel level, double threshold = 0.0);

/// |estimated \ truth| + |truth \ estimated|.
std::size_t shd(const EdgeSet& estimated, const EdgeSet& truth);

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// P = 0 for an empty estimate, F1 = 0 when P + R = 0. Throws EmptyTruth.
PrecisionRecall precision_recall_f1(const EdgeSet& estimated, const EdgeSet& truth);

std::size_t true_positives(const EdgeSet& estimated, const EdgeSet& truth);
std::size_t false_positives(const EdgeSet& estimated, const EdgeSet& truth);

/// Number of candidate slots at the given level: d_max * p^2 or p^2.
std::size_t candidate_slots(EdgeLevel level, std::size_t p, std::size_t d_max);

/// Fraction of recovered true lag-resolved edges whose estimated sign matches.
/// Empty when no true edge was recovered.
std::optional<double> sign_accuracy(const LagCoefficientTensor& estimate, const GroundTruthNetwork& truth);

struct RocPoint {
  double false_positive_rate = 0.0;
  double true_positive_rate = 0.0;
  double alpha = 0.0;
};

struct MetricsReport {
  EdgeLevel level = EdgeLevel::LagResolved;
  std::size_t shd = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t estimated_edges = 0;
  std::size_t true_edges = 0;
  double false_positive_rate = 0.0;
  std::optional<double> sign_accuracy;
  std::vector<RocPoint> roc_points;
};

MetricsReport evaluate(const LagCoefficientTensor& estimate, const GroundTruthNetwork& truth, EdgeLevel level);

/// Refits the configured estimator at each alpha. TPR is recall and FPR is
/// |E_hat \ E| / (d_max p^2 - |E|) at the lag-resolved level; sorted by FPR.
std::vector<RocPoint> roc_points(const TimeSeriesDataset& data, const GroundTruthNetwork& truth,
                                 std::span<const double> alpha_grid, const EstimationConfig& config);

}  // namespace tlasso
