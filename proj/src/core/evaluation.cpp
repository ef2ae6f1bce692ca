#include "evaluation.hpp"

#include "error.hpp"

#include <algorithm>
#include <cmath>

namespace tlasso {

const char* to_string(EdgeLevel level) { return level == EdgeLevel::LagResolved ? "lag_resolved" : "cumulative"; }

EdgeSet lag_resolved_edges(const LagCoefficientTensor& tensor, double threshold) {
  if (!(threshold >= 0.0)) fail(ErrorCode::InvalidArgument, "edge threshold must be nonnegative");
  EdgeSet out{.level = EdgeLevel::LagResolved, .edges = {}};
  for (std::size_t t = 1; t <= tensor.lags(); ++t) {
    const auto& A = tensor.lag(t);
    for (Eigen::Index i = 0; i < A.rows(); ++i)
      for (Eigen::Index j = 0; j < A.cols(); ++j)
        if (std::abs(A(i, j)) > threshold)
          out.edges.emplace(EdgeKey{static_cast<std::size_t>(i), static_cast<std::size_t>(j), t}, A(i, j) > 0 ? 1 : -1);
  }
  return out;
}

EdgeSet cumulative_network(const LagCoefficientTensor& tensor, double threshold) {
  if (!(threshold >= 0.0)) fail(ErrorCode::InvalidArgument, "edge threshold must be nonnegative");
  EdgeSet out{.level = EdgeLevel::Cumulative, .edges = {}};
  const auto p = static_cast<Eigen::Index>(tensor.variables());
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      double dominant = 0.0;
      bool present = false;
      for (std::size_t t = 1; t <= tensor.lags(); ++t) {
        const double a = tensor.lag(t)(i, j);
        if (std::abs(a) > threshold) present = true;
        if (std::abs(a) > std::abs(dominant)) dominant = a;
      }
      if (present) out.edges.emplace(EdgeKey{static_cast<std::size_t>(i), static_cast<std::size_t>(j), 0}, dominant > 0 ? 1 : -1);
    }
  }
  return out;
}

EdgeSet edge_set(const LagCoefficientTensor& tensor, EdgeLevel level, double threshold) {
  return level == EdgeLevel::LagResolved ? lag_resolved_edges(tensor, threshold) : cumulative_network(tensor, threshold);
}

namespace {

void require_same_level(const EdgeSet& a, const EdgeSet& b) {
  if (a.level != b.level)
    fail(ErrorCode::LevelMismatch, std::string("cannot compare ") + to_string(a.level) + " and " + to_string(b.level) + " edge sets");
}

}  // namespace

std::size_t true_positives(const EdgeSet& estimated, const EdgeSet& truth) {
  require_same_level(estimated, truth);
  std::size_t count = 0;
  for (const auto& [key, sign] : estimated.edges) count += truth.contains(key) ? 1 : 0;
  return count;
}

std::size_t false_positives(const EdgeSet& estimated, const EdgeSet& truth) {
  return estimated.size() - true_positives(estimated, truth);
}

std::size_t shd(const EdgeSet& estimated, const EdgeSet& truth) {
  const std::size_t tp = true_positives(estimated, truth);
  return (estimated.size() - tp) + (truth.size() - tp);
}

PrecisionRecall precision_recall_f1(const EdgeSet& estimated, const EdgeSet& truth) {
  require_same_level(estimated, truth);
  if (truth.size() == 0) fail(ErrorCode::EmptyTruth, "recall is undefined for an empty true edge set");
  const auto tp = static_cast<double>(true_positives(estimated, truth));
  PrecisionRecall out;
  out.precision = estimated.size() == 0 ? 0.0 : tp / static_cast<double>(estimated.size());
  out.recall = tp / static_cast<double>(truth.size());
  const double sum = out.precision + out.recall;
  out.f1 = sum > 0.0 ? 2.0 * out.precision * out.recall / sum : 0.0;
  return out;
}

std::size_t candidate_slots(EdgeLevel level, std::size_t p, std::size_t d_max) {
  return (level == EdgeLevel::LagResolved ? d_max : 1) * p * p;
}

std::optional<double> sign_accuracy(const LagCoefficientTensor& estimate, const GroundTruthNetwork& truth) {
  std::size_t recovered = 0, matching = 0;
  for (const Edge& e : truth.edges) {
    if (e.lag > estimate.lags()) continue;
    const double a = estimate.lag(e.lag)(static_cast<Eigen::Index>(e.target), static_cast<Eigen::Index>(e.source));
    if (a == 0.0) continue;
    ++recovered;
    matching += (a > 0.0) == (e.weight > 0.0) ? 1 : 0;
  }
  if (recovered == 0) return std::nullopt;
  return static_cast<double>(matching) / static_cast<double>(recovered);
}

MetricsReport evaluate(const LagCoefficientTensor& estimate, const GroundTruthNetwork& truth, EdgeLevel level) {
  if (estimate.variables() != truth.tensor.variables())
    fail(ErrorCode::DimensionMismatch, "estimate and truth have different numbers of variables");
  const EdgeSet est = edge_set(estimate, level);
  const EdgeSet tru = edge_set(truth.tensor, level);
  const auto pr = precision_recall_f1(est, tru);

  MetricsReport report;
  report.level = level;
  report.shd = shd(est, tru);
  report.precision = pr.precision;
  report.recall = pr.recall;
  report.f1 = pr.f1;
  report.true_positives = true_positives(est, tru);
  report.false_positives = est.size() - report.true_positives;
  report.estimated_edges = est.size();
  report.true_edges = tru.size();
  const std::size_t slots = candidate_slots(level, estimate.variables(), estimate.lags());
  const std::size_t negatives = slots > tru.size() ? slots - tru.size() : 0;
  report.false_positive_rate = negatives == 0 ? 0.0 : static_cast<double>(report.false_positives) / static_cast<double>(negatives);
  if (level == EdgeLevel::LagResolved) report.sign_accuracy = sign_accuracy(estimate, truth);
  return report;
}

std::vector<RocPoint> roc_points(const TimeSeriesDataset& data, const GroundTruthNetwork& truth,
                                 std::span<const double> alpha_grid, const EstimationConfig& config) {
  if (alpha_grid.empty()) fail(ErrorCode::InvalidArgument, "alpha grid is empty");
  for (double a : alpha_grid)
    if (!(a > 0.0 && a < 1.0)) fail(ErrorCode::InvalidArgument, "alpha grid values must lie in (0, 1)");
  if (truth.edges.empty()) fail(ErrorCode::EmptyTruth, "true positive rate is undefined for an empty true network");

  std::vector<RocPoint> points;
  points.reserve(alpha_grid.size());
  for (double a : alpha_grid) {
    EstimationConfig c = config;
    c.alpha = a;
    c.lambda_override.reset();
    const auto est = fit(data, c);
    const auto m = evaluate(est.tensor, truth, EdgeLevel::LagResolved);
    points.push_back({.false_positive_rate = m.false_positive_rate, .true_positive_rate = m.recall, .alpha = a});
  }
  std::stable_sort(points.begin(), points.end(), [](const RocPoint& x, const RocPoint& y) {
    return x.false_positive_rate < y.false_positive_rate;
  });
  return points;
}

}  // namespace tlasso
