#pragma once

#include "evaluation.hpp"
#include "granger_estimator.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace tlasso {

/// target, source, lag, coefficient, sign; one row per nonzero lag-resolved
/// coefficient ordered by (lag, target, source).
std::string edges_tsv(const LagCoefficientTensor& tensor, const std::vector<std::string>& names);

/// target, source, sign, dominant_lag, lags; one row per cumulative edge.
std::string network_tsv(const LagCoefficientTensor& tensor, const std::vector<std::string>& names);

nlohmann::ordered_json summary_json(const GrangerEstimate& estimate, const TimeSeriesDataset& data);

std::string metrics_tsv(const std::vector<MetricsReport>& reports);
nlohmann::ordered_json metrics_json(const std::vector<MetricsReport>& reports);

/// Writes the text verbatim in binary mode; throws IoError naming the path.
void write_text(const std::string& path, const std::string& text);

}  // namespace tlasso
