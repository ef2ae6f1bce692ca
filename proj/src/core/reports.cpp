#include "reports.hpp"

#include "csv_io.hpp"
#include "error.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace tlasso {

namespace {

nlohmann::ordered_json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

std::string edges_tsv(const LagCoefficientTensor& tensor, const std::vector<std::string>& names) {
  std::ostringstream out;
  out << "target\tsource\tlag\tcoefficient\tsign\n";
  for (std::size_t t = 1; t <= tensor.lags(); ++t) {
    const auto& A = tensor.lag(t);
    for (Eigen::Index i = 0; i < A.rows(); ++i)
      for (Eigen::Index j = 0; j < A.cols(); ++j)
        if (A(i, j) != 0.0)
          out << names.at(static_cast<std::size_t>(i)) << '\t' << names.at(static_cast<std::size_t>(j)) << '\t' << t << '\t'
              << format_double(A(i, j)) << '\t' << (A(i, j) > 0 ? '+' : '-') << '\n';
  }
  return out.str();
}

std::string network_tsv(const LagCoefficientTensor& tensor, const std::vector<std::string>& names) {
  std::ostringstream out;
  out << "target\tsource\tsign\tdominant_lag\tlags\n";
  const EdgeSet net = cumulative_network(tensor);
  for (const auto& [key, sign] : net.edges) {
    const auto i = static_cast<Eigen::Index>(key.target), j = static_cast<Eigen::Index>(key.source);
    std::size_t dominant = 0;
    std::string lags;
    for (std::size_t t = 1; t <= tensor.lags(); ++t) {
      const double a = tensor.lag(t)(i, j);
      if (a == 0.0) continue;
      if (dominant == 0 || std::abs(a) > std::abs(tensor.lag(dominant)(i, j))) dominant = t;
      lags += (lags.empty() ? "" : ",") + std::to_string(t);
    }
    out << names.at(key.target) << '\t' << names.at(key.source) << '\t' << (sign > 0 ? '+' : '-') << '\t' << dominant
        << '\t' << lags << '\n';
  }
  return out.str();
}

nlohmann::ordered_json summary_json(const GrangerEstimate& est, const TimeSeriesDataset& data) {
  nlohmann::ordered_json j;
  j["penalty"] = to_string(est.config.penalty);
  j["alpha"] = est.config.alpha;
  j["beta"] = est.config.beta;
  j["d_max"] = est.tensor.lags();
  j["response_mode"] = to_string(est.config.response_mode);
  j["replicates"] = data.replicates();
  j["timepoints"] = data.timepoints();
  j["variables"] = data.variables();
  j["rows"] = est.rows;
  j["estimated_order"] = est.estimated_order;
  j["truncation_lag"] = est.truncation_lag ? nlohmann::ordered_json(*est.truncation_lag) : nlohmann::ordered_json(nullptr);
  j["lambda"] = est.lambda_used;
  j["lambda_initial"] = est.lambda_initial ? nlohmann::ordered_json(*est.lambda_initial) : nlohmann::ordered_json(nullptr);
  j["truncation_multiplier"] = est.config.truncation_multiplier
                                   ? nlohmann::ordered_json(*est.config.truncation_multiplier)
                                   : nlohmann::ordered_json("hard_zero");
  auto& nnz = j["nonzeros_per_lag"] = nlohmann::ordered_json::array();
  for (std::size_t t = 1; t <= est.tensor.lags(); ++t) nnz.push_back(est.tensor.nonzeros(t));
  j["nonzeros"] = est.tensor.nonzeros();
  auto& psi = j["psi_flags"] = nlohmann::ordered_json::array();
  for (PsiFlag f : est.psi_flags) psi.push_back(f == PsiFlag::Active ? "active" : "truncated");
  j["sweeps"] = est.sweeps;
  j["converged"] = est.converged;
  j["unconverged_blocks"] = est.unconverged_blocks;
  j["objective"] = est.objective_trace.empty() ? nlohmann::ordered_json(nullptr) : number_or_null(est.objective_trace.back());
  return j;
}

std::string metrics_tsv(const std::vector<MetricsReport>& reports) {
  std::ostringstream out;
  out << "level\tshd\tprecision\trecall\tf1\ttrue_positives\tfalse_positives\testimated_edges\ttrue_edges\t"
         "false_positive_rate\tsign_accuracy\n";
  for (const auto& m : reports) {
    out << to_string(m.level) << '\t' << m.shd << '\t' << format_double(m.precision) << '\t' << format_double(m.recall)
        << '\t' << format_double(m.f1) << '\t' << m.true_positives << '\t' << m.false_positives << '\t'
        << m.estimated_edges << '\t' << m.true_edges << '\t' << format_double(m.false_positive_rate) << '\t'
        << (m.sign_accuracy ? format_double(*m.sign_accuracy) : "NA") << '\n';
  }
  return out.str();
}

nlohmann::ordered_json metrics_json(const std::vector<MetricsReport>& reports) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& m : reports) {
    nlohmann::ordered_json j;
    j["level"] = to_string(m.level);
    j["shd"] = m.shd;
    j["precision"] = m.precision;
    j["recall"] = m.recall;
    j["f1"] = m.f1;
    j["true_positives"] = m.true_positives;
    j["false_positives"] = m.false_positives;
    j["estimated_edges"] = m.estimated_edges;
    j["true_edges"] = m.true_edges;
    j["false_positive_rate"] = m.false_positive_rate;
    j["sign_accuracy"] = m.sign_accuracy ? nlohmann::ordered_json(*m.sign_accuracy) : nlohmann::ordered_json(nullptr);
    if (!m.roc_points.empty()) {
      auto& roc = j["roc_points"] = nlohmann::ordered_json::array();
      for (const auto& r : m.roc_points)
        roc.push_back({{"alpha", r.alpha}, {"false_positive_rate", r.false_positive_rate}, {"true_positive_rate", r.true_positive_rate}});
    }
    arr.push_back(std::move(j));
  }
  return arr;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path);
  out << text;
  if (!out) fail(ErrorCode::IoError, "write failed: " + path);
}

}  // namespace tlasso
