#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace tlasso {

/// n replicate trajectories of p variables over T time points, stored dense
/// with the variable index fastest.
class TimeSeriesDataset {
 public:
  TimeSeriesDataset() = default;
  TimeSeriesDataset(std::size_t n, std::size_t T, std::size_t p, std::vector<std::string> names = {});
  TimeSeriesDataset(std::size_t n, std::size_t T, std::size_t p, std::vector<double> values,
                    std::vector<std::string> names);

  std::size_t replicates() const { return n_; }
  std::size_t timepoints() const { return T_; }
  std::size_t variables() const { return p_; }

  /// Zero-based replicate, time and variable.
  double& at(std::size_t r, std::size_t t, std::size_t i) { return values_[(r * T_ + t) * p_ + i]; }
  double at(std::size_t r, std::size_t t, std::size_t i) const { return values_[(r * T_ + t) * p_ + i]; }

  const std::vector<double>& values() const { return values_; }
  const std::vector<std::string>& names() const { return names_; }

  bool operator==(const TimeSeriesDataset&) const = default;

 private:
  std::size_t n_ = 0, T_ = 0, p_ = 0;
  std::vector<double> values_;
  std::vector<std::string> names_;
};

std::vector<std::string> default_variable_names(std::size_t p);

}  // namespace tlasso
