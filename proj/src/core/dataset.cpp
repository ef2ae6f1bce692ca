#include "dataset.hpp"

#include "error.hpp"

#include <cmath>

namespace tlasso {

namespace {

void validate(std::size_t n, std::size_t T, std::size_t p, const std::vector<std::string>& names) {
  if (n < 1 || T < 2 || p < 1)
    fail(ErrorCode::InvalidArgument, "dataset needs n >= 1, T >= 2, p >= 1 (got n=" + std::to_string(n) +
                                         ", T=" + std::to_string(T) + ", p=" + std::to_string(p) + ")");
  if (names.size() != p)
    fail(ErrorCode::DimensionMismatch, "expected " + std::to_string(p) + " variable names, got " +
                                           std::to_string(names.size()));
}

}  // namespace

std::vector<std::string> default_variable_names(std::size_t p) {
  std::vector<std::string> names;
  names.reserve(p);
  for (std::size_t i = 0; i < p; ++i) names.push_back("X" + std::to_string(i + 1));
  return names;
}

TimeSeriesDataset::TimeSeriesDataset(std::size_t n, std::size_t T, std::size_t p, std::vector<std::string> names)
    : n_(n), T_(T), p_(p), values_(n * T * p, 0.0), names_(names.empty() ? default_variable_names(p) : std::move(names)) {
  validate(n_, T_, p_, names_);
}

TimeSeriesDataset::TimeSeriesDataset(std::size_t n, std::size_t T, std::size_t p, std::vector<double> values,
                                     std::vector<std::string> names)
    : n_(n), T_(T), p_(p), values_(std::move(values)),
      names_(names.empty() ? default_variable_names(p) : std::move(names)) {
  validate(n_, T_, p_, names_);
  if (values_.size() != n * T * p)
    fail(ErrorCode::DimensionMismatch, "dataset value count " + std::to_string(values_.size()) +
                                           " != n*T*p = " + std::to_string(n * T * p));
  for (double v : values_)
    if (!std::isfinite(v)) fail(ErrorCode::MissingCell, "dataset contains a non-finite value");
}

}  // namespace tlasso
