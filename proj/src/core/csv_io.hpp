#pragma once

#include "dataset.hpp"
#include "var_simulator.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace tlasso {

enum class CsvFormat { Long, Wide };

/// Long: replicate,time,variable,value. Wide: a `time` column, an optional
/// `replicate` column, then one column per variable. The format is detected
/// from the header. Times are sorted numerically; replicates and variables
/// keep their order of first appearance.
TimeSeriesDataset load_csv(const std::string& path);
TimeSeriesDataset parse_csv(std::istream& in, const std::string& source = "<stream>");

/// Values are written with 17 significant digits, so load_csv reproduces the
/// dataset exactly. Times and replicates are written one-based.
void write_csv(const TimeSeriesDataset& data, const std::string& path, CsvFormat format = CsvFormat::Wide);
void write_csv(const TimeSeriesDataset& data, std::ostream& out, CsvFormat format = CsvFormat::Wide);

/// Tab-separated target, source, lag, weight with variable names.
void write_truth(const GroundTruthNetwork& network, const std::vector<std::string>& names, const std::string& path);
/// The network order is the largest lag listed (at least 1).
GroundTruthNetwork read_truth(const std::string& path, const std::vector<std::string>& names);

/// Shortest decimal form that parses back to the same double, at most 17 digits.
std::string format_double(double value);

}  // namespace tlasso
