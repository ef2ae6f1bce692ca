#include "csv_io.hpp"

#include "error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <unordered_map>

namespace tlasso {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  std::string out(s.substr(first, last - first + 1));
  if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
  return out;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    fields.push_back(trim(std::string_view(line).substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return fields;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool is_missing_token(const std::string& s) {
  const std::string l = lower(s);
  return l.empty() || l == "na" || l == "nan" || l == "null";
}

std::optional<double> parse_number(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return value;
}

struct Location {
  const std::string& source;
  std::size_t line;
};

std::string where(const Location& loc, const std::string& column) {
  return loc.source + ":" + std::to_string(loc.line) + " column '" + column + "'";
}

double value_cell(const std::string& cell, const Location& loc, const std::string& column) {
  if (is_missing_token(cell)) fail(ErrorCode::MissingCell, "missing value at " + where(loc, column));
  const auto v = parse_number(cell);
  if (!v) fail(ErrorCode::ParseError, "cannot parse '" + cell + "' as a number at " + where(loc, column));
  if (!std::isfinite(*v)) fail(ErrorCode::MissingCell, "non-finite value at " + where(loc, column));
  return *v;
}

double time_cell(const std::string& cell, const Location& loc) {
  if (is_missing_token(cell)) fail(ErrorCode::MissingCell, "missing time at " + where(loc, "time"));
  const auto v = parse_number(cell);
  if (!v || !std::isfinite(*v)) fail(ErrorCode::ParseError, "cannot parse time '" + cell + "' at " + where(loc, "time"));
  return *v;
}

std::size_t index_of(std::unordered_map<std::string, std::size_t>& index, std::vector<std::string>& order,
                     const std::string& label) {
  const auto [it, inserted] = index.emplace(label, order.size());
  if (inserted) order.push_back(label);
  return it->second;
}

// Cells keyed by (replicate, time, variable) before the grid is known.
struct Cell {
  std::size_t replicate, variable;
  double time, value;
};

TimeSeriesDataset assemble(const std::vector<Cell>& cells, const std::vector<std::string>& replicates,
                           std::vector<std::string> variables, const std::string& source) {
  std::vector<double> times;
  for (const Cell& c : cells) times.push_back(c.time);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  const std::size_t n = replicates.size(), T = times.size(), p = variables.size();
  if (n == 0 || T == 0 || p == 0) fail(ErrorCode::NonRectangular, source + ": no data rows");
  if (T < 2) fail(ErrorCode::NonRectangular, source + ": need at least 2 time points, found " + std::to_string(T));

  std::vector<double> values(n * T * p, 0.0);
  std::vector<char> filled(n * T * p, 0);
  for (const Cell& c : cells) {
    const auto t = static_cast<std::size_t>(std::lower_bound(times.begin(), times.end(), c.time) - times.begin());
    const std::size_t k = (c.replicate * T + t) * p + c.variable;
    if (filled[k])
      fail(ErrorCode::NonRectangular, source + ": duplicate cell for replicate '" + replicates[c.replicate] +
                                          "', time " + format_double(c.time) + ", variable '" + variables[c.variable] + "'");
    filled[k] = 1;
    values[k] = c.value;
  }
  for (std::size_t k = 0; k < filled.size(); ++k) {
    if (!filled[k]) {
      const std::size_t i = k % p, t = (k / p) % T, r = k / (p * T);
      fail(ErrorCode::NonRectangular, source + ": no value for replicate '" + replicates[r] + "', time " +
                                          format_double(times[t]) + ", variable '" + variables[i] + "'");
    }
  }
  return TimeSeriesDataset(n, T, p, std::move(values), std::move(variables));
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

TimeSeriesDataset parse_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split(line, ',');
      break;
    }
  }
  if (header.empty()) fail(ErrorCode::ParseError, source + ": missing header row");
  if (line_no == 1 && header[0].starts_with("\xEF\xBB\xBF")) header[0] = header[0].substr(3);

  std::vector<std::string> keys;
  for (const auto& h : header) keys.push_back(lower(h));

  std::unordered_map<std::string, std::size_t> rep_index, var_index;
  std::vector<std::string> replicates, variables;
  std::vector<Cell> cells;

  std::vector<std::string> sorted_keys = keys;
  std::sort(sorted_keys.begin(), sorted_keys.end());
  const bool long_format = sorted_keys == std::vector<std::string>{"replicate", "time", "value", "variable"};

  auto rows = [&](auto&& handle) {
    while (std::getline(in, line)) {
      ++line_no;
      if (trim(line).empty()) continue;
      auto fields = split(line, ',');
      if (fields.size() != header.size())
        fail(ErrorCode::ParseError, source + ":" + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                                        " fields, found " + std::to_string(fields.size()));
      handle(fields, Location{source, line_no});
    }
  };

  if (long_format) {
    auto col = [&](const char* name) { return static_cast<std::size_t>(std::find(keys.begin(), keys.end(), name) - keys.begin()); };
    const std::size_t cr = col("replicate"), ct = col("time"), cv = col("variable"), cx = col("value");
    rows([&](const std::vector<std::string>& f, const Location& loc) {
      if (f[cr].empty()) fail(ErrorCode::MissingCell, "missing replicate at " + where(loc, header[cr]));
      if (f[cv].empty()) fail(ErrorCode::MissingCell, "missing variable at " + where(loc, header[cv]));
      cells.push_back({.replicate = index_of(rep_index, replicates, f[cr]),
                       .variable = index_of(var_index, variables, f[cv]),
                       .time = time_cell(f[ct], loc),
                       .value = value_cell(f[cx], loc, header[cx])});
    });
    return assemble(cells, replicates, std::move(variables), source);
  }

  std::optional<std::size_t> ct, cr;
  std::size_t first_var = 0;
  for (std::size_t k = 0; k < std::min<std::size_t>(2, keys.size()); ++k) {
    if (keys[k] == "time" && !ct) ct = k, first_var = k + 1;
    else if (keys[k] == "replicate" && !cr) cr = k, first_var = k + 1;
    else break;
  }
  if (!ct) fail(ErrorCode::ParseError, source + ": header must be replicate,time,variable,value or start with a time column");
  if (first_var >= header.size()) fail(ErrorCode::ParseError, source + ": wide format without variable columns");
  for (std::size_t k = first_var; k < header.size(); ++k) {
    if (header[k].empty()) fail(ErrorCode::ParseError, source + ": empty variable name in header column " + std::to_string(k + 1));
    if (var_index.contains(header[k])) fail(ErrorCode::ParseError, source + ": duplicate variable '" + header[k] + "'");
    index_of(var_index, variables, header[k]);
  }
  if (!cr) index_of(rep_index, replicates, "1");

  rows([&](const std::vector<std::string>& f, const Location& loc) {
    std::size_t r = 0;
    if (cr) {
      if (f[*cr].empty()) fail(ErrorCode::MissingCell, "missing replicate at " + where(loc, header[*cr]));
      r = index_of(rep_index, replicates, f[*cr]);
    }
    const double t = time_cell(f[*ct], loc);
    for (std::size_t k = first_var; k < f.size(); ++k)
      cells.push_back({.replicate = r, .variable = k - first_var, .time = t, .value = value_cell(f[k], loc, header[k])});
  });
  return assemble(cells, replicates, std::move(variables), source);
}

TimeSeriesDataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open input file: " + path);
  return parse_csv(in, path);
}

void write_csv(const TimeSeriesDataset& data, std::ostream& out, CsvFormat format) {
  const auto& names = data.names();
  if (format == CsvFormat::Long) {
    out << "replicate,time,variable,value\n";
    for (std::size_t r = 0; r < data.replicates(); ++r)
      for (std::size_t t = 0; t < data.timepoints(); ++t)
        for (std::size_t i = 0; i < data.variables(); ++i)
          out << r + 1 << ',' << t + 1 << ',' << names[i] << ',' << format_double(data.at(r, t, i)) << '\n';
    return;
  }
  out << "time,replicate";
  for (const auto& name : names) out << ',' << name;
  out << '\n';
  for (std::size_t r = 0; r < data.replicates(); ++r) {
    for (std::size_t t = 0; t < data.timepoints(); ++t) {
      out << t + 1 << ',' << r + 1;
      for (std::size_t i = 0; i < data.variables(); ++i) out << ',' << format_double(data.at(r, t, i));
      out << '\n';
    }
  }
}

void write_csv(const TimeSeriesDataset& data, const std::string& path, CsvFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path);
  write_csv(data, out, format);
  if (!out) fail(ErrorCode::IoError, "write failed: " + path);
}

void write_truth(const GroundTruthNetwork& network, const std::vector<std::string>& names, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path);
  out << "target\tsource\tlag\tweight\n";
  for (const Edge& e : network.edges)
    out << names.at(e.target) << '\t' << names.at(e.source) << '\t' << e.lag << '\t' << format_double(e.weight) << '\n';
  if (!out) fail(ErrorCode::IoError, "write failed: " + path);
}

GroundTruthNetwork read_truth(const std::string& path, const std::vector<std::string>& names) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open truth file: " + path);
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < names.size(); ++i) index.emplace(names[i], i);

  std::string line;
  std::size_t line_no = 0;
  bool header = true;
  std::vector<Edge> edges;
  std::size_t d = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split(line, '\t');
    if (header) {
      header = false;
      if (f.size() >= 3 && lower(f[0]) == "target") continue;
    }
    const std::string at = path + ":" + std::to_string(line_no);
    if (f.size() < 3 || f.size() > 4) fail(ErrorCode::ParseError, at + ": expected target, source, lag[, weight]");
    const auto target = index.find(f[0]);
    const auto source = index.find(f[1]);
    if (target == index.end()) fail(ErrorCode::ParseError, at + ": unknown variable '" + f[0] + "'");
    if (source == index.end()) fail(ErrorCode::ParseError, at + ": unknown variable '" + f[1] + "'");
    const auto lag = parse_number(f[2]);
    if (!lag || *lag < 1 || *lag != std::floor(*lag)) fail(ErrorCode::ParseError, at + ": lag must be a positive integer");
    double weight = 1.0;
    if (f.size() == 4) {
      const auto w = parse_number(f[3]);
      if (!w || !std::isfinite(*w)) fail(ErrorCode::ParseError, at + ": cannot parse weight '" + f[3] + "'");
      weight = *w;
    }
    edges.push_back({.target = target->second, .source = source->second, .lag = static_cast<std::size_t>(*lag), .weight = weight});
    d = std::max(d, edges.back().lag);
  }
  return make_network(names.size(), d, std::move(edges));
}

}  // namespace tlasso
