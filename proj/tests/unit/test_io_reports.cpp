#include "benchmark.hpp"
#include "csv_io.hpp"
#include "error.hpp"
#include "reports.hpp"

#include <doctest.h>

#include <charconv>
#include <cstring>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace tlasso;

namespace {

ErrorCode parse_error(const std::string& text) {
  std::istringstream in(text);
  try {
    parse_csv(in);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a parse failure");
  return ErrorCode::InvalidArgument;
}

TimeSeriesDataset parse(const std::string& text) {
  std::istringstream in(text);
  return parse_csv(in);
}

std::vector<std::string> split_lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> split_tabs(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t k; (k = s.find('\t', start)) != std::string::npos; start = k + 1) out.push_back(s.substr(start, k - start));
  out.push_back(s.substr(start));
  return out;
}

}  // namespace

TEST_CASE("csv round trip is exact in both formats") {
  SimulationSpec s;
  s.p = 6;
  s.n = 4;
  s.T = 5;
  s.n_edges = 8;
  auto data = simulate(s, generate_network(s));
  data.at(0, 0, 0) = 1e-300;
  data.at(0, 0, 1) = -123456789.123456789;
  data.at(0, 0, 2) = 0.1;
  for (CsvFormat f : {CsvFormat::Wide, CsvFormat::Long}) {
    std::stringstream buf;
    write_csv(data, buf, f);
    CHECK(parse_csv(buf) == data);
  }
}

TEST_CASE("long csv in any column and row order") {
  const auto d = parse("value,variable,time,replicate\n4,b,2,r1\n1,a,1,r1\n2,b,1,r1\n3,a,2,r1\n");
  CHECK(d.replicates() == 1);
  CHECK(d.timepoints() == 2);
  CHECK(d.names() == std::vector<std::string>{"b", "a"});
  CHECK(d.at(0, 0, 0) == 2.0);
  CHECK(d.at(0, 0, 1) == 1.0);
  CHECK(d.at(0, 1, 0) == 4.0);
  CHECK(d.at(0, 1, 1) == 3.0);
}

TEST_CASE("wide csv without replicate column") {
  std::ostringstream text;
  text << "time";
  for (int j = 1; j <= 9; ++j) text << ",g" << j;
  text << '\n';
  for (int t = 47; t >= 1; --t) {
    text << t;
    for (int j = 1; j <= 9; ++j) text << ',' << t * 10 + j;
    text << '\n';
  }
  const auto d = parse(text.str());
  CHECK(d.replicates() == 1);
  CHECK(d.timepoints() == 47);
  CHECK(d.variables() == 9);
  CHECK(d.names()[8] == "g9");
  CHECK(d.at(0, 0, 0) == 11.0);
  CHECK(d.at(0, 46, 8) == 479.0);
}

TEST_CASE("csv errors") {
  CHECK(parse_error("replicate,time,variable,value\n1,1,a,1\n1,2,a,2\n2,1,a,3\n") == ErrorCode::NonRectangular);
  CHECK(parse_error("time,a,b\n1,1,\n2,3,4\n") == ErrorCode::MissingCell);
  CHECK(parse_error("time,a,b\n1,1,NA\n2,3,4\n") == ErrorCode::MissingCell);
  CHECK(parse_error("time,a,b\n1,1,x\n2,3,4\n") == ErrorCode::ParseError);
  CHECK(parse_error("time,a,b\n1,1\n2,3,4\n") == ErrorCode::ParseError);
  CHECK(parse_error("time,a,a\n1,1,2\n2,3,4\n") == ErrorCode::ParseError);
  CHECK(parse_error("") == ErrorCode::ParseError);
  CHECK(parse_error("time,a\n1,1\n1,2\n") == ErrorCode::NonRectangular);
  try {
    load_csv("/nonexistent/dir/data.csv");
    FAIL("expected IoError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IoError);
    CHECK(std::string(e.what()).find("/nonexistent/dir/data.csv") != std::string::npos);
  }
}

TEST_CASE("format_double round trips") {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::uint64_t> bits;
  for (int k = 0; k < 10000; ++k) {
    double v;
    const auto b = bits(rng);
    std::memcpy(&v, &b, sizeof v);
    if (!std::isfinite(v)) continue;
    const auto s = format_double(v);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    CHECK(back == v);
  }
  CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("truth tsv round trip") {
  SimulationSpec s;
  s.p = 5;
  s.d = 3;
  s.n_edges = 9;
  s.sign_mode = SignMode::RandomSign;
  const auto net = generate_network(s);
  const auto path = (std::filesystem::temp_directory_path() / "tlasso_truth_test.tsv").string();
  const auto names = default_variable_names(5);
  write_truth(net, names, path);
  const auto back = read_truth(path, names);
  CHECK(back.edges == net.edges);
  std::filesystem::remove(path);
}

TEST_CASE("edges.tsv matches the tensor") {
  LagCoefficientTensor t(2, 3);
  t.lag(1)(0, 2) = 0.123456789012345678;
  t.lag(2)(1, 0) = -2.5e-7;
  const std::vector<std::string> names{"x", "y", "z"};
  const auto lines = split_lines(edges_tsv(t, names));
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "target\tsource\tlag\tcoefficient\tsign");
  std::size_t rows = 0;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto f = split_tabs(lines[k]);
    REQUIRE(f.size() == 5);
    const auto i = static_cast<Eigen::Index>(std::find(names.begin(), names.end(), f[0]) - names.begin());
    const auto j = static_cast<Eigen::Index>(std::find(names.begin(), names.end(), f[1]) - names.begin());
    const double v = std::stod(f[3]);
    CHECK(v == t.lag(std::stoul(f[2]))(i, j));
    CHECK(f[4] == (v > 0 ? "+" : "-"));
    ++rows;
  }
  CHECK(rows == t.nonzeros());
  CHECK(split_lines(edges_tsv(LagCoefficientTensor(2, 3), names)).size() == 1);
  CHECK(split_lines(network_tsv(t, names)).size() == 3);
}

TEST_CASE("summary json fields") {
  SimulationSpec s;
  s.p = 6;
  s.n = 30;
  s.T = 5;
  s.n_edges = 6;
  const auto data = simulate(s, generate_network(s));
  const auto est = fit(data, EstimationConfig{});
  const auto j = summary_json(est, data);
  CHECK(j["estimated_order"] == est.estimated_order);
  CHECK(j["lambda"] == est.lambda_used);
  CHECK(j["sweeps"] == est.sweeps);
  CHECK(j["nonzeros_per_lag"].size() == est.tensor.lags());
  CHECK(j["psi_flags"].size() == est.tensor.lags());
  CHECK(j["penalty"] == "truncating_adaptive_lasso");
}

TEST_CASE("benchmark rows, summary and determinism") {
  BenchmarkManifest m;
  m.spec.p = 6;
  m.spec.n = 20;
  m.spec.T = 5;
  m.spec.n_edges = 6;
  m.spec.seed = 11;
  m.replicates = 3;
  m.alpha_grid = {0.05, 0.1};
  const auto a = run_benchmark(m);
  CHECK(a.failures.empty());
  CHECK_FALSE(a.failed());
  CHECK(a.rows.size() == 3 * 4 * 2 * 2);
  CHECK(split_lines(bench_tsv(a)).size() == 1 + 3 * 4 * 2 * 2);
  CHECK(split_lines(bench_summary_tsv(a)).size() == 1 + 4 * 2 * 2);
  CHECK(split_lines(roc_tsv(a)).size() == 1 + 4 * 2);

  m.threads = 3;
  const auto b = run_benchmark(m);
  CHECK(bench_tsv(a) == bench_tsv(b));
  CHECK(bench_summary_tsv(a) == bench_summary_tsv(b));
  CHECK(roc_tsv(a) == roc_tsv(b));

  m.replicates = 1;
  m.alpha_grid = {0.1};
  m.methods = {Penalty::Lasso};
  const auto one = run_benchmark(m);
  const auto lines = split_lines(bench_summary_tsv(one));
  REQUIRE(lines.size() == 3);
  const auto header = split_tabs(lines[0]);
  const auto row = split_tabs(lines[1]);
  for (std::size_t k = 0; k < header.size(); ++k)
    if (header[k].ends_with("_sd") && header[k] != "sign_accuracy_sd") CHECK(row[k] == "0");

  m.spec.n_edges = 0;
  CHECK_THROWS_AS(run_benchmark(m), Error);
}

TEST_CASE("replicate seeds are distinct and stable") {
  CHECK(replicate_seed(1, 0) != replicate_seed(1, 1));
  CHECK(replicate_seed(5, 3) == replicate_seed(5, 3));
}
