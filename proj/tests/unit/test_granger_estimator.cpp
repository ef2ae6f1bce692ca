#include "error.hpp"
#include "granger_estimator.hpp"
#include "normal_quantile.hpp"
#include "oracles.hpp"
#include "var_simulator.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace tlasso;

namespace {

// Values frozen from a 50-digit evaluation of sqrt(2) erfinv(2q - 1).
struct QuantileCase {
  double q, z;
};
const QuantileCase kQuantiles[] = {
    {2.5e-6, -4.5647877302808843459}, {0.025, -1.9599639845400542355},  {0.3, -0.52440051270804078404},
    {1e-10, -6.3613409024040562047},  {1e-20, -9.2623400897984075737},  {1e-100, -21.273453560965324295},
    {1e-300, -37.047096299361199237}, {0.9999, 3.7190164854556805644},  {0.02425, -1.9729610513118848503},
    {0.97575, 1.9729610513118848503}, {1.25e-5, -4.2147996699925129233}, {6.25e-5, -3.8361069311758977123},
};

TimeSeriesDataset null_data(std::size_t n, std::size_t T, std::size_t p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> v(n * T * p);
  for (double& x : v) x = z(rng);
  return TimeSeriesDataset(n, T, p, std::move(v), default_variable_names(p));
}

TimeSeriesDataset simulated(std::uint64_t seed, SignMode sign = SignMode::AllPositive) {
  SimulationSpec spec;
  spec.p = 10;
  spec.n = 40;
  spec.T = 6;
  spec.d = 2;
  spec.n_edges = 15;
  spec.seed = seed;
  spec.sign_mode = sign;
  return simulate(spec, generate_network(spec));
}

}  // namespace

TEST_CASE("normal quantile matches high-precision values") {
  for (const auto& c : kQuantiles) {
    CAPTURE(c.q);
    CHECK(std::abs(normal_quantile(c.q) - c.z) <= 1e-12 * std::max(1.0, std::abs(c.z)));
    CHECK(upper_normal_quantile(c.q) == doctest::Approx(-c.z).epsilon(1e-12));
  }
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-15));
  for (double q = 0.001; q < 0.5; q += 0.0137) CHECK(normal_quantile(q) == doctest::Approx(-normal_quantile(1.0 - q)).epsilon(1e-12));
}

TEST_CASE("compute_lambda") {
  CHECK(std::abs(compute_lambda(50, 2, 100, 0.1) - 1.2911169435035048825) <= 1e-12);
  CHECK(compute_lambda(200, 2, 100, 0.1) == doctest::Approx(compute_lambda(50, 2, 100, 0.1) / 2.0).epsilon(1e-15));
  try {
    compute_lambda(50, 1, 1, 0.999);  // q = 0.4995 is fine
    compute_lambda(50, 1, 1, 0.9999);
  } catch (...) {
    FAIL("valid quantiles must not throw");
  }
  // alpha / (2 d p^2) >= 0.5 needs alpha >= 1 for d = p = 1, which validation rejects first.
  CHECK_THROWS_AS(compute_lambda(50, 1, 1, 1.0), Error);
  CHECK_THROWS_AS(compute_lambda(0, 1, 1, 0.1), Error);
}

TEST_CASE("compute_lambda is strictly decreasing in alpha and n") {
  double prev = std::numeric_limits<double>::infinity();
  for (double a = 0.01; a < 0.99; a += 0.01) {
    const double l = compute_lambda(50, 3, 20, a);
    CHECK(l < prev);
    prev = l;
  }
  prev = std::numeric_limits<double>::infinity();
  for (std::size_t n = 2; n < 500; n += 7) {
    const double l = compute_lambda(n, 3, 20, 0.1);
    CHECK(l < prev);
    prev = l;
  }
}

TEST_CASE("adaptive weights") {
  LagCoefficientTensor init(1, 2);
  init.lag(1) << 0.25, 2.0, 0.0, -0.5;
  const auto w = compute_adaptive_weights(init);
  CHECK(w[0](0, 0) == 4.0);
  CHECK(w[0](0, 1) == 1.0);
  CHECK(std::isinf(w[0](1, 0)));
  CHECK(w[0](1, 1) == 2.0);
}

TEST_CASE("truncation factor") {
  CHECK(compute_truncation_factor(2, 3, 20, 10, 0.1) == PsiFlag::Truncated);
  CHECK(compute_truncation_factor(2, 10, 20, 10, 0.1) == PsiFlag::Active);
  CHECK(compute_truncation_factor(2, 5, 20, 10, 0.1) == PsiFlag::Active);
  CHECK(compute_truncation_factor(1, 0, 20, 10, 0.1) == PsiFlag::Active);
  CHECK(compute_truncation_factor(3, 100, 20, 10, 0.1, true) == PsiFlag::Truncated);
  CHECK(compute_truncation_factor(2, 0, 20, 10, 0.0) == PsiFlag::Active);
}

TEST_CASE("regression problem shapes") {
  const auto data = null_data(50, 10, 100, 1);
  const auto last = build_regression_problems(data, {});
  CHECK(last.lags() == 9);
  CHECK(last.rows() == 50);
  CHECK(last.variables() == 100);
  CHECK(last.blocks[0].cols() == 100);

  EstimationConfig rolling;
  rolling.response_mode = ResponseMode::RollingWindow;
  rolling.d_max = 3;
  const auto hela = build_regression_problems(null_data(1, 47, 9, 2), rolling);
  CHECK(hela.rows() == 44);
  CHECK(hela.lags() == 3);
  CHECK(hela.variables() == 9);

  EstimationConfig bad;
  bad.d_max = 3;
  try {
    build_regression_problems(null_data(5, 3, 2, 3), bad);
    FAIL("expected InsufficientTimepoints");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InsufficientTimepoints);
  }
  try {
    build_regression_problems(null_data(1, 5, 2, 3), EstimationConfig{});
    FAIL("expected InsufficientRows");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InsufficientRows);
  }
}

TEST_CASE("rolling windows pair each response with its own lags") {
  const auto data = null_data(2, 6, 3, 4);
  EstimationConfig c;
  c.response_mode = ResponseMode::RollingWindow;
  c.d_max = 2;
  const auto prob = build_regression_problems(data, c);
  REQUIRE(prob.rows() == 8);
  // Row w * n + r holds the response at time d + w of replicate r.
  for (std::size_t w = 0; w < 4; ++w)
    for (std::size_t r = 0; r < 2; ++r)
      for (std::size_t i = 0; i < 3; ++i)
        CHECK(prob.responses(static_cast<Eigen::Index>(w * 2 + r), static_cast<Eigen::Index>(i)) == data.at(r, 2 + w, i));
  const auto& b = prob.blocks[1];
  for (std::size_t w = 0; w < 4; ++w) {
    const auto row = static_cast<Eigen::Index>(w * 2 + 1);
    const double raw = b.values(row, 0) * b.column_scales(0) + b.column_means(0);
    CHECK(raw == doctest::Approx(data.at(1, w, 0)).epsilon(1e-12));
  }
}

TEST_CASE("null data truncates at lag 2") {
  const auto data = null_data(50, 10, 20, 7);
  const auto est = fit(data, EstimationConfig{});
  CHECK(est.psi_flags[0] == PsiFlag::Active);
  REQUIRE(est.truncation_lag.has_value());
  CHECK(*est.truncation_lag == 2);
  CHECK(est.estimated_order == 1);
  for (std::size_t t = 2; t <= est.tensor.lags(); ++t) CHECK(est.tensor.lag(t).isZero(0.0));
}

TEST_CASE("huge lambda gives the zero tensor in one sweep") {
  EstimationConfig c;
  c.penalty = Penalty::Lasso;
  c.lambda_override = 1e6;
  const auto est = fit(simulated(3), c);
  CHECK(est.tensor.nonzeros() == 0);
  CHECK(est.sweeps == 1);
  CHECK(est.converged);
  CHECK(est.estimated_order == est.tensor.lags());
}

TEST_CASE("fitted estimates satisfy the structural invariants") {
  for (Penalty pen : {Penalty::Lasso, Penalty::AdaptiveLasso, Penalty::TruncatingLasso, Penalty::TruncatingAdaptiveLasso}) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      CAPTURE(to_string(pen));
      CAPTURE(seed);
      EstimationConfig c;
      c.penalty = pen;
      c.max_sweeps = 30;
      const auto data = simulated(seed, SignMode::RandomSign);
      const auto est = fit(data, c);

      CHECK(est.psi_flags.front() == PsiFlag::Active);
      bool seen = false;
      for (PsiFlag f : est.psi_flags) {
        if (seen) CHECK(f == PsiFlag::Truncated);
        seen = seen || f == PsiFlag::Truncated;
      }
      if (!is_truncating(pen)) CHECK_FALSE(seen);
      if (est.truncation_lag) {
        CHECK(est.estimated_order == *est.truncation_lag - 1);
        for (std::size_t t = *est.truncation_lag; t <= est.tensor.lags(); ++t) CHECK(est.tensor.lag(t).isZero(0.0));
      } else {
        CHECK(est.estimated_order == est.tensor.lags());
      }

      CHECK(std::abs(objective_value(data, est) - est.objective_trace.back()) <= 1e-9 * est.objective_trace.back());

      // Within one sweep the Psi flags are fixed once a block is reached, so
      // each block update cannot raise the objective.
      for (std::size_t k = 0; k + 1 < est.block_objective_trace.size(); k += 2)
        CHECK(est.block_objective_trace[k + 1] <= est.block_objective_trace[k] * (1.0 + 1e-10));

      for (std::size_t t = 1; t <= est.tensor.lags(); ++t)
        for (Eigen::Index i = 0; i < est.tensor.lag(t).rows(); ++i)
          for (Eigen::Index j = 0; j < est.tensor.lag(t).cols(); ++j) {
            CHECK((est.tensor.lag(t)(i, j) == 0.0) == (est.standardized.lag(t)(i, j) == 0.0));
            if (std::isinf(est.weights_used[t - 1](i, j))) CHECK(est.tensor.lag(t)(i, j) == 0.0);
          }
    }
  }
}

TEST_CASE("objective trace is non-increasing for non-truncating families") {
  for (Penalty pen : {Penalty::Lasso, Penalty::AdaptiveLasso}) {
    EstimationConfig c;
    c.penalty = pen;
    const auto est = fit(simulated(5), c);
    for (std::size_t k = 1; k < est.objective_trace.size(); ++k)
      CHECK(est.objective_trace[k] <= est.objective_trace[k - 1] * (1.0 + 1e-10));
  }
}

TEST_CASE("truncating lasso with beta = 0 reproduces the lasso bit for bit") {
  const auto data = simulated(9);
  EstimationConfig a, b;
  a.penalty = Penalty::Lasso;
  b.penalty = Penalty::TruncatingLasso;
  b.beta = 0.0;
  a.max_sweeps = b.max_sweeps = 20;
  const auto ea = fit(data, a), eb = fit(data, b);
  for (std::size_t t = 1; t <= ea.tensor.lags(); ++t) CHECK(ea.tensor.lag(t) == eb.tensor.lag(t));
}

TEST_CASE("target problems are independent of scheduling") {
  const auto data = simulated(4);
  EstimationConfig one, many;
  one.max_sweeps = many.max_sweeps = 15;
  many.threads = 4;
  const auto a = fit(data, one), b = fit(data, many);
  for (std::size_t t = 1; t <= a.tensor.lags(); ++t) CHECK(a.tensor.lag(t) == b.tensor.lag(t));
  CHECK(a.objective_trace == b.objective_trace);
}

TEST_CASE("finite truncation multiplier zeroes truncated lags") {
  const auto data = null_data(50, 8, 10, 12);
  EstimationConfig c;
  c.truncation_multiplier = 1e12;
  const auto est = fit(data, c);
  REQUIRE(est.truncation_lag.has_value());
  for (std::size_t t = *est.truncation_lag; t <= est.tensor.lags(); ++t) CHECK(est.tensor.lag(t).isZero(0.0));
}

TEST_CASE("objective_value on trivial estimates") {
  std::vector<double> v(3 * 4 * 2, 0.0);
  const TimeSeriesDataset zero(3, 4, 2, v, default_variable_names(2));
  EstimationConfig c;
  c.penalty = Penalty::Lasso;
  const auto est = fit(zero, c);
  CHECK(objective_value(zero, est) == 0.0);

  std::vector<double> w(3 * 4 * 2);
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = static_cast<double>(k % 5) - 1.5;
  const TimeSeriesDataset data(3, 4, 2, w, default_variable_names(2));
  c.lambda_override = 1e6;
  const auto empty = fit(data, c);
  const auto prob = build_regression_problems(data, c);
  CHECK(objective_value(data, empty) == doctest::Approx(prob.responses.squaredNorm() / 3.0).epsilon(1e-14));
}

TEST_CASE("config validation") {
  const auto data = null_data(5, 4, 2, 1);
  auto rejects = [&](auto mutate) {
    EstimationConfig c;
    mutate(c);
    CHECK_THROWS_AS(fit(data, c), Error);
  };
  rejects([](EstimationConfig& c) { c.alpha = 0.0; });
  rejects([](EstimationConfig& c) { c.alpha = 1.0; });
  rejects([](EstimationConfig& c) { c.beta = 1.0; });
  rejects([](EstimationConfig& c) { c.beta = -0.1; });
  rejects([](EstimationConfig& c) { c.d_max = 0; });
  rejects([](EstimationConfig& c) { c.d_max = 4; });
  rejects([](EstimationConfig& c) { c.lambda_override = -1.0; });
  rejects([](EstimationConfig& c) { c.truncation_multiplier = 0.5; });
  rejects([](EstimationConfig& c) { c.max_sweeps = 0; });
}

TEST_CASE("penalty and response mode names") {
  for (Penalty p : {Penalty::Lasso, Penalty::AdaptiveLasso, Penalty::TruncatingLasso, Penalty::TruncatingAdaptiveLasso})
    CHECK(parse_penalty(to_string(p)) == p);
  CHECK(parse_penalty("talasso") == Penalty::TruncatingAdaptiveLasso);
  CHECK_FALSE(parse_penalty("ridge").has_value());
  CHECK(parse_response_mode("rolling_window") == ResponseMode::RollingWindow);
  CHECK_FALSE(parse_response_mode("x").has_value());
}
