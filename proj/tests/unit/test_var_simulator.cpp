#include "error.hpp"
#include "oracles.hpp"
#include "var_simulator.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace tlasso;

namespace {

SimulationSpec small_spec(std::uint64_t seed) {
  SimulationSpec s;
  s.p = 12;
  s.n = 7;
  s.T = 9;
  s.d = 2;
  s.n_edges = 20;
  s.seed = seed;
  return s;
}

}  // namespace

TEST_CASE("generate_network draws exactly n_edges slots of magnitude rho") {
  SimulationSpec s;
  const auto net = generate_network(s);
  CHECK(net.tensor.nonzeros() == 50);
  CHECK(net.edges.size() == 50);
  std::set<std::tuple<std::size_t, std::size_t, std::size_t>> slots;
  for (const auto& e : net.edges) {
    CHECK(std::abs(e.weight) == 0.7);
    CHECK(e.weight > 0.0);
    CHECK(net.tensor.lag(e.lag)(static_cast<Eigen::Index>(e.target), static_cast<Eigen::Index>(e.source)) == e.weight);
    slots.insert({e.lag, e.target, e.source});
  }
  CHECK(slots.size() == 50);
  CHECK(std::is_sorted(net.edges.begin(), net.edges.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.lag, a.target, a.source) < std::tie(b.lag, b.target, b.source);
  }));

  for (std::size_t k : {0u, 1u, 17u, 288u}) {
    auto t = small_spec(k + 3);
    t.n_edges = k;
    CHECK(generate_network(t).tensor.nonzeros() == k);
  }
}

TEST_CASE("random signs produce both signs") {
  auto s = small_spec(2);
  s.sign_mode = SignMode::RandomSign;
  s.n_edges = 100;
  const auto net = generate_network(s);
  std::size_t neg = 0;
  for (const auto& e : net.edges) neg += e.weight < 0.0;
  CHECK(neg > 20);
  CHECK(neg < 80);
}

TEST_CASE("too many edges") {
  auto s = small_spec(1);
  s.n_edges = 2 * 12 * 12 + 1;
  try {
    generate_network(s);
    FAIL("expected TooManyEdges");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooManyEdges);
  }
}

TEST_CASE("simulation is reproducible and thread independent") {
  const auto s = small_spec(42);
  const auto a = generate_network(s), b = generate_network(s);
  CHECK(a.edges == b.edges);
  const auto x = simulate(s, a), y = simulate(s, a), z = simulate(s, a, 4);
  CHECK(x == y);
  CHECK(x == z);
  CHECK(x.replicates() == 7);
  CHECK(x.timepoints() == 9);
  CHECK(x.variables() == 12);
  auto other = s;
  other.seed = 43;
  CHECK_FALSE(simulate(other, a) == x);
}

TEST_CASE("protocol dimensions") {
  SimulationSpec s;
  const auto data = simulate(s, generate_network(s));
  CHECK(data.replicates() == 50);
  CHECK(data.timepoints() == 10);
  CHECK(data.variables() == 100);
}

TEST_CASE("zero network with unit noise is standard normal") {
  SimulationSpec s;
  s.p = 20;
  s.n = 100;
  s.T = 50;
  s.d = 1;
  s.n_edges = 0;
  s.sigma = 1.0;
  const auto data = simulate(s, generate_network(s));
  double sum = 0.0, sq = 0.0;
  for (double v : data.values()) sum += v, sq += v * v;
  const auto N = static_cast<double>(data.values().size());
  REQUIRE(N >= 1e5);
  const double mean = sum / N;
  const double var = sq / N - mean * mean;
  CHECK(std::abs(var - 1.0) <= 0.05);
}

TEST_CASE("noiseless recursion holds exactly") {
  SUBCASE("single edge") {
    auto s = small_spec(5);
    s.p = 3;
    s.d = 1;
    s.n_edges = 1;
    s.sigma = 0.0;
    const auto net = make_network(3, 1, {{.target = 1, .source = 0, .lag = 1, .weight = 0.7}});
    const auto data = simulate(s, net);
    for (std::size_t r = 0; r < data.replicates(); ++r)
      for (std::size_t t = 1; t < data.timepoints(); ++t) CHECK(data.at(r, t, 1) == 0.7 * data.at(r, t - 1, 0));
  }
  SUBCASE("stable random network") {
    auto s = small_spec(8);
    s.rho = 0.2;
    s.sigma = 0.0;
    s.burn_in = 3;
    const auto net = generate_network(s);
    REQUIRE_FALSE(stability_check(net).explosive);
    const auto data = simulate(s, net);
    double worst = 0.0;
    for (std::size_t r = 0; r < data.replicates(); ++r)
      for (std::size_t t = s.d; t < data.timepoints(); ++t)
        for (std::size_t i = 0; i < s.p; ++i) {
          double pred = 0.0;
          for (std::size_t k = 1; k <= s.d; ++k)
            for (std::size_t j = 0; j < s.p; ++j)
              pred += net.tensor.lag(k)(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * data.at(r, t - k, j);
          worst = std::max(worst, std::abs(pred - data.at(r, t, i)));
        }
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("measurement noise leaves the latent recursion noise free") {
  auto s = small_spec(9);
  s.noise_mode = NoiseMode::Measurement;
  s.sigma = 0.0;
  auto p = s;
  p.noise_mode = NoiseMode::Process;
  const auto net = generate_network(s);
  CHECK(simulate(s, net) == simulate(p, net));
}

TEST_CASE("spectral radius") {
  CHECK(stability_check(make_network(4, 2, {})).spectral_radius == 0.0);
  const auto loop = make_network(3, 1, {{.target = 0, .source = 0, .lag = 1, .weight = 0.7}});
  CHECK(stability_check(loop).spectral_radius == doctest::Approx(0.7).epsilon(1e-10));
  CHECK_FALSE(stability_check(loop).explosive);

  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    SimulationSpec s;
    s.p = 5 + seed;
    s.d = 1 + seed % 3;
    s.T = 10;
    s.n_edges = s.p * 2;
    s.seed = seed;
    s.sign_mode = seed % 2 ? SignMode::RandomSign : SignMode::AllPositive;
    const auto net = generate_network(s);
    const double expected = oracle::spectral_radius(companion_matrix(net.tensor));
    CAPTURE(seed);
    CHECK(stability_check(net).spectral_radius == doctest::Approx(expected).epsilon(1e-6));
    CHECK(stability_check(net).explosive == (expected >= 1.0));
  }
}

TEST_CASE("burn-in only applies to stable networks") {
  SimulationSpec s;
  s.p = 20;
  s.n_edges = 50;
  const auto net = generate_network(s);
  CHECK(effective_burn_in(s, net) == (stability_check(net).explosive ? 0u : 50u));
  CHECK(effective_burn_in(s, make_network(20, 2, {})) == 50);
}

TEST_CASE("derived seeds differ per stream") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t k = 0; k < 1000; ++k) seen.insert(derive_seed(7, k));
  CHECK(seen.size() == 1000);
  CHECK(derive_seed(7, 3) == derive_seed(7, 3));
}

TEST_CASE("mode names") {
  CHECK(parse_sign_mode(to_string(SignMode::RandomSign)) == SignMode::RandomSign);
  CHECK(parse_noise_mode(to_string(NoiseMode::Measurement)) == NoiseMode::Measurement);
  CHECK_FALSE(parse_sign_mode("both").has_value());
}
