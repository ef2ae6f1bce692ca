#include "error.hpp"
#include "evaluation.hpp"

#include <doctest.h>

#include <random>

using namespace tlasso;

namespace {

EdgeSet pairs(std::initializer_list<std::pair<std::size_t, std::size_t>> list, EdgeLevel level = EdgeLevel::Cumulative) {
  EdgeSet s;
  s.level = level;
  for (auto [i, j] : list) s.edges[{i, j, level == EdgeLevel::Cumulative ? 0u : 1u}] = 1;
  return s;
}

EdgeSet random_set(std::mt19937_64& rng, double density) {
  std::bernoulli_distribution keep(density);
  EdgeSet s;
  for (std::size_t t = 1; t <= 2; ++t)
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = 0; j < 6; ++j)
        if (keep(rng)) s.edges[{i, j, t}] = 1;
  return s;
}

}  // namespace

TEST_CASE("shd examples") {
  const auto truth = pairs({{1, 2}, {2, 3}});
  CHECK(shd(pairs({{1, 2}, {3, 1}}), truth) == 2);
  CHECK(shd(truth, truth) == 0);
  EdgeSet many;
  many.level = EdgeLevel::Cumulative;
  for (std::size_t k = 0; k < 50; ++k) many.edges[{k, k + 1, 0}] = 1;
  CHECK(shd(pairs({}), many) == 50);
  CHECK_THROWS_AS(shd(pairs({{1, 2}}, EdgeLevel::LagResolved), truth), Error);
}

TEST_CASE("precision, recall and F1") {
  const auto truth = pairs({{0, 1}, {1, 2}});
  auto pr = precision_recall_f1(pairs({{0, 1}, {2, 2}}), truth);
  CHECK(pr.precision == 0.5);
  CHECK(pr.recall == 0.5);
  CHECK(pr.f1 == 0.5);
  pr = precision_recall_f1(truth, truth);
  CHECK(pr.precision == 1.0);
  CHECK(pr.recall == 1.0);
  CHECK(pr.f1 == 1.0);
  pr = precision_recall_f1(pairs({}), truth);
  CHECK(pr.precision == 0.0);
  CHECK(pr.recall == 0.0);
  CHECK(pr.f1 == 0.0);
  try {
    precision_recall_f1(truth, pairs({}));
    FAIL("expected EmptyTruth");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyTruth);
  }
}

TEST_CASE("cumulative network") {
  LagCoefficientTensor t(2, 3);
  CHECK(cumulative_network(t).size() == 0);
  t.lag(1)(1, 0) = 0.3;
  t.lag(2)(1, 0) = -0.6;
  t.lag(2)(2, 2) = 0.5;
  const auto net = cumulative_network(t);
  CHECK(net.size() == 2);
  CHECK(net.edges.at({1, 0, 0}) == -1);
  CHECK(net.edges.at({2, 2, 0}) == 1);
  CHECK(cumulative_network(t, 0.7).size() == 0);
  CHECK(cumulative_network(t, 0.4).size() == 2);
  CHECK(lag_resolved_edges(t, 0.4).size() == 2);
  CHECK(net.size() <= t.nonzeros());
  t.lag(1)(0, 0) = -0.4;
  t.lag(2)(0, 0) = 0.4;
  CHECK(cumulative_network(t).edges.at({0, 0, 0}) == -1);
  CHECK_THROWS_AS(cumulative_network(t, -1.0), Error);
}

TEST_CASE("set metric properties on random edge sets") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 300; ++rep) {
    const auto a = random_set(rng, 0.2), b = random_set(rng, 0.3), c = random_set(rng, 0.1);
    CHECK(shd(a, b) == shd(b, a));
    CHECK(shd(a, c) <= shd(a, b) + shd(b, c));
    CHECK(shd(a, b) == false_positives(a, b) + (b.size() - true_positives(a, b)));
    if (b.size() == 0) continue;
    const auto pr = precision_recall_f1(a, b);
    CHECK((pr.f1 == 0.0) == (true_positives(a, b) == 0));
    if (pr.precision + pr.recall > 0) CHECK(pr.f1 == doctest::Approx(2 * pr.precision * pr.recall / (pr.precision + pr.recall)));
    CHECK(precision_recall_f1(b, b).f1 == 1.0);
    if (a.size() > 0 && !(a.edges == b.edges)) CHECK(pr.f1 < 1.0);

    // Nesting: a ∩ c ⊆ a.
    EdgeSet sub;
    for (const auto& [k, s] : a.edges)
      if (c.contains(k)) sub.edges[k] = s;
    CHECK(precision_recall_f1(sub, b).recall <= pr.recall);
    CHECK(false_positives(sub, b) <= false_positives(a, b));
  }
}

TEST_CASE("sign accuracy") {
  const auto truth = make_network(3, 1, {{.target = 0, .source = 1, .lag = 1, .weight = 0.7},
                                         {.target = 2, .source = 0, .lag = 1, .weight = -0.7}});
  LagCoefficientTensor est(1, 3);
  CHECK_FALSE(sign_accuracy(est, truth).has_value());
  est.lag(1)(0, 1) = 0.2;
  est.lag(1)(2, 0) = -0.1;
  CHECK(sign_accuracy(est, truth) == 1.0);
  est.lag(1)(2, 0) = 0.1;
  CHECK(sign_accuracy(est, truth) == 0.5);
}

TEST_CASE("evaluate at both levels") {
  const auto truth = make_network(3, 2, {{.target = 0, .source = 1, .lag = 1, .weight = 0.7},
                                         {.target = 0, .source = 1, .lag = 2, .weight = 0.7},
                                         {.target = 1, .source = 2, .lag = 2, .weight = 0.7}});
  LagCoefficientTensor est(2, 3);
  est.lag(1)(0, 1) = 0.5;
  est.lag(1)(1, 2) = 0.4;
  est.lag(2)(2, 2) = 0.1;
  const auto lag = evaluate(est, truth, EdgeLevel::LagResolved);
  CHECK(lag.true_positives == 1);
  CHECK(lag.false_positives == 2);
  CHECK(lag.shd == 4);
  CHECK(lag.false_positive_rate == doctest::Approx(2.0 / (18 - 3)));
  CHECK(lag.sign_accuracy == 1.0);
  const auto cum = evaluate(est, truth, EdgeLevel::Cumulative);
  CHECK(cum.true_edges == 2);
  CHECK(cum.true_positives == 2);
  CHECK(cum.shd == 1);
  CHECK(cum.recall == 1.0);
  CHECK(cum.false_positive_rate == doctest::Approx(1.0 / 7.0));
  CHECK(candidate_slots(EdgeLevel::LagResolved, 3, 2) == 18);
  CHECK(candidate_slots(EdgeLevel::Cumulative, 3, 2) == 9);
}

TEST_CASE("roc points") {
  SimulationSpec s;
  s.p = 8;
  s.n = 40;
  s.T = 6;
  s.n_edges = 10;
  const auto truth = generate_network(s);
  const auto data = simulate(s, truth);
  EstimationConfig c;
  const double grid[] = {0.2, 0.01, 0.1};
  const auto roc = roc_points(data, truth, grid, c);
  CHECK(roc.size() == 3);
  for (std::size_t k = 1; k < roc.size(); ++k) CHECK(roc[k - 1].false_positive_rate <= roc[k].false_positive_rate);
  const double one[] = {0.1};
  CHECK(roc_points(data, truth, one, c).size() == 1);
  try {
    roc_points(data, make_network(8, 2, {}), one, c);
    FAIL("expected EmptyTruth");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyTruth);
  }
  CHECK_THROWS_AS(roc_points(data, truth, std::span<const double>{}, c), Error);
}
