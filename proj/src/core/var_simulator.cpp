#include "var_simulator.hpp"

#include "error.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace tlasso {

const char* to_string(SignMode mode) { return mode == SignMode::AllPositive ? "all_positive" : "random_sign"; }
const char* to_string(NoiseMode mode) { return mode == NoiseMode::Process ? "process" : "measurement"; }

std::optional<SignMode> parse_sign_mode(std::string_view name) {
  if (name == "all_positive") return SignMode::AllPositive;
  if (name == "random_sign") return SignMode::RandomSign;
  return std::nullopt;
}

std::optional<NoiseMode> parse_noise_mode(std::string_view name) {
  if (name == "process") return NoiseMode::Process;
  if (name == "measurement") return NoiseMode::Measurement;
  return std::nullopt;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void validate(const SimulationSpec& spec) {
  if (spec.p < 1 || spec.n < 1 || spec.d < 1) fail(ErrorCode::InvalidArgument, "simulation needs p, n, d >= 1");
  if (spec.T < 2) fail(ErrorCode::InvalidArgument, "simulation needs T >= 2");
  if (spec.d >= spec.T) fail(ErrorCode::InvalidArgument, "simulation needs d < T");
  if (!(spec.sigma >= 0.0) || !std::isfinite(spec.sigma)) fail(ErrorCode::InvalidArgument, "sigma must be finite and nonnegative");
  if (!std::isfinite(spec.rho)) fail(ErrorCode::InvalidArgument, "rho must be finite");
  if (spec.n_edges > spec.d * spec.p * spec.p)
    fail(ErrorCode::TooManyEdges, "requested " + std::to_string(spec.n_edges) + " edges but only " +
                                      std::to_string(spec.d * spec.p * spec.p) + " lag-resolved slots exist");
}

GroundTruthNetwork make_network(std::size_t p, std::size_t d, std::vector<Edge> edges) {
  GroundTruthNetwork net;
  net.tensor = LagCoefficientTensor(d, p);
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.lag, a.target, a.source) < std::tie(b.lag, b.target, b.source);
  });
  for (const Edge& e : edges) {
    if (e.lag < 1 || e.lag > d || e.target >= p || e.source >= p)
      fail(ErrorCode::DimensionMismatch, "edge outside a network with p=" + std::to_string(p) + ", d=" + std::to_string(d));
    double& slot = net.tensor.lag(e.lag)(static_cast<Eigen::Index>(e.target), static_cast<Eigen::Index>(e.source));
    if (slot != 0.0) fail(ErrorCode::InvalidArgument, "duplicate edge in network");
    if (e.weight == 0.0) fail(ErrorCode::InvalidArgument, "network edges must have nonzero weight");
    slot = e.weight;
  }
  net.edges = std::move(edges);
  return net;
}

GroundTruthNetwork generate_network(const SimulationSpec& spec) {
  validate(spec);
  const std::size_t slots = spec.d * spec.p * spec.p;
  std::mt19937_64 rng(derive_seed(spec.seed, 0));

  // Partial Fisher-Yates: the first n_edges entries are a uniform sample.
  std::vector<std::size_t> order(slots);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t k = 0; k < spec.n_edges; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, slots - 1);
    std::swap(order[k], order[pick(rng)]);
  }

  std::bernoulli_distribution coin(0.5);
  std::vector<Edge> edges;
  edges.reserve(spec.n_edges);
  const std::size_t pp = spec.p * spec.p;
  for (std::size_t k = 0; k < spec.n_edges; ++k) {
    const std::size_t s = order[k];
    const double sign = spec.sign_mode == SignMode::RandomSign && coin(rng) ? -1.0 : 1.0;
    edges.push_back({.target = (s % pp) / spec.p, .source = s % spec.p, .lag = s / pp + 1, .weight = sign * spec.rho});
  }
  return make_network(spec.p, spec.d, std::move(edges));
}

std::size_t effective_burn_in(const SimulationSpec& spec, const GroundTruthNetwork& network) {
  return stability_check(network).explosive ? 0 : spec.burn_in;
}

TimeSeriesDataset simulate(const SimulationSpec& spec, const GroundTruthNetwork& network, unsigned threads) {
  validate(spec);
  if (network.tensor.variables() != spec.p || network.tensor.lags() != spec.d)
    fail(ErrorCode::DimensionMismatch, "network dimensions do not match the simulation spec");

  const std::size_t p = spec.p;
  const std::size_t d = spec.d;
  const auto P = static_cast<Eigen::Index>(p);
  std::vector<double> values(spec.n * spec.T * p);
  const std::uint64_t replicate_root = derive_seed(spec.seed, 1);
  const std::size_t burn_in = effective_burn_in(spec, network);

  parallel_for(spec.n, threads, [&](std::size_t r) {
    std::mt19937_64 rng(derive_seed(replicate_root, r));
    std::normal_distribution<double> normal(0.0, 1.0);

    // history[k] holds X^{s-1-k}; pre-sample values are i.i.d. standard normal.
    std::vector<Eigen::VectorXd> history(d, Eigen::VectorXd(P));
    for (auto& h : history)
      for (Eigen::Index i = 0; i < P; ++i) h(i) = normal(rng);

    Eigen::VectorXd x(P);
    const std::size_t steps = burn_in + spec.T;
    for (std::size_t s = 0; s < steps; ++s) {
      x.setZero();
      for (std::size_t k = 0; k < d; ++k) x.noalias() += network.tensor.lag(k + 1) * history[k];
      if (spec.noise_mode == NoiseMode::Process)
        for (Eigen::Index i = 0; i < P; ++i) x(i) += spec.sigma * normal(rng);
      std::rotate(history.rbegin(), history.rbegin() + 1, history.rend());
      history[0] = x;
      if (s >= burn_in) {
        const std::size_t t = s - burn_in;
        for (std::size_t i = 0; i < p; ++i) values[(r * spec.T + t) * p + i] = x(static_cast<Eigen::Index>(i));
      }
    }
    if (spec.noise_mode == NoiseMode::Measurement)
      for (std::size_t k = 0; k < spec.T * p; ++k) values[r * spec.T * p + k] += spec.sigma * normal(rng);
  });
  return TimeSeriesDataset(spec.n, spec.T, p, std::move(values), default_variable_names(p));
}

Eigen::MatrixXd companion_matrix(const LagCoefficientTensor& tensor) {
  const auto p = static_cast<Eigen::Index>(tensor.variables());
  const auto d = static_cast<Eigen::Index>(tensor.lags());
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(d * p, d * p);
  for (Eigen::Index k = 0; k < d; ++k) C.block(0, k * p, p, p) = tensor.lag(static_cast<std::size_t>(k) + 1);
  if (d > 1) C.block(p, 0, (d - 1) * p, (d - 1) * p).setIdentity();
  return C;
}

StabilityReport stability_check(const GroundTruthNetwork& network) {
  StabilityReport report;
  if (network.tensor.lags() == 0 || network.tensor.variables() == 0) return report;

  // Invariant: C^m = B * exp(log_scale) with ||B||_F = 1.
  Eigen::MatrixXd B = companion_matrix(network.tensor);
  double log_scale = 0.0;
  double m = 1.0;
  double estimate = 0.0;
  for (int k = 0; k < 64; ++k) {
    const double norm = B.norm();
    if (norm == 0.0 || !std::isfinite(norm)) {
      estimate = norm == 0.0 ? 0.0 : estimate;
      break;
    }
    B /= norm;
    log_scale += std::log(norm);
    const double next = std::exp(log_scale / m);
    const bool settled = k > 8 && std::abs(next - estimate) <= 1e-15 * next;
    estimate = next;
    if (settled) break;
    B = (B * B).eval();
    log_scale *= 2.0;
    m *= 2.0;
  }
  report.spectral_radius = estimate;
  report.explosive = estimate >= 1.0;
  return report;
}

}  // namespace tlasso
