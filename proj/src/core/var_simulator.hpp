#pragma once

#include "dataset.hpp"
#include "granger_estimator.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace tlasso {

enum class SignMode { AllPositive, RandomSign };
/// process: noise enters the recursion. measurement: the recursion runs
/// noise-free and noise is added to the recorded observations.
enum class NoiseMode { Process, Measurement };

const char* to_string(SignMode mode);
const char* to_string(NoiseMode mode);
std::optional<SignMode> parse_sign_mode(std::string_view name);
std::optional<NoiseMode> parse_noise_mode(std::string_view name);

struct SimulationSpec {
  std::size_t p = 100;
  std::size_t T = 10;
  std::size_t n = 50;
  std::size_t d = 2;
  double rho = 0.7;
  double sigma = 0.2;
  std::size_t n_edges = 50;
  std::uint64_t seed = 1;
  SignMode sign_mode = SignMode::AllPositive;
  NoiseMode noise_mode = NoiseMode::Process;
  /// Steps simulated and discarded before the T recorded time points. Only
  /// applied to stable networks; explosive ones record from t = 1.
  std::size_t burn_in = 50;
};

void validate(const SimulationSpec& spec);

struct Edge {
  std::size_t target = 0;  // zero-based
  std::size_t source = 0;  // zero-based
  std::size_t lag = 0;     // one-based
  double weight = 0.0;

  bool operator==(const Edge&) const = default;
};

struct GroundTruthNetwork {
  LagCoefficientTensor tensor;
  /// Sorted by (lag, target, source).
  std::vector<Edge> edges;
};

/// Builds the tensor/edge-list pair from explicit edges.
GroundTruthNetwork make_network(std::size_t p, std::size_t d, std::vector<Edge> edges);

/// n_edges slots drawn uniformly without replacement from the d*p*p positions.
GroundTruthNetwork generate_network(const SimulationSpec& spec);

/// spec.burn_in for a stable network, 0 for an explosive one.
std::size_t effective_burn_in(const SimulationSpec& spec, const GroundTruthNetwork& network);

/// Replicate r draws from its own stream derived from (seed, r), so replicates
/// can be generated in any order or in parallel with identical output.
TimeSeriesDataset simulate(const SimulationSpec& spec, const GroundTruthNetwork& network, unsigned threads = 1);

struct StabilityReport {
  double spectral_radius = 0.0;
  bool explosive = false;
};

/// Spectral radius of the VAR companion matrix by normalized repeated
/// squaring, rho = lim ||C^m||^{1/m}.
StabilityReport stability_check(const GroundTruthNetwork& network);

Eigen::MatrixXd companion_matrix(const LagCoefficientTensor& tensor);

/// Seed for stream `stream` of a run with master seed `seed` (splitmix64 mix).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace tlasso
