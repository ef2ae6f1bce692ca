#pragma once

#include "dataset.hpp"
#include "lasso_solver.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tlasso {

enum class Penalty { Lasso, AdaptiveLasso, TruncatingLasso, TruncatingAdaptiveLasso };

const char* to_string(Penalty penalty);
std::optional<Penalty> parse_penalty(std::string_view name);
bool is_adaptive(Penalty penalty);
bool is_truncating(Penalty penalty);

/// last_timepoint: one response row per replicate, taken at the final time.
/// rolling_window: every time s > d_max is a response, windows are stacked
/// as pseudo-replicates.
enum class ResponseMode { LastTimepoint, RollingWindow };

const char* to_string(ResponseMode mode);
std::optional<ResponseMode> parse_response_mode(std::string_view name);

enum class PsiFlag { Active, Truncated };

struct EstimationConfig {
  Penalty penalty = Penalty::TruncatingAdaptiveLasso;
  /// False-positive control level for the lambda formula.
  double alpha = 0.1;
  /// Allowed false-negative rate driving the truncation threshold.
  double beta = 0.1;
  /// Largest lag considered; T - 1 when unset.
  std::optional<std::size_t> d_max;
  std::optional<double> lambda_override;
  /// Penalty multiplier M on truncated lags. Unset means truncated lags are
  /// set to exact zero without solving (the M -> infinity limit).
  std::optional<double> truncation_multiplier;
  SolverOptions solver;
  /// Block relaxation stops when no coefficient moves more than this between sweeps.
  double sweep_tol = 1e-6;
  int max_sweeps = 100;
  ResponseMode response_mode = ResponseMode::LastTimepoint;
  /// Also center and scale each response column to n^{-1}<y, y> = 1.
  bool standardize_response = false;
  unsigned threads = 1;
};

/// Throws InvalidArgument on out-of-range fields. `timepoints` is the T of
/// the dataset the config will be applied to.
void validate(const EstimationConfig& config, std::size_t timepoints);

std::size_t effective_dmax(const EstimationConfig& config, std::size_t timepoints);

/// Coefficient matrices A^1..A^{d_max}; entry (i, j) of A^t is the effect
/// of variable j at lag t on variable i.
class LagCoefficientTensor {
 public:
  LagCoefficientTensor() = default;
  LagCoefficientTensor(std::size_t lags, std::size_t p);

  std::size_t lags() const { return matrices_.size(); }
  std::size_t variables() const { return p_; }

  /// One-based lag.
  Eigen::MatrixXd& lag(std::size_t t) { return matrices_.at(t - 1); }
  const Eigen::MatrixXd& lag(std::size_t t) const { return matrices_.at(t - 1); }

  std::size_t nonzeros(std::size_t t) const;
  std::size_t nonzeros() const;

 private:
  std::size_t p_ = 0;
  std::vector<Eigen::MatrixXd> matrices_;
};

/// The p target regressions share their design: block t holds the lag-t
/// covariates, column i of `responses` is the response of target i.
struct RegressionProblems {
  std::vector<DesignMatrix> blocks;
  Eigen::MatrixXd responses;
  Eigen::VectorXd response_scales;
  std::size_t timepoints = 0;

  std::size_t rows() const { return static_cast<std::size_t>(responses.rows()); }
  std::size_t lags() const { return blocks.size(); }
  std::size_t variables() const { return static_cast<std::size_t>(responses.cols()); }
};

RegressionProblems build_regression_problems(const TimeSeriesDataset& data, const EstimationConfig& config);

/// 2 n^{-1/2} Z*_{alpha / (2 d p^2)}.
double compute_lambda(std::size_t n, std::size_t d, std::size_t p, double alpha);

/// Rate-based penalty for the initial lasso behind adaptive weights:
/// sqrt(log(p * d) / n).
double initial_lambda(std::size_t n, std::size_t d, std::size_t p);

/// w = max(1, 1/|initial|); exact zeros map to +inf (covariate excluded).
std::vector<Eigen::MatrixXd> compute_adaptive_weights(const LagCoefficientTensor& initial);

/// Psi flag for one-based lag t given the nonzero count of lag t - 1.
/// Lag 1 is always active and truncation is contagious to later lags.
PsiFlag compute_truncation_factor(std::size_t t, std::size_t previous_lag_nnz, std::size_t p,
                                  std::size_t timepoints, double beta, bool earlier_lag_truncated = false);

struct GrangerEstimate {
  /// Coefficients in the units of the input data.
  LagCoefficientTensor tensor;
  /// Coefficients on the standardized scale the penalty acts on.
  LagCoefficientTensor standardized;
  std::size_t estimated_order = 0;
  /// First truncated lag t0, if truncation fired.
  std::optional<std::size_t> truncation_lag;
  double lambda_used = 0.0;
  std::optional<double> lambda_initial;
  std::vector<PsiFlag> psi_flags;
  /// weights_used[t - 1](i, j), +inf for excluded covariates.
  std::vector<Eigen::MatrixXd> weights_used;
  EstimationConfig config;
  std::size_t rows = 0;
  int sweeps = 0;
  bool converged = false;
  /// Block solves that hit the solver's iteration cap.
  std::size_t unconverged_blocks = 0;
  /// Full objective after each sweep.
  std::vector<double> objective_trace;
  /// Objective after each block update, with the Psi flags of that sweep.
  std::vector<double> block_objective_trace;
};

GrangerEstimate fit(const TimeSeriesDataset& data, const EstimationConfig& config);

/// Full penalized objective recomputed from the data:
/// sum_i n^{-1}||y_i - sum_t X^{T-t} theta_i^t||^2 + lambda sum_t Psi^t sum_j w_ij^t |theta_ij^t|.
double objective_value(const TimeSeriesDataset& data, const GrangerEstimate& estimate);

}  // namespace tlasso
