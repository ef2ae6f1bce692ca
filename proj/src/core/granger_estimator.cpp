#include "granger_estimator.hpp"

#include "error.hpp"
#include "normal_quantile.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace tlasso {

const char* to_string(Penalty penalty) {
  switch (penalty) {
    case Penalty::Lasso: return "lasso";
    case Penalty::AdaptiveLasso: return "adaptive_lasso";
    case Penalty::TruncatingLasso: return "truncating_lasso";
    case Penalty::TruncatingAdaptiveLasso: return "truncating_adaptive_lasso";
  }
  return "unknown";
}

std::optional<Penalty> parse_penalty(std::string_view name) {
  if (name == "lasso") return Penalty::Lasso;
  if (name == "adaptive_lasso" || name == "alasso") return Penalty::AdaptiveLasso;
  if (name == "truncating_lasso" || name == "tlasso") return Penalty::TruncatingLasso;
  if (name == "truncating_adaptive_lasso" || name == "talasso") return Penalty::TruncatingAdaptiveLasso;
  return std::nullopt;
}

bool is_adaptive(Penalty penalty) {
  return penalty == Penalty::AdaptiveLasso || penalty == Penalty::TruncatingAdaptiveLasso;
}

bool is_truncating(Penalty penalty) {
  return penalty == Penalty::TruncatingLasso || penalty == Penalty::TruncatingAdaptiveLasso;
}

const char* to_string(ResponseMode mode) {
  return mode == ResponseMode::LastTimepoint ? "last_timepoint" : "rolling_window";
}

std::optional<ResponseMode> parse_response_mode(std::string_view name) {
  if (name == "last_timepoint") return ResponseMode::LastTimepoint;
  if (name == "rolling_window") return ResponseMode::RollingWindow;
  return std::nullopt;
}

std::size_t effective_dmax(const EstimationConfig& config, std::size_t timepoints) {
  return config.d_max.value_or(timepoints > 0 ? timepoints - 1 : 0);
}

void validate(const EstimationConfig& config, std::size_t timepoints) {
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) fail(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
  if (!(config.beta >= 0.0 && config.beta < 1.0)) fail(ErrorCode::InvalidArgument, "beta must lie in [0, 1)");
  if (config.d_max && *config.d_max < 1) fail(ErrorCode::InvalidArgument, "d_max must be at least 1");
  if (config.d_max && *config.d_max >= timepoints)
    fail(ErrorCode::InsufficientTimepoints, "need T > d_max (T=" + std::to_string(timepoints) +
                                                ", d_max=" + std::to_string(*config.d_max) + ")");
  if (config.lambda_override && !(*config.lambda_override > 0.0 && std::isfinite(*config.lambda_override)))
    fail(ErrorCode::InvalidArgument, "lambda override must be a positive finite number");
  if (config.truncation_multiplier && !(*config.truncation_multiplier >= 1.0))
    fail(ErrorCode::InvalidArgument, "truncation multiplier M must be at least 1");
  if (!(config.solver.tol > 0.0) || config.solver.max_iter < 1)
    fail(ErrorCode::InvalidArgument, "solver tolerance must be positive and max_iter at least 1");
  if (!(config.sweep_tol > 0.0) || config.max_sweeps < 1)
    fail(ErrorCode::InvalidArgument, "sweep tolerance must be positive and max_sweeps at least 1");
}

LagCoefficientTensor::LagCoefficientTensor(std::size_t lags, std::size_t p)
    : p_(p), matrices_(lags, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p))) {}

std::size_t LagCoefficientTensor::nonzeros(std::size_t t) const {
  return static_cast<std::size_t>((lag(t).array() != 0.0).count());
}

std::size_t LagCoefficientTensor::nonzeros() const {
  std::size_t total = 0;
  for (std::size_t t = 1; t <= lags(); ++t) total += nonzeros(t);
  return total;
}

RegressionProblems build_regression_problems(const TimeSeriesDataset& data, const EstimationConfig& config) {
  const std::size_t n = data.replicates();
  const std::size_t T = data.timepoints();
  const std::size_t p = data.variables();
  const std::size_t d = effective_dmax(config, T);
  if (d < 1 || T <= d)
    fail(ErrorCode::InsufficientTimepoints,
         "need T > d_max >= 1 (T=" + std::to_string(T) + ", d_max=" + std::to_string(d) + ")");

  const std::size_t windows = config.response_mode == ResponseMode::LastTimepoint ? 1 : T - d;
  const std::size_t rows = windows * n;
  if (rows < 2)
    fail(ErrorCode::InsufficientRows, "regression needs at least 2 rows, got " + std::to_string(rows) +
                                          (config.response_mode == ResponseMode::LastTimepoint
                                               ? " (single replicate: use rolling_window)"
                                               : ""));

  const auto R = static_cast<Eigen::Index>(rows);
  const auto P = static_cast<Eigen::Index>(p);
  // Zero-based time of the response in window w.
  auto response_time = [&](std::size_t w) { return config.response_mode == ResponseMode::LastTimepoint ? T - 1 : d + w; };

  RegressionProblems out;
  out.timepoints = T;
  out.responses.resize(R, P);
  for (std::size_t w = 0; w < windows; ++w)
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t i = 0; i < p; ++i)
        out.responses(static_cast<Eigen::Index>(w * n + r), static_cast<Eigen::Index>(i)) = data.at(r, response_time(w), i);

  out.response_scales = Eigen::VectorXd::Ones(P);
  if (config.standardize_response) {
    for (Eigen::Index i = 0; i < P; ++i) {
      auto col = out.responses.col(i);
      col.array() -= col.mean();
      const double scale = std::sqrt(col.squaredNorm() / static_cast<double>(R));
      if (scale > 0.0) {
        col /= scale;
        out.response_scales(i) = scale;
      }
    }
  }

  out.blocks.reserve(d);
  Eigen::MatrixXd raw(R, P);
  for (std::size_t t = 1; t <= d; ++t) {
    for (std::size_t w = 0; w < windows; ++w)
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t j = 0; j < p; ++j)
          raw(static_cast<Eigen::Index>(w * n + r), static_cast<Eigen::Index>(j)) = data.at(r, response_time(w) - t, j);
    out.blocks.push_back(standardize(raw));
  }
  return out;
}

double compute_lambda(std::size_t n, std::size_t d, std::size_t p, double alpha) {
  if (n == 0 || d == 0 || p == 0) fail(ErrorCode::InvalidArgument, "compute_lambda needs positive n, d, p");
  if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
  const double q = alpha / (2.0 * static_cast<double>(d) * static_cast<double>(p) * static_cast<double>(p));
  if (q >= 0.5) fail(ErrorCode::InvalidQuantile, "alpha / (2 d p^2) must be below 0.5, got " + std::to_string(q));
  return 2.0 / std::sqrt(static_cast<double>(n)) * upper_normal_quantile(q);
}

double initial_lambda(std::size_t n, std::size_t d, std::size_t p) {
  return std::sqrt(std::log(static_cast<double>(p * d)) / static_cast<double>(n));
}

std::vector<Eigen::MatrixXd> compute_adaptive_weights(const LagCoefficientTensor& initial) {
  std::vector<Eigen::MatrixXd> weights;
  weights.reserve(initial.lags());
  for (std::size_t t = 1; t <= initial.lags(); ++t) {
    weights.push_back(initial.lag(t).unaryExpr([](double a) {
      return a == 0.0 ? std::numeric_limits<double>::infinity() : std::max(1.0, 1.0 / std::abs(a));
    }));
  }
  return weights;
}

PsiFlag compute_truncation_factor(std::size_t t, std::size_t previous_lag_nnz, std::size_t p, std::size_t timepoints,
                                  double beta, bool earlier_lag_truncated) {
  if (t <= 1) return PsiFlag::Active;
  if (earlier_lag_truncated) return PsiFlag::Truncated;
  if (t >= timepoints) fail(ErrorCode::InvalidArgument, "truncation lag must be below T");
  const double threshold = static_cast<double>(p) * static_cast<double>(p) * beta / static_cast<double>(timepoints - t);
  return static_cast<double>(previous_lag_nnz) < threshold ? PsiFlag::Truncated : PsiFlag::Active;
}

namespace {

// Coefficients are kept per lag with one column per target so that each
// target's block is contiguous: coef[t](j, i) = theta for source j, target i.
struct RelaxationState {
  std::vector<Eigen::MatrixXd> coef;
  Eigen::MatrixXd residual;
  std::vector<PsiFlag> flags;
  std::optional<std::size_t> truncation_lag;
  int sweeps = 0;
  bool converged = false;
  std::size_t unconverged_blocks = 0;
  std::vector<double> objective_trace;
  std::vector<double> block_objective_trace;
};

struct RelaxationSettings {
  double lambda = 0.0;
  bool truncating = false;
  const std::vector<Eigen::MatrixXd>* weights = nullptr;  // same layout as coef
};

double lag_lambda(const EstimationConfig& config, double lambda, PsiFlag flag) {
  if (flag == PsiFlag::Active) return lambda;
  return config.truncation_multiplier ? lambda * *config.truncation_multiplier : 0.0;
}

double penalized_objective(const Eigen::MatrixXd& residual, const std::vector<Eigen::MatrixXd>& coef,
                           const std::vector<Eigen::MatrixXd>& weights, std::span<const double> lag_lambdas) {
  double value = residual.squaredNorm() / static_cast<double>(residual.rows());
  for (std::size_t t = 0; t < coef.size(); ++t) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < coef[t].cols(); ++i)
      for (Eigen::Index j = 0; j < coef[t].rows(); ++j)
        if (coef[t](j, i) != 0.0) sum += weights[t](j, i) * std::abs(coef[t](j, i));
    if (sum != 0.0) value += lag_lambdas[t] * sum;
  }
  return value;
}

std::size_t count_nonzeros(const Eigen::MatrixXd& m) { return static_cast<std::size_t>((m.array() != 0.0).count()); }

RelaxationState block_relaxation(const RegressionProblems& problems, const EstimationConfig& config,
                                  const RelaxationSettings& settings) {
  const std::size_t D = problems.lags();
  const std::size_t p = problems.variables();
  const auto P = static_cast<Eigen::Index>(p);
  const auto& weights = *settings.weights;

  RelaxationState state;
  state.coef.assign(D, Eigen::MatrixXd::Zero(P, P));
  state.residual = problems.responses;
  state.flags.assign(D, PsiFlag::Active);
  std::vector<double> lambdas(D, settings.lambda);
  std::vector<int> block_unconverged(p, 0);

  auto objective = [&] { return penalized_objective(state.residual, state.coef, weights, lambdas); };

  for (int sweep = 1; sweep <= config.max_sweeps; ++sweep) {
    const std::vector<Eigen::MatrixXd> previous = state.coef;
    state.truncation_lag.reset();

    for (std::size_t t = 0; t < D; ++t) {
      const std::size_t lag = t + 1;
      PsiFlag flag = PsiFlag::Active;
      if (settings.truncating)
        flag = compute_truncation_factor(lag, lag > 1 ? count_nonzeros(state.coef[t - 1]) : 0, p, problems.timepoints,
                                         config.beta, state.truncation_lag.has_value());
      if (flag == PsiFlag::Truncated && !state.truncation_lag) state.truncation_lag = lag;
      state.flags[t] = flag;
      lambdas[t] = lag_lambda(config, settings.lambda, flag);

      const DesignMatrix& X = problems.blocks[t];
      if (flag == PsiFlag::Truncated && !config.truncation_multiplier) {
        for (Eigen::Index i = 0; i < P; ++i) {
          auto theta = state.coef[t].col(i);
          if (theta.isZero(0.0)) continue;
          state.residual.col(i).noalias() += X.values * theta;
          theta.setZero();
        }
        continue;
      }

      state.block_objective_trace.push_back(objective());
      parallel_for(p, config.threads, [&](std::size_t i) {
        const auto col = static_cast<Eigen::Index>(i);
        const std::span<const double> w(weights[t].col(col).data(), p);
        const auto stats = detail::coordinate_descent(X, state.residual.col(col), state.coef[t].col(col), w,
                                                      lambdas[t], config.solver);
        if (!stats.converged) ++block_unconverged[i];
      });
      state.block_objective_trace.push_back(objective());
    }

    state.sweeps = sweep;
    state.objective_trace.push_back(objective());

    double change = 0.0;
    for (std::size_t t = 0; t < D; ++t) change = std::max(change, (state.coef[t] - previous[t]).cwiseAbs().maxCoeff());
    if (change < config.sweep_tol) {
      state.converged = true;
      break;
    }
  }
  for (int c : block_unconverged) state.unconverged_blocks += static_cast<std::size_t>(c);
  return state;
}

LagCoefficientTensor to_tensor(const std::vector<Eigen::MatrixXd>& coef) {
  const std::size_t p = coef.empty() ? 0 : static_cast<std::size_t>(coef.front().rows());
  LagCoefficientTensor out(coef.size(), p);
  for (std::size_t t = 0; t < coef.size(); ++t) out.lag(t + 1) = coef[t].transpose();
  return out;
}

// Undo covariate (and optional response) scaling: A(i, j) = theta(i, j) * s_y(i) / s_x(j).
LagCoefficientTensor to_data_units(const LagCoefficientTensor& standardized, const RegressionProblems& problems) {
  LagCoefficientTensor out = standardized;
  for (std::size_t t = 1; t <= out.lags(); ++t) {
    const auto& scales = problems.blocks[t - 1].column_scales;
    auto& A = out.lag(t);
    for (Eigen::Index i = 0; i < A.rows(); ++i)
      for (Eigen::Index j = 0; j < A.cols(); ++j)
        A(i, j) = A(i, j) == 0.0 ? 0.0 : A(i, j) * problems.response_scales(i) / scales(j);
  }
  return out;
}

}  // namespace

GrangerEstimate fit(const TimeSeriesDataset& data, const EstimationConfig& config) {
  validate(config, data.timepoints());
  const RegressionProblems problems = build_regression_problems(data, config);
  const std::size_t D = problems.lags();
  const std::size_t p = problems.variables();
  const std::size_t n = problems.rows();
  const auto P = static_cast<Eigen::Index>(p);

  GrangerEstimate est;
  est.config = config;
  est.rows = n;
  est.lambda_used = config.lambda_override ? *config.lambda_override : compute_lambda(n, D, p, config.alpha);

  // Internal weight layout matches the coefficient layout (source j, target i).
  std::vector<Eigen::MatrixXd> weights(D, Eigen::MatrixXd::Ones(P, P));
  if (is_adaptive(config.penalty)) {
    est.lambda_initial = initial_lambda(n, D, p);
    const RelaxationState initial =
        block_relaxation(problems, config, {.lambda = *est.lambda_initial, .truncating = false, .weights = &weights});
    const auto adaptive = compute_adaptive_weights(to_tensor(initial.coef));
    for (std::size_t t = 0; t < D; ++t) weights[t] = adaptive[t].transpose();
  }

  RelaxationState state = block_relaxation(
      problems, config, {.lambda = est.lambda_used, .truncating = is_truncating(config.penalty), .weights = &weights});

  est.standardized = to_tensor(state.coef);
  est.tensor = to_data_units(est.standardized, problems);
  est.truncation_lag = state.truncation_lag;
  est.estimated_order = state.truncation_lag ? *state.truncation_lag - 1 : D;
  est.psi_flags = std::move(state.flags);
  est.weights_used.reserve(D);
  for (std::size_t t = 0; t < D; ++t) est.weights_used.push_back(weights[t].transpose());
  est.sweeps = state.sweeps;
  est.converged = state.converged;
  est.unconverged_blocks = state.unconverged_blocks;
  est.objective_trace = std::move(state.objective_trace);
  est.block_objective_trace = std::move(state.block_objective_trace);
  return est;
}

double objective_value(const TimeSeriesDataset& data, const GrangerEstimate& estimate) {
  const RegressionProblems problems = build_regression_problems(data, estimate.config);
  const std::size_t D = problems.lags();
  const std::size_t p = problems.variables();
  if (estimate.standardized.lags() != D || estimate.standardized.variables() != p || estimate.psi_flags.size() != D ||
      estimate.weights_used.size() != D)
    fail(ErrorCode::DimensionMismatch, "estimate does not match the dataset's regression problems");

  Eigen::MatrixXd residual = problems.responses;
  std::vector<Eigen::MatrixXd> coef, weights;
  std::vector<double> lambdas;
  for (std::size_t t = 1; t <= D; ++t) {
    coef.push_back(estimate.standardized.lag(t).transpose());
    weights.push_back(estimate.weights_used[t - 1].transpose());
    lambdas.push_back(lag_lambda(estimate.config, estimate.lambda_used, estimate.psi_flags[t - 1]));
    residual.noalias() -= problems.blocks[t - 1].values * coef.back();
  }
  return penalized_objective(residual, coef, weights, lambdas);
}

}  // namespace tlasso
