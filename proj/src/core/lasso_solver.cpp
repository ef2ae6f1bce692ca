#include "lasso_solver.hpp"

#include "error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace tlasso {

DesignMatrix standardize(const Eigen::MatrixXd& raw) {
  const Eigen::Index n = raw.rows();
  const Eigen::Index p = raw.cols();
  if (n == 0 || p == 0) fail(ErrorCode::EmptyMatrix, "design matrix has no rows or no columns");
  if (n < 2) fail(ErrorCode::InsufficientRows, "standardization needs at least 2 rows, got " + std::to_string(n));

  DesignMatrix out;
  out.values.resize(n, p);
  out.column_means.resize(p);
  out.column_scales.resize(p);
  out.column_sq_norms.resize(p);
  out.constant.assign(static_cast<std::size_t>(p), false);

  const double inv_n = 1.0 / static_cast<double>(n);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double mean = raw.col(j).mean();
    auto col = out.values.col(j);
    col = raw.col(j).array() - mean;
    const double scale = std::sqrt(col.squaredNorm() * inv_n);
    out.column_means(j) = mean;
    if (!(scale > 1e-12 * std::max(1.0, std::abs(mean)))) {
      col.setZero();
      out.column_scales(j) = 0.0;
      out.column_sq_norms(j) = 0.0;
      out.constant[static_cast<std::size_t>(j)] = true;
      continue;
    }
    col /= scale;
    out.column_scales(j) = scale;
    out.column_sq_norms(j) = col.squaredNorm() * inv_n;
  }
  return out;
}

bool is_excluded(const DesignMatrix& design, std::span<const double> weights, Eigen::Index j) {
  return design.constant[static_cast<std::size_t>(j)] || std::isinf(weights[static_cast<std::size_t>(j)]);
}

namespace {

void check_problem(const WeightedLassoProblem& problem) {
  const auto& X = problem.design.values;
  if (problem.response.size() != X.rows())
    fail(ErrorCode::DimensionMismatch, "response length " + std::to_string(problem.response.size()) +
                                           " != design rows " + std::to_string(X.rows()));
  if (problem.weights.size() != X.cols())
    fail(ErrorCode::DimensionMismatch, "weights length " + std::to_string(problem.weights.size()) +
                                           " != design columns " + std::to_string(X.cols()));
  if (!(problem.lambda >= 0.0) || !std::isfinite(problem.lambda))
    fail(ErrorCode::InvalidArgument, "lambda must be finite and nonnegative");
  for (Eigen::Index j = 0; j < problem.weights.size(); ++j) {
    const double w = problem.weights(j);
    if (std::isnan(w) || w < 0.0) fail(ErrorCode::InvalidArgument, "weights must be nonnegative");
  }
}

std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

double penalty(const DesignMatrix& design, std::span<const double> weights,
               const Eigen::Ref<const Eigen::VectorXd>& theta, double lambda) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < theta.size(); ++j) {
    if (theta(j) == 0.0) continue;
    if (is_excluded(design, weights, j)) return std::numeric_limits<double>::infinity();
    sum += weights[static_cast<std::size_t>(j)] * std::abs(theta(j));
  }
  return lambda * sum;
}

}  // namespace

namespace detail {

double kkt_violation(const DesignMatrix& design, const Eigen::Ref<const Eigen::VectorXd>& residual,
                     const Eigen::Ref<const Eigen::VectorXd>& theta, std::span<const double> weights,
                     double lambda) {
  const auto& X = design.values;
  const double two_over_n = 2.0 / static_cast<double>(X.rows());
  double worst = 0.0;
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    if (is_excluded(design, weights, j)) {
      if (theta(j) != 0.0) return std::numeric_limits<double>::infinity();
      continue;
    }
    const double grad = two_over_n * X.col(j).dot(residual);
    const double bound = lambda * weights[static_cast<std::size_t>(j)];
    double v;
    if (theta(j) != 0.0) {
      v = std::abs(grad - (theta(j) > 0.0 ? bound : -bound));
    } else {
      v = std::max(0.0, std::abs(grad) - bound);
    }
    worst = std::max(worst, v);
  }
  return worst;
}

SweepStats coordinate_descent(const DesignMatrix& design, Eigen::Ref<Eigen::VectorXd> residual,
                              Eigen::Ref<Eigen::VectorXd> theta, std::span<const double> weights,
                              double lambda, const SolverOptions& options, std::vector<double>* trace) {
  const auto& X = design.values;
  const Eigen::Index p = X.cols();
  const double inv_n = 1.0 / static_cast<double>(X.rows());

  // Excluded covariates are pinned at zero before the first sweep.
  for (Eigen::Index j = 0; j < p; ++j) {
    if (theta(j) != 0.0 && is_excluded(design, weights, j)) {
      residual += theta(j) * X.col(j);
      theta(j) = 0.0;
    }
  }

  SweepStats stats;
  while (stats.iterations < options.max_iter) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (is_excluded(design, weights, j)) continue;
      const double c = design.column_sq_norms(j);
      const double old = theta(j);
      const double z = inv_n * X.col(j).dot(residual) + c * old;
      const double updated = soft_threshold(z, 0.5 * lambda * weights[static_cast<std::size_t>(j)]) / c;
      const double delta = updated - old;
      if (delta != 0.0) {
        residual.noalias() -= delta * X.col(j);
        theta(j) = updated;
        max_change = std::max(max_change, std::abs(delta));
      }
    }
    ++stats.iterations;
    if (trace) trace->push_back(residual.squaredNorm() * inv_n + penalty(design, weights, theta, lambda));
    if (max_change < options.tol) {
      stats.kkt_violation = kkt_violation(design, residual, theta, weights, lambda);
      if (stats.kkt_violation <= options.tol) {
        stats.converged = true;
        return stats;
      }
    }
  }
  stats.kkt_violation = kkt_violation(design, residual, theta, weights, lambda);
  stats.converged = stats.kkt_violation <= options.tol;
  return stats;
}

}  // namespace detail

LassoSolution solve_weighted_lasso(const WeightedLassoProblem& problem, const SolverOptions& options,
                                   const std::optional<Eigen::VectorXd>& warm_start) {
  check_problem(problem);
  const auto& X = problem.design.values;

  LassoSolution sol;
  if (warm_start) {
    if (warm_start->size() != X.cols())
      fail(ErrorCode::DimensionMismatch, "warm start length does not match design columns");
    sol.coefficients = *warm_start;
  } else {
    sol.coefficients = Eigen::VectorXd::Zero(X.cols());
  }

  Eigen::VectorXd residual = problem.response - X * sol.coefficients;
  const auto stats = detail::coordinate_descent(problem.design, residual, sol.coefficients,
                                                as_span(problem.weights), problem.lambda, options,
                                                options.record_trace ? &sol.objective_trace : nullptr);
  sol.iterations = stats.iterations;
  sol.converged = stats.converged;
  sol.kkt_violation = stats.kkt_violation;
  sol.objective_value = lasso_objective(problem, sol.coefficients);
  return sol;
}

double lasso_objective(const WeightedLassoProblem& problem, const Eigen::VectorXd& coefficients) {
  check_problem(problem);
  if (coefficients.size() != problem.design.cols())
    fail(ErrorCode::DimensionMismatch, "coefficient length does not match design columns");
  const auto& X = problem.design.values;
  const Eigen::VectorXd r = problem.response - X * coefficients;
  return r.squaredNorm() / static_cast<double>(X.rows()) +
         penalty(problem.design, as_span(problem.weights), coefficients, problem.lambda);
}

double kkt_check(const WeightedLassoProblem& problem, const Eigen::VectorXd& coefficients) {
  check_problem(problem);
  if (coefficients.size() != problem.design.cols())
    fail(ErrorCode::DimensionMismatch, "coefficient length " + std::to_string(coefficients.size()) +
                                           " != design columns " + std::to_string(problem.design.cols()));
  const Eigen::VectorXd r = problem.response - problem.design.values * coefficients;
  return detail::kkt_violation(problem.design, r, coefficients, as_span(problem.weights), problem.lambda);
}

}  // namespace tlasso
