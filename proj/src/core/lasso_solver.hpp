#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace tlasso {

/// Column-standardized design. Each non-constant column x satisfies
/// mean(x) = 0 and n^{-1} <x, x> = 1; constant columns are zeroed and flagged.
struct DesignMatrix {
  Eigen::MatrixXd values;
  Eigen::VectorXd column_means;
  /// raw = values * scale + mean. Zero for constant columns.
  Eigen::VectorXd column_scales;
  /// n^{-1} <x_j, x_j> of the stored column (1 up to rounding, 0 if constant).
  Eigen::VectorXd column_sq_norms;
  std::vector<bool> constant;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
};

DesignMatrix standardize(const Eigen::MatrixXd& raw);

inline double soft_threshold(double z, double gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

/// n^{-1} ||y - X theta||^2 + lambda * sum_j w_j |theta_j|.
/// An infinite weight marks a covariate that is excluded from the fit.
struct WeightedLassoProblem {
  const DesignMatrix& design;
  Eigen::VectorXd response;
  Eigen::VectorXd weights;
  double lambda = 0.0;
};

struct SolverOptions {
  double tol = 1e-7;
  int max_iter = 10000;
  bool record_trace = false;
};

struct LassoSolution {
  Eigen::VectorXd coefficients;
  double objective_value = 0.0;
  int iterations = 0;
  double kkt_violation = 0.0;
  bool converged = false;
  /// Objective after every full sweep, only filled when requested.
  std::vector<double> objective_trace;
};

/// Covariate j takes no part in the fit: constant column or infinite weight.
bool is_excluded(const DesignMatrix& design, std::span<const double> weights, Eigen::Index j);

/// Cyclic coordinate descent in ascending covariate order. Never throws on
/// non-convergence; check `converged` and `kkt_violation` instead.
LassoSolution solve_weighted_lasso(const WeightedLassoProblem& problem,
                                   const SolverOptions& options = {},
                                   const std::optional<Eigen::VectorXd>& warm_start = std::nullopt);

/// Max KKT residual of `coefficients`, recomputed from scratch:
/// active j:   |2n^{-1}<x_j, r> - lambda w_j sign(theta_j)|
/// inactive j: max(0, |2n^{-1}<x_j, r>| - lambda w_j)
/// excluded j: 0 if theta_j = 0, otherwise +inf.
double kkt_check(const WeightedLassoProblem& problem, const Eigen::VectorXd& coefficients);

double lasso_objective(const WeightedLassoProblem& problem, const Eigen::VectorXd& coefficients);

namespace detail {

struct SweepStats {
  int iterations = 0;
  bool converged = false;
  double kkt_violation = 0.0;
};

/// Shared kernel. `residual` must equal y - X * theta on entry and is kept
/// in sync. Used directly by the block relaxation in the Granger estimator.
SweepStats coordinate_descent(const DesignMatrix& design, Eigen::Ref<Eigen::VectorXd> residual,
                              Eigen::Ref<Eigen::VectorXd> theta, std::span<const double> weights,
                              double lambda, const SolverOptions& options,
                              std::vector<double>* trace = nullptr);

double kkt_violation(const DesignMatrix& design, const Eigen::Ref<const Eigen::VectorXd>& residual,
                     const Eigen::Ref<const Eigen::VectorXd>& theta, std::span<const double> weights,
                     double lambda);

}  // namespace detail
}  // namespace tlasso
