#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "hsvm/dataset.hpp"

namespace hsvm {

struct L2FitResult {
  double intercept = 0.0;
  Eigen::VectorXd coefficients;
  double lambda = 0.0;
  /// sum_i [1 - y_i(x_i.beta + beta_0)]_+ + lambda ||beta||^2 at the returned point.
  double objective = 0.0;
  /// Dual objective of the accepted multipliers; objective - dual bounds the
  /// suboptimality.
  double dual_objective = 0.0;
};

struct L2Options {
  /// Stopping threshold on the maximal KKT violation of the dual solver.
  double kkt_tol = 1e-9;
  /// Target for (objective - dual_objective) / max(1, objective).
  double relative_gap = 1e-9;
  std::size_t max_iterations = 20'000'000;
};

double l2_objective(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& beta,
                    double intercept, double lambda);

/// Penalised hinge loss with ridge penalty on the coefficients only. The
/// dual box-QP is solved by sequential minimal optimisation followed by an
/// exact active-set solve on the free multipliers; the intercept is then the
/// exact minimiser of the hinge given the coefficients.
/// Throws DataError / SingleClassData for unusable data.
L2FitResult fit_l2_svm(const Dataset& data, double lambda, const L2Options& options = {});

/// Same problem via the thin SVD design = R V^T: the fit runs on the n columns
/// of R and the coefficients are mapped back as V gamma. Singular values below
/// 1e-10 of the largest are dropped.
L2FitResult fit_l2_svm_svd_reduced(const Eigen::MatrixXd& design, const Eigen::VectorXd& labels,
                                   double lambda, const L2Options& options = {});

/// Log-spaced grid of `count` values from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, std::size_t count);

/// The initial-estimator grid: 20 values over [1e-4, 1e4] * n / p.
std::vector<double> default_l2_grid(std::size_t n, std::size_t p, std::size_t count = 20);

struct L2Selection {
  double lambda = 0.0;
  double cv_error = 0.0;
  L2FitResult fit;  ///< refit on all of `data` at the selected lambda
};

/// k-fold CV (stratified) over `grid`, then a refit on the full data.
/// Uses the SVD route when p > n.
L2Selection select_l2_by_cv(const Dataset& data, const std::vector<double>& grid, int folds,
                            std::uint64_t seed);

}  // namespace hsvm
