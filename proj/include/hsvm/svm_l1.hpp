#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "hsvm/dataset.hpp"
#include "hsvm/heredity.hpp"
#include "hsvm/lp_solver.hpp"

namespace hsvm {

/// Coefficients at or below this magnitude count as inactive.
inline constexpr double kActiveTol = 1e-8;

struct L1FitResult {
  double intercept = 0.0;
  Eigen::VectorXd coefficients;
  double lambda = 0.0;
  std::vector<std::size_t> active_set;
  double objective = 0.0;
};

/// sum_i [1 - y_i(x_i.beta + beta_0)]_+ + lambda ||beta||_1 as an LP over
/// (beta+, beta-, xi, beta_0+, beta_0-). The result is a vertex, so inactive
/// coefficients are exactly zero.
LinearProgram compile_l1_lp(const Dataset& data, double lambda);

L1FitResult fit_l1_svm(const Dataset& data, double lambda, const SolverOptions& options = {});

/// max_j sum_i |x_ij|: at or above it every coefficient is zero.
double l1_lambda_max(const Eigen::MatrixXd& x);

/// Effect-level activity: an effect is active if any of its columns is.
std::vector<bool> effect_activity(const L1FitResult& fit, const std::vector<std::size_t>& column_owner,
                                  std::size_t num_effects);

/// Fraction of fits whose effect-level active set obeys `policy`.
double heredity_frequency(const std::vector<L1FitResult>& fits, const std::vector<std::size_t>& column_owner,
                          const HeredityGraph& graph, HeredityPolicy policy);

}  // namespace hsvm
