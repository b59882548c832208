#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hsvm/dataset.hpp"
#include "hsvm/feature_expand.hpp"
#include "hsvm/heredity.hpp"
#include "hsvm/lp_solver.hpp"
#include "hsvm/svm_initial.hpp"
#include "hsvm/svm_l1.hpp"

namespace hsvm {

/// Sparsity control on the scaling parameters: either lambda * sum(theta) in
/// the objective, or the budget row sum(theta) <= M.
struct Penalty {
  enum class Form { lagrangian, budget };

  Form form = Form::lagrangian;
  double value = 0.0;

  static Penalty lagrangian(double lambda) { return {Form::lagrangian, lambda}; }
  static Penalty budget(double m) { return {Form::budget, m}; }
};

struct StructuredFitSpec {
  L2FitResult initial;
  HeredityGraph graph;  ///< policy strong / weak / none selects the constraint set
  std::vector<ColumnRange> effect_columns;
  Penalty penalty;
};

struct StructuredFitResult {
  double intercept = 0.0;
  /// One scaling parameter per effect, >= 0.
  Eigen::VectorXd theta;
  /// Per design column: initial coefficient times its effect's theta. For a
  /// fit on score columns this is theta itself.
  Eigen::VectorXd effective_coefficients;
  std::vector<std::size_t> active_effects;
  double hinge = 0.0;
  double objective = 0.0;
  std::size_t pivots = 0;
};

/// Program over [theta (kept effects), xi (n), beta_0+, beta_0-].
struct StructuredLp {
  LinearProgram lp;
  std::vector<std::size_t> theta_effects;  ///< LP theta slot -> effect id
  std::size_t num_effects = 0;
  std::size_t num_samples = 0;
  std::size_t num_heredity_rows = 0;

  std::size_t slack_offset() const { return theta_effects.size(); }
  std::size_t intercept_offset() const { return theta_effects.size() + num_samples; }
};

/// s_ie = sum over the effect's columns c of x_ic * beta_c.
Eigen::MatrixXd effect_scores(const Eigen::MatrixXd& design, const Eigen::VectorXd& coefficients,
                              const std::vector<ColumnRange>& effect_columns);

/// Effects whose score column is identically zero are fixed at theta = 0 and
/// left out of the program; heredity rows drop their terms. Throws
/// EmptyInitial when nothing is left.
StructuredLp compile_structured_lp(const Eigen::MatrixXd& scores, const Eigen::VectorXd& labels,
                                   const HeredityGraph& graph, const Penalty& penalty);
StructuredLp compile_structured_lp(const Dataset& data, const StructuredFitSpec& spec);

/// Garrote / SHSVM / WHSVM on a design with a fitted initial estimator.
StructuredFitResult fit_structured(const Dataset& data, const StructuredFitSpec& spec,
                                   const SolverOptions& options = {});

/// Same machinery with one precomputed score column per effect (the fitted
/// effect functions). The intercept is kept free.
StructuredFitResult fit_nonparametric_structured(const Eigen::MatrixXd& effect_scores,
                                                 const Eigen::VectorXd& labels, const HeredityGraph& graph,
                                                 const Penalty& penalty, const SolverOptions& options = {});

/// Smallest lambda at which theta = 0 is guaranteed optimal: max_e sum_i |s_ie|.
double structured_lambda_max(const Eigen::MatrixXd& scores);

Eigen::VectorXd decision_values(const L2FitResult& fit, const Eigen::MatrixXd& design);
Eigen::VectorXd decision_values(const L1FitResult& fit, const Eigen::MatrixXd& design);
Eigen::VectorXd decision_values(const StructuredFitResult& fit, const Eigen::MatrixXd& design);

/// Labels in {+1, -1}; a zero decision value maps to +1.
template <typename Fit>
Eigen::VectorXd predict(const Fit& fit, const Eigen::MatrixXd& design) {
  Eigen::VectorXd d = decision_values(fit, design);
  return d.unaryExpr([](double f) { return f >= 0.0 ? 1.0 : -1.0; });
}

}  // namespace hsvm
