#include "hsvm/structured_svm.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "hsvm/error.hpp"

namespace hsvm {

Eigen::MatrixXd effect_scores(const Eigen::MatrixXd& design, const Eigen::VectorXd& coefficients,
                              const std::vector<ColumnRange>& effect_columns) {
  if (design.cols() != coefficients.size()) {
    throw DimensionMismatch("design has " + std::to_string(design.cols()) + " columns but " +
                            std::to_string(coefficients.size()) + " coefficients");
  }
  Eigen::MatrixXd scores(design.rows(), static_cast<Eigen::Index>(effect_columns.size()));
  for (std::size_t e = 0; e < effect_columns.size(); ++e) {
    const auto begin = static_cast<Eigen::Index>(effect_columns[e].begin);
    const auto count = static_cast<Eigen::Index>(effect_columns[e].count);
    if (begin + count > design.cols()) throw DimensionMismatch("effect column range out of bounds");
    scores.col(static_cast<Eigen::Index>(e)) =
        design.middleCols(begin, count) * coefficients.segment(begin, count);
  }
  return scores;
}

namespace {

void check_penalty(const Penalty& penalty) {
  const bool ok = penalty.form == Penalty::Form::lagrangian
                      ? (penalty.value >= 0.0 && std::isfinite(penalty.value))
                      : penalty.value >= 0.0;
  if (!ok) throw ConfigError("invalid tuning value " + std::to_string(penalty.value));
}

}  // namespace

StructuredLp compile_structured_lp(const Eigen::MatrixXd& scores, const Eigen::VectorXd& labels,
                                   const HeredityGraph& graph, const Penalty& penalty) {
  check_penalty(penalty);
  const auto n = scores.rows();
  const std::size_t effects = static_cast<std::size_t>(scores.cols());
  if (labels.size() != n) throw DimensionMismatch("score rows and labels differ");
  if (graph.size() != effects) {
    throw DimensionMismatch("heredity graph has " + std::to_string(graph.size()) + " effects, scores have " +
                            std::to_string(effects));
  }
  if (!scores.allFinite()) throw DataError("non-finite effect score");

  StructuredLp out;
  out.num_effects = effects;
  out.num_samples = static_cast<std::size_t>(n);
  std::vector<Eigen::Index> slot(effects, -1);
  for (std::size_t e = 0; e < effects; ++e) {
    if (scores.col(static_cast<Eigen::Index>(e)).cwiseAbs().maxCoeff() > 0.0) {
      slot[e] = static_cast<Eigen::Index>(out.theta_effects.size());
      out.theta_effects.push_back(e);
    }
  }
  if (out.theta_effects.empty()) {
    throw EmptyInitial("initial estimator is zero on every effect; scaling cannot revive any of them");
  }

  const auto k = static_cast<Eigen::Index>(out.theta_effects.size());
  const Eigen::Index b0 = k + n;
  const Eigen::Index vars = b0 + 2;
  LinearProgram& lp = out.lp;
  lp = LinearProgram(static_cast<std::size_t>(vars));
  lp.nonneg[static_cast<std::size_t>(b0)] = true;
  lp.nonneg[static_cast<std::size_t>(b0 + 1)] = true;
  if (penalty.form == Penalty::Form::lagrangian) lp.objective.head(k).setConstant(penalty.value);
  lp.objective.segment(k, n).setOnes();

  for (Eigen::Index i = 0; i < n; ++i) {
    const double yi = labels[i];
    Eigen::VectorXd row = Eigen::VectorXd::Zero(vars);
    for (Eigen::Index s = 0; s < k; ++s) {
      row[s] = yi * scores(i, static_cast<Eigen::Index>(out.theta_effects[static_cast<std::size_t>(s)]));
    }
    row[k + i] = 1.0;
    row[b0] = yi;
    row[b0 + 1] = -yi;
    lp.add_constraint(std::move(row), Relation::greater_equal, 1.0);
  }

  const std::size_t before = lp.num_constraints();
  if (graph.policy != HeredityPolicy::none) {
    for (std::size_t j = 0; j < effects; ++j) {
      const auto& parents = graph.parents[j];
      if (slot[j] < 0 || parents.empty()) continue;
      if (graph.policy == HeredityPolicy::strong) {
        for (std::size_t r : parents) {
          Eigen::VectorXd row = Eigen::VectorXd::Zero(vars);
          row[slot[j]] = 1.0;
          if (slot[r] >= 0) row[slot[r]] -= 1.0;
          lp.add_constraint(std::move(row), Relation::less_equal, 0.0);
        }
      } else {
        Eigen::VectorXd row = Eigen::VectorXd::Zero(vars);
        row[slot[j]] = 1.0;
        for (std::size_t r : parents) {
          if (slot[r] >= 0) row[slot[r]] -= 1.0;
        }
        lp.add_constraint(std::move(row), Relation::less_equal, 0.0);
      }
    }
  }
  out.num_heredity_rows = lp.num_constraints() - before;

  if (penalty.form == Penalty::Form::budget && std::isfinite(penalty.value)) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(vars);
    row.head(k).setOnes();
    lp.add_constraint(std::move(row), Relation::less_equal, penalty.value);
  }
  return out;
}

namespace {

StructuredFitResult solve_scores(const Eigen::MatrixXd& scores, const Eigen::VectorXd& labels,
                                 const HeredityGraph& graph, const Penalty& penalty,
                                 const SolverOptions& options) {
  const StructuredLp program = compile_structured_lp(scores, labels, graph, penalty);
  const LpSolution sol = solve_lp(program.lp, options);
  if (sol.status != LpStatus::optimal) {
    throw SolverError(std::string("structured SVM program is ") + to_string(sol.status));
  }
  StructuredFitResult fit;
  fit.theta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(program.num_effects));
  for (std::size_t s = 0; s < program.theta_effects.size(); ++s) {
    fit.theta[static_cast<Eigen::Index>(program.theta_effects[s])] =
        std::max(0.0, sol.values[static_cast<Eigen::Index>(s)]);
  }
  const auto b0 = static_cast<Eigen::Index>(program.intercept_offset());
  fit.intercept = sol.values[b0] - sol.values[b0 + 1];
  for (std::size_t e = 0; e < program.num_effects; ++e) {
    if (fit.theta[static_cast<Eigen::Index>(e)] > kActiveTol) fit.active_effects.push_back(e);
  }
  Eigen::VectorXd decision = scores * fit.theta;
  decision.array() += fit.intercept;
  fit.hinge = hinge_loss(decision, labels);
  fit.objective = fit.hinge;
  if (penalty.form == Penalty::Form::lagrangian) fit.objective += penalty.value * fit.theta.sum();
  fit.pivots = sol.pivots;
  return fit;
}

}  // namespace

StructuredLp compile_structured_lp(const Dataset& data, const StructuredFitSpec& spec) {
  validate_dataset(data);
  const Eigen::MatrixXd scores = effect_scores(data.x, spec.initial.coefficients, spec.effect_columns);
  return compile_structured_lp(scores, data.y, spec.graph, spec.penalty);
}

StructuredFitResult fit_structured(const Dataset& data, const StructuredFitSpec& spec,
                                   const SolverOptions& options) {
  validate_dataset(data);
  const Eigen::MatrixXd scores = effect_scores(data.x, spec.initial.coefficients, spec.effect_columns);
  StructuredFitResult fit = solve_scores(scores, data.y, spec.graph, spec.penalty, options);
  fit.effective_coefficients = Eigen::VectorXd::Zero(spec.initial.coefficients.size());
  for (std::size_t e = 0; e < spec.effect_columns.size(); ++e) {
    const auto begin = static_cast<Eigen::Index>(spec.effect_columns[e].begin);
    const auto count = static_cast<Eigen::Index>(spec.effect_columns[e].count);
    fit.effective_coefficients.segment(begin, count) =
        spec.initial.coefficients.segment(begin, count) * fit.theta[static_cast<Eigen::Index>(e)];
  }
  return fit;
}

StructuredFitResult fit_nonparametric_structured(const Eigen::MatrixXd& effect_scores,
                                                 const Eigen::VectorXd& labels, const HeredityGraph& graph,
                                                 const Penalty& penalty, const SolverOptions& options) {
  validate_dataset(Dataset{effect_scores, labels});
  StructuredFitResult fit = solve_scores(effect_scores, labels, graph, penalty, options);
  fit.effective_coefficients = fit.theta;
  return fit;
}

double structured_lambda_max(const Eigen::MatrixXd& scores) {
  if (scores.cols() == 0) return 0.0;
  return scores.cwiseAbs().colwise().sum().maxCoeff();
}

namespace {

Eigen::VectorXd affine(double intercept, const Eigen::VectorXd& coefficients, const Eigen::MatrixXd& design) {
  if (design.cols() != coefficients.size()) {
    throw DimensionMismatch("model expects " + std::to_string(coefficients.size()) + " columns, got " +
                            std::to_string(design.cols()));
  }
  Eigen::VectorXd d = design * coefficients;
  d.array() += intercept;
  return d;
}

}  // namespace

Eigen::VectorXd decision_values(const L2FitResult& fit, const Eigen::MatrixXd& design) {
  return affine(fit.intercept, fit.coefficients, design);
}

Eigen::VectorXd decision_values(const L1FitResult& fit, const Eigen::MatrixXd& design) {
  return affine(fit.intercept, fit.coefficients, design);
}

Eigen::VectorXd decision_values(const StructuredFitResult& fit, const Eigen::MatrixXd& design) {
  return affine(fit.intercept, fit.effective_coefficients, design);
}

}  // namespace hsvm
