#include "hsvm/svm_l1.hpp"

#include <cmath>
#include <string>

#include "hsvm/error.hpp"
#include "hsvm/evaluation.hpp"

namespace hsvm {

LinearProgram compile_l1_lp(const Dataset& data, double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw ConfigError("l1 SVM needs a finite lambda >= 0, got " + std::to_string(lambda));
  }
  const auto n = static_cast<Eigen::Index>(data.size());
  const auto p = static_cast<Eigen::Index>(data.dim());
  const Eigen::Index slack = 2 * p;
  const Eigen::Index b0 = slack + n;
  LinearProgram lp(static_cast<std::size_t>(b0 + 2));
  lp.objective.head(2 * p).setConstant(lambda);
  lp.objective.segment(slack, n).setOnes();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double yi = data.y[i];
    Eigen::VectorXd row = Eigen::VectorXd::Zero(b0 + 2);
    row.head(p) = yi * data.x.row(i).transpose();
    row.segment(p, p) = -yi * data.x.row(i).transpose();
    row[slack + i] = 1.0;
    row[b0] = yi;
    row[b0 + 1] = -yi;
    lp.add_constraint(std::move(row), Relation::greater_equal, 1.0);
  }
  return lp;
}

L1FitResult fit_l1_svm(const Dataset& data, double lambda, const SolverOptions& options) {
  validate_dataset(data);
  const LinearProgram lp = compile_l1_lp(data, lambda);
  const LpSolution sol = solve_lp(lp, options);
  if (sol.status != LpStatus::optimal) {
    throw SolverError(std::string("l1 SVM program is ") + to_string(sol.status));
  }
  const auto n = static_cast<Eigen::Index>(data.size());
  const auto p = static_cast<Eigen::Index>(data.dim());
  L1FitResult fit;
  fit.lambda = lambda;
  fit.coefficients = sol.values.head(p) - sol.values.segment(p, p);
  fit.intercept = sol.values[2 * p + n] - sol.values[2 * p + n + 1];
  for (Eigen::Index j = 0; j < p; ++j) {
    if (std::abs(fit.coefficients[j]) > kActiveTol) {
      fit.active_set.push_back(static_cast<std::size_t>(j));
    } else {
      fit.coefficients[j] = 0.0;
    }
  }
  fit.objective = sol.objective_value;
  return fit;
}

double l1_lambda_max(const Eigen::MatrixXd& x) {
  if (x.cols() == 0) return 0.0;
  return x.cwiseAbs().colwise().sum().maxCoeff();
}

std::vector<bool> effect_activity(const L1FitResult& fit, const std::vector<std::size_t>& column_owner,
                                  std::size_t num_effects) {
  if (column_owner.size() != static_cast<std::size_t>(fit.coefficients.size())) {
    throw DimensionMismatch("column map does not match the fitted coefficients");
  }
  std::vector<bool> active(num_effects, false);
  for (std::size_t c : fit.active_set) active.at(column_owner[c]) = true;
  return active;
}

double heredity_frequency(const std::vector<L1FitResult>& fits, const std::vector<std::size_t>& column_owner,
                          const HeredityGraph& graph, HeredityPolicy policy) {
  std::vector<std::vector<bool>> sets;
  sets.reserve(fits.size());
  for (const auto& fit : fits) sets.push_back(effect_activity(fit, column_owner, graph.size()));
  return heredity_frequency(sets, graph, policy);
}

}  // namespace hsvm
