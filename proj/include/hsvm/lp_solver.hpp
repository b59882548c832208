#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace hsvm {

enum class Relation { less_equal, greater_equal, equal };

struct Constraint {
  Eigen::VectorXd coefficients;
  Relation relation = Relation::less_equal;
  double rhs = 0.0;
};

/// minimize objective . v  subject to the constraint rows; variables flagged in
/// `nonneg` are bounded below by zero, the rest are free.
struct LinearProgram {
  Eigen::VectorXd objective;
  std::vector<Constraint> constraints;
  std::vector<bool> nonneg;

  LinearProgram() = default;
  explicit LinearProgram(std::size_t num_vars)
      : objective(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_vars))),
        nonneg(num_vars, true) {}

  std::size_t num_vars() const { return static_cast<std::size_t>(objective.size()); }
  std::size_t num_constraints() const { return constraints.size(); }

  void add_constraint(Eigen::VectorXd coefficients, Relation relation, double rhs) {
    constraints.push_back({std::move(coefficients), relation, rhs});
  }
};

enum class LpStatus { optimal, infeasible, unbounded };

const char* to_string(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  Eigen::VectorXd values;
  double objective_value = 0.0;
  /// |primal objective - dual objective| at the returned basis.
  double duality_gap_bound = 0.0;
  /// One multiplier per constraint row (sign convention of the row as given).
  Eigen::VectorXd duals;
  /// Largest negative reduced cost, clipped at zero.
  double dual_infeasibility = 0.0;
  /// max_j |x_j d_j| over the standard-form columns.
  double complementarity = 0.0;
  std::size_t pivots = 0;
};

struct SolverOptions {
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  /// 0 selects a limit proportional to the problem size.
  std::size_t max_pivots = 0;
  std::size_t refactor_interval = 64;
};

/// Revised simplex (explicit basis inverse, product-form updates with
/// periodic refactorisation). Dantzig pricing, falling back to Bland's rule
/// through runs of degenerate pivots; ties go to the smallest index.
/// Throws MalformedProgram on invariant violations and MaxPivotsExceeded when
/// the pivot limit is hit.
LpSolution solve_lp(const LinearProgram& lp, const SolverOptions& options = {});

/// True iff every row and sign restriction holds within `tol`.
bool check_feasible(const LinearProgram& lp, const Eigen::VectorXd& values, double tol);

/// Throws MalformedProgram with a description of the first violated invariant.
void validate_program(const LinearProgram& lp);

}  // namespace hsvm
