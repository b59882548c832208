#include "hsvm/lp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hsvm/error.hpp"

namespace hsvm {

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::optimal:
      return "optimal";
    case LpStatus::infeasible:
      return "infeasible";
    case LpStatus::unbounded:
      return "unbounded";
  }
  return "unknown";
}

void validate_program(const LinearProgram& lp) {
  const std::size_t n = lp.num_vars();
  if (lp.nonneg.size() != n) {
    throw MalformedProgram("sign mask has " + std::to_string(lp.nonneg.size()) +
                           " entries for " + std::to_string(n) + " variables");
  }
  if (!lp.objective.allFinite()) throw MalformedProgram("non-finite objective coefficient");
  for (std::size_t i = 0; i < lp.constraints.size(); ++i) {
    const auto& row = lp.constraints[i];
    if (static_cast<std::size_t>(row.coefficients.size()) != n) {
      throw MalformedProgram("constraint " + std::to_string(i) + " has " +
                             std::to_string(row.coefficients.size()) + " coefficients, expected " +
                             std::to_string(n));
    }
    if (!row.coefficients.allFinite() || !std::isfinite(row.rhs)) {
      throw MalformedProgram("non-finite value in constraint " + std::to_string(i));
    }
  }
}

bool check_feasible(const LinearProgram& lp, const Eigen::VectorXd& values, double tol) {
  if (static_cast<std::size_t>(values.size()) != lp.num_vars()) {
    throw DimensionMismatch("check_feasible: " + std::to_string(values.size()) +
                            " values for " + std::to_string(lp.num_vars()) + " variables");
  }
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    if (lp.nonneg[j] && values[static_cast<Eigen::Index>(j)] < -tol) return false;
  }
  for (const auto& row : lp.constraints) {
    const double lhs = row.coefficients.dot(values);
    switch (row.relation) {
      case Relation::less_equal:
        if (lhs > row.rhs + tol) return false;
        break;
      case Relation::greater_equal:
        if (lhs < row.rhs - tol) return false;
        break;
      case Relation::equal:
        if (std::abs(lhs - row.rhs) > tol) return false;
        break;
    }
  }
  return true;
}

namespace {

using Eigen::Index;

// min c.x  s.t.  A x = b, x >= 0, b >= 0.
struct StandardForm {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  Eigen::VectorXd c;
  std::vector<double> row_sign;
  std::vector<Index> plus_col;
  std::vector<Index> minus_col;
  Index num_real = 0;  // structural + slack columns; artificials follow
  std::vector<Index> initial_basis;
};

StandardForm to_standard_form(const LinearProgram& lp) {
  StandardForm sf;
  const Index m = static_cast<Index>(lp.num_constraints());
  const Index n = static_cast<Index>(lp.num_vars());

  Index structural = 0;
  sf.plus_col.assign(static_cast<std::size_t>(n), -1);
  sf.minus_col.assign(static_cast<std::size_t>(n), -1);
  for (Index j = 0; j < n; ++j) {
    sf.plus_col[static_cast<std::size_t>(j)] = structural++;
    if (!lp.nonneg[static_cast<std::size_t>(j)]) sf.minus_col[static_cast<std::size_t>(j)] = structural++;
  }
  Index slacks = 0;
  for (const auto& row : lp.constraints) {
    if (row.relation != Relation::equal) ++slacks;
  }
  sf.num_real = structural + slacks;

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, sf.num_real);
  Eigen::VectorXd b(m);
  sf.c = Eigen::VectorXd::Zero(sf.num_real);
  for (Index j = 0; j < n; ++j) {
    sf.c[sf.plus_col[static_cast<std::size_t>(j)]] = lp.objective[j];
    if (sf.minus_col[static_cast<std::size_t>(j)] >= 0) {
      sf.c[sf.minus_col[static_cast<std::size_t>(j)]] = -lp.objective[j];
    }
  }
  sf.row_sign.assign(static_cast<std::size_t>(m), 1.0);
  Index slack = structural;
  for (Index i = 0; i < m; ++i) {
    const auto& row = lp.constraints[static_cast<std::size_t>(i)];
    for (Index j = 0; j < n; ++j) {
      const double v = row.coefficients[j];
      a(i, sf.plus_col[static_cast<std::size_t>(j)]) = v;
      if (sf.minus_col[static_cast<std::size_t>(j)] >= 0) a(i, sf.minus_col[static_cast<std::size_t>(j)]) = -v;
    }
    if (row.relation == Relation::less_equal) a(i, slack++) = 1.0;
    if (row.relation == Relation::greater_equal) a(i, slack++) = -1.0;
    b[i] = row.rhs;
    if (b[i] < 0.0) {
      a.row(i) *= -1.0;
      b[i] = -b[i];
      sf.row_sign[static_cast<std::size_t>(i)] = -1.0;
    }
  }

  // Crash basis: a column whose only nonzero sits in row i with a positive
  // coefficient can start basic in row i. Rows without one get an artificial.
  std::vector<Index> basis(static_cast<std::size_t>(m), -1);
  for (Index j = 0; j < sf.num_real; ++j) {
    Index row = -1;
    int nonzeros = 0;
    for (Index i = 0; i < m && nonzeros < 2; ++i) {
      if (a(i, j) != 0.0) {
        ++nonzeros;
        row = i;
      }
    }
    if (nonzeros == 1 && a(row, j) > 0.0 && basis[static_cast<std::size_t>(row)] < 0) {
      basis[static_cast<std::size_t>(row)] = j;
    }
  }
  Index artificials = 0;
  for (Index i = 0; i < m; ++i) {
    if (basis[static_cast<std::size_t>(i)] < 0) ++artificials;
  }
  sf.a = Eigen::MatrixXd::Zero(m, sf.num_real + artificials);
  sf.a.leftCols(sf.num_real) = a;
  Index next = sf.num_real;
  for (Index i = 0; i < m; ++i) {
    if (basis[static_cast<std::size_t>(i)] < 0) {
      sf.a(i, next) = 1.0;
      basis[static_cast<std::size_t>(i)] = next++;
    }
  }
  sf.c.conservativeResize(sf.a.cols());
  sf.c.tail(artificials).setZero();
  sf.b = b;
  sf.initial_basis = std::move(basis);
  return sf;
}

class RevisedSimplex {
 public:
  enum class Outcome { optimal, unbounded };

  RevisedSimplex(const StandardForm& sf, const SolverOptions& options)
      : sf_(sf),
        options_(options),
        m_(sf.a.rows()),
        cols_(sf.a.cols()),
        basis_(sf.initial_basis),
        position_(static_cast<std::size_t>(cols_), -1),
        blocked_(static_cast<std::size_t>(cols_), 0) {
    for (Index i = 0; i < m_; ++i) position_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])] = i;
    max_pivots_ = options.max_pivots > 0
                      ? options.max_pivots
                      : static_cast<std::size_t>(50 * (m_ + cols_) + 1000);
    refactor();
  }

  bool has_artificials() const { return cols_ > sf_.num_real; }

  Outcome run(const Eigen::VectorXd& costs) {
    bool bland = false;
    int degenerate_streak = 0;
    for (;;) {
      Eigen::VectorXd cost_basic(m_);
      for (Index i = 0; i < m_; ++i) cost_basic[i] = costs[basis_[static_cast<std::size_t>(i)]];
      const Eigen::VectorXd y = binv_.transpose() * cost_basic;
      const Eigen::VectorXd d = costs - sf_.a.transpose() * y;

      Index entering = -1;
      double best = -options_.optimality_tol;
      for (Index j = 0; j < cols_; ++j) {
        if (position_[static_cast<std::size_t>(j)] >= 0 || blocked_[static_cast<std::size_t>(j)]) continue;
        if (d[j] < best) {
          entering = j;
          if (bland) break;
          best = d[j];
        }
      }
      if (entering < 0) {
        if (since_refactor_ > 0) {
          refactor();
          continue;
        }
        return Outcome::optimal;
      }

      const Eigen::VectorXd alpha = binv_ * sf_.a.col(entering);
      const Index leave_row = ratio_test(alpha);
      if (leave_row < 0) return Outcome::unbounded;

      const double step = std::max(xb_[leave_row], 0.0) / alpha[leave_row];
      pivot(entering, leave_row, alpha, step);

      if (step <= 1e-12) {
        if (++degenerate_streak >= 30) bland = true;
      } else {
        degenerate_streak = 0;
        bland = false;
      }
    }
  }

  // After phase one: pivot basic artificials out wherever a real column has a
  // usable entry in their row. Rows with no such entry are redundant.
  void drive_out_artificials() {
    for (Index r = 0; r < m_; ++r) {
      if (basis_[static_cast<std::size_t>(r)] < sf_.num_real) continue;
      const Eigen::RowVectorXd row = binv_.row(r) * sf_.a.leftCols(sf_.num_real);
      Index best = -1;
      double best_abs = 1e-9;
      for (Index j = 0; j < sf_.num_real; ++j) {
        if (position_[static_cast<std::size_t>(j)] >= 0) continue;
        if (std::abs(row[j]) > best_abs) {
          best_abs = std::abs(row[j]);
          best = j;
        }
      }
      if (best < 0) continue;
      const Eigen::VectorXd alpha = binv_ * sf_.a.col(best);
      pivot(best, r, alpha, xb_[r] / alpha[r]);
    }
    for (Index j = sf_.num_real; j < cols_; ++j) blocked_[static_cast<std::size_t>(j)] = 1;
  }

  double artificial_sum() const {
    double total = 0.0;
    for (Index i = 0; i < m_; ++i) {
      if (basis_[static_cast<std::size_t>(i)] >= sf_.num_real) total += std::max(xb_[i], 0.0);
    }
    return total;
  }

  Eigen::VectorXd primal() const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(cols_);
    for (Index i = 0; i < m_; ++i) {
      double v = xb_[i];
      if (std::abs(v) < options_.feasibility_tol) v = 0.0;
      x[basis_[static_cast<std::size_t>(i)]] = v;
    }
    return x;
  }

  Eigen::VectorXd duals(const Eigen::VectorXd& costs) const {
    Eigen::VectorXd cost_basic(m_);
    for (Index i = 0; i < m_; ++i) cost_basic[i] = costs[basis_[static_cast<std::size_t>(i)]];
    return binv_.transpose() * cost_basic;
  }

  std::size_t pivots() const { return pivots_; }

 private:
  Index ratio_test(const Eigen::VectorXd& alpha) const {
    constexpr double pivot_tol = 1e-9;
    double min_ratio = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < m_; ++i) {
      if (alpha[i] > pivot_tol) min_ratio = std::min(min_ratio, std::max(xb_[i], 0.0) / alpha[i]);
    }
    if (!std::isfinite(min_ratio)) return -1;
    const double tie = 1e-12 * std::max(1.0, min_ratio);
    Index row = -1;
    for (Index i = 0; i < m_; ++i) {
      if (alpha[i] <= pivot_tol) continue;
      if (std::max(xb_[i], 0.0) / alpha[i] <= min_ratio + tie) {
        if (row < 0 || basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(row)]) row = i;
      }
    }
    return row;
  }

  void pivot(Index entering, Index row, const Eigen::VectorXd& alpha, double step) {
    if (pivots_ >= max_pivots_) {
      throw MaxPivotsExceeded("simplex exceeded " + std::to_string(max_pivots_) + " pivots");
    }
    xb_ -= step * alpha;
    xb_[row] = step;
    const Eigen::RowVectorXd pivot_row = binv_.row(row) / alpha[row];
    binv_.noalias() -= alpha * pivot_row;
    binv_.row(row) = pivot_row;

    const Index leaving = basis_[static_cast<std::size_t>(row)];
    position_[static_cast<std::size_t>(leaving)] = -1;
    if (leaving >= sf_.num_real) blocked_[static_cast<std::size_t>(leaving)] = 1;
    basis_[static_cast<std::size_t>(row)] = entering;
    position_[static_cast<std::size_t>(entering)] = row;

    ++pivots_;
    if (++since_refactor_ >= options_.refactor_interval) refactor();
  }

  void refactor() {
    Eigen::MatrixXd basis_matrix(m_, m_);
    for (Index i = 0; i < m_; ++i) basis_matrix.col(i) = sf_.a.col(basis_[static_cast<std::size_t>(i)]);
    if (m_ > 0) {
      binv_ = basis_matrix.partialPivLu().inverse();
    } else {
      binv_.resize(0, 0);
    }
    xb_ = binv_ * sf_.b;
    since_refactor_ = 0;
  }

  const StandardForm& sf_;
  const SolverOptions& options_;
  Index m_;
  Index cols_;
  std::vector<Index> basis_;
  std::vector<Index> position_;
  std::vector<char> blocked_;
  Eigen::MatrixXd binv_;
  Eigen::VectorXd xb_;
  std::size_t pivots_ = 0;
  std::size_t since_refactor_ = 0;
  std::size_t max_pivots_ = 0;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const SolverOptions& options) {
  validate_program(lp);
  const StandardForm sf = to_standard_form(lp);
  RevisedSimplex simplex(sf, options);

  LpSolution solution;
  const Index n = static_cast<Index>(lp.num_vars());
  auto extract = [&](const Eigen::VectorXd& x) {
    solution.values.resize(n);
    for (Index j = 0; j < n; ++j) {
      double v = x[sf.plus_col[static_cast<std::size_t>(j)]];
      if (sf.minus_col[static_cast<std::size_t>(j)] >= 0) v -= x[sf.minus_col[static_cast<std::size_t>(j)]];
      solution.values[j] = v;
    }
    solution.objective_value = lp.objective.dot(solution.values);
  };

  if (simplex.has_artificials()) {
    Eigen::VectorXd phase_one = Eigen::VectorXd::Zero(sf.a.cols());
    phase_one.tail(sf.a.cols() - sf.num_real).setOnes();
    simplex.run(phase_one);
    const double scale = 1.0 + (sf.b.size() > 0 ? sf.b.cwiseAbs().maxCoeff() : 0.0);
    if (simplex.artificial_sum() > options.feasibility_tol * scale) {
      solution.status = LpStatus::infeasible;
      extract(simplex.primal());
      solution.pivots = simplex.pivots();
      return solution;
    }
    simplex.drive_out_artificials();
  }

  const auto outcome = simplex.run(sf.c);
  const Eigen::VectorXd x = simplex.primal();
  extract(x);
  solution.pivots = simplex.pivots();
  if (outcome == RevisedSimplex::Outcome::unbounded) {
    solution.status = LpStatus::unbounded;
    return solution;
  }
  solution.status = LpStatus::optimal;

  const Eigen::VectorXd y = simplex.duals(sf.c);
  const Eigen::VectorXd d = sf.c - sf.a.transpose() * y;
  double dual_infeasibility = 0.0;
  double complementarity = 0.0;
  for (Index j = 0; j < sf.num_real; ++j) {
    dual_infeasibility = std::max(dual_infeasibility, -d[j]);
    complementarity = std::max(complementarity, std::abs(x[j] * d[j]));
  }
  solution.dual_infeasibility = dual_infeasibility;
  solution.complementarity = complementarity;
  solution.duality_gap_bound = std::abs(sf.c.dot(x) - sf.b.dot(y));
  solution.duals.resize(static_cast<Index>(lp.num_constraints()));
  for (Index i = 0; i < solution.duals.size(); ++i) solution.duals[i] = y[i] * sf.row_sign[static_cast<std::size_t>(i)];
  return solution;
}

}  // namespace hsvm
