#pragma once

// Brute-force reference solvers used only by the tests. Nothing here shares
// code with the library's solvers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "hsvm/heredity.hpp"
#include "hsvm/lp_solver.hpp"

namespace oracle {

/// Optimum of a bounded, feasible LP by enumerating every vertex: each choice
/// of `n` tight constraints (equalities always tight) with a nonsingular
/// system, kept if feasible.
inline std::optional<double> vertex_enumeration(const hsvm::LinearProgram& lp, double tol = 1e-9) {
  const auto n = static_cast<Eigen::Index>(lp.num_vars());
  std::vector<Eigen::VectorXd> rows;
  std::vector<double> rhs;
  std::vector<bool> must;
  for (const auto& c : lp.constraints) {
    rows.push_back(c.coefficients);
    rhs.push_back(c.rhs);
    must.push_back(c.relation == hsvm::Relation::equal);
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    if (!lp.nonneg[static_cast<std::size_t>(j)]) continue;
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e[j] = 1.0;
    rows.push_back(e);
    rhs.push_back(0.0);
    must.push_back(false);
  }
  const std::size_t total = rows.size();
  const auto feasible = [&](const Eigen::VectorXd& x) {
    for (std::size_t i = 0; i < lp.constraints.size(); ++i) {
      const auto& c = lp.constraints[i];
      const double lhs = c.coefficients.dot(x);
      const double slack = tol * (1.0 + std::abs(c.rhs) + c.coefficients.cwiseAbs().sum() * x.cwiseAbs().maxCoeff());
      if (c.relation == hsvm::Relation::less_equal && lhs > c.rhs + slack) return false;
      if (c.relation == hsvm::Relation::greater_equal && lhs < c.rhs - slack) return false;
      if (c.relation == hsvm::Relation::equal && std::abs(lhs - c.rhs) > slack) return false;
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      if (lp.nonneg[static_cast<std::size_t>(j)] && x[j] < -tol) return false;
    }
    return true;
  };

  std::optional<double> best;
  std::vector<std::size_t> pick;
  const std::function<void(std::size_t)> recurse = [&](std::size_t start) {
    if (static_cast<Eigen::Index>(pick.size()) == n) {
      for (std::size_t i = 0; i < total; ++i) {
        if (must[i] && std::find(pick.begin(), pick.end(), i) == pick.end()) return;
      }
      Eigen::MatrixXd a(n, n);
      Eigen::VectorXd b(n);
      for (Eigen::Index k = 0; k < n; ++k) {
        a.row(k) = rows[pick[static_cast<std::size_t>(k)]].transpose();
        b[k] = rhs[pick[static_cast<std::size_t>(k)]];
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
      if (lu.rank() < n) return;
      const Eigen::VectorXd x = lu.solve(b);
      if (!feasible(x)) return;
      const double value = lp.objective.dot(x);
      if (!best || value < *best) best = value;
      return;
    }
    for (std::size_t i = start; i < total; ++i) {
      pick.push_back(i);
      recurse(i + 1);
      pick.pop_back();
    }
  };
  recurse(0);
  return best;
}

/// Random bounded LP that is feasible by construction: every variable is
/// boxed (free ones through two explicit rows, nonnegative ones through a
/// sum row), and the remaining rows are built around a known interior or
/// boundary point. `degenerate` makes several rows tight at that point.
inline hsvm::LinearProgram random_bounded_lp(std::mt19937_64& rng, bool degenerate) {
  std::uniform_int_distribution<int> nvars(2, 6);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int n = nvars(rng);
  hsvm::LinearProgram lp(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) lp.objective[j] = normal(rng);
  int free_count = std::uniform_int_distribution<int>(0, std::min(2, n - 1))(rng);
  Eigen::VectorXd x0(n);
  for (int j = 0; j < n; ++j) {
    lp.nonneg[static_cast<std::size_t>(j)] = j >= free_count;
    x0[j] = j < free_count ? 2.0 * unif(rng) - 1.0 : unif(rng);
  }
  for (int j = 0; j < free_count; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e[j] = 1.0;
    lp.add_constraint(e, hsvm::Relation::less_equal, 3.0);
    lp.add_constraint(e, hsvm::Relation::greater_equal, -3.0);
  }
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(n);
  sum.tail(n - free_count).setOnes();
  lp.add_constraint(sum, hsvm::Relation::less_equal, static_cast<double>(n));

  const int room = 10 - static_cast<int>(lp.num_constraints());
  const int extra = std::uniform_int_distribution<int>(0, room)(rng);
  const bool with_equality = extra > 0 && unif(rng) < 0.3;
  for (int r = 0; r < extra; ++r) {
    Eigen::VectorXd a(n);
    for (int j = 0; j < n; ++j) a[j] = std::round(4.0 * normal(rng)) / 2.0;
    const double at = a.dot(x0);
    const double slack = degenerate && unif(rng) < 0.6 ? 0.0 : unif(rng);
    if (with_equality && r == 0) {
      lp.add_constraint(a, hsvm::Relation::equal, at);
    } else if (unif(rng) < 0.5) {
      lp.add_constraint(a, hsvm::Relation::less_equal, at + slack);
    } else {
      lp.add_constraint(a, hsvm::Relation::greater_equal, at - slack);
    }
  }
  return lp;
}

/// min over b of sum_i [1 - y_i (f_i + b)]_+, by evaluating every kink.
inline double hinge_min_over_intercept(const Eigen::VectorXd& f, const Eigen::VectorXd& y) {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < f.size(); ++k) {
    const double b = y[k] - f[k];
    double h = 0.0;
    for (Eigen::Index i = 0; i < f.size(); ++i) h += std::max(0.0, 1.0 - y[i] * (f[i] + b));
    best = std::min(best, h);
  }
  return best;
}

/// Feasibility of theta under explicit heredity inequalities, written out
/// independently of the library's constraint compiler.
inline bool theta_feasible(const hsvm::HeredityGraph& g, const std::vector<double>& theta,
                           std::optional<double> budget) {
  double total = 0.0;
  for (std::size_t j = 0; j < theta.size(); ++j) {
    total += theta[j];
    const auto& parents = g.parents[j];
    if (parents.empty() || g.policy == hsvm::HeredityPolicy::none) continue;
    if (g.policy == hsvm::HeredityPolicy::strong) {
      for (std::size_t r : parents) {
        if (theta[j] > theta[r] + 1e-12) return false;
      }
    } else {
      double s = 0.0;
      for (std::size_t r : parents) s += theta[r];
      if (theta[j] > s + 1e-12) return false;
    }
  }
  return !budget || total <= *budget + 1e-12;
}

/// Minimum of sum_i [1 - y_i (s_i . theta + b)]_+ + lambda sum(theta) over
/// theta >= 0 under heredity (and an optional budget), by nested grid search
/// with shrinking windows around the best few points of each level.
inline double structured_grid(const Eigen::MatrixXd& scores, const Eigen::VectorXd& y, const hsvm::HeredityGraph& g,
                              double lambda, std::optional<double> budget, double upper) {
  const auto k = static_cast<std::size_t>(scores.cols());
  const auto value = [&](const std::vector<double>& theta) {
    Eigen::VectorXd t(static_cast<Eigen::Index>(k));
    for (std::size_t e = 0; e < k; ++e) t[static_cast<Eigen::Index>(e)] = theta[e];
    return hinge_min_over_intercept(scores * t, y) + lambda * t.sum();
  };
  constexpr int points = 17;
  constexpr int keep = 4;
  struct Cand {
    double v;
    std::vector<double> theta;
  };
  std::vector<std::vector<double>> centres{std::vector<double>(k, upper / 2)};
  double half = upper / 2;
  double best = std::numeric_limits<double>::infinity();
  while (half > 1e-6 * std::max(1.0, upper)) {
    std::vector<Cand> cands;
    for (const auto& c : centres) {
      std::vector<int> idx(k, 0);
      while (true) {
        std::vector<double> theta(k);
        for (std::size_t e = 0; e < k; ++e) {
          theta[e] = std::clamp(c[e] - half + 2 * half * idx[e] / (points - 1), 0.0, upper);
        }
        if (theta_feasible(g, theta, budget)) cands.push_back({value(theta), theta});
        std::size_t e = 0;
        while (e < k && ++idx[e] == points) idx[e++] = 0;
        if (e == k) break;
      }
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.v < b.v; });
    centres.clear();
    for (std::size_t i = 0; i < cands.size() && static_cast<int>(centres.size()) < keep; ++i) {
      centres.push_back(cands[i].theta);
    }
    if (!cands.empty()) best = std::min(best, cands.front().v);
    half *= 3.0 / (points - 1);
  }
  return best;
}

/// Second, independent selection-level heredity predicate.
inline bool obeys(const hsvm::HeredityGraph& g, const std::vector<bool>& active, hsvm::HeredityPolicy policy) {
  for (std::size_t j = 0; j < active.size(); ++j) {
    if (!active[j] || g.parents[j].empty()) continue;
    std::size_t on = 0;
    for (std::size_t r : g.parents[j]) on += active[r] ? 1 : 0;
    if (policy == hsvm::HeredityPolicy::strong && on != g.parents[j].size()) return false;
    if (policy == hsvm::HeredityPolicy::weak && on == 0) return false;
  }
  return true;
}

}  // namespace oracle
