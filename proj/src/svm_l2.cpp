#include "hsvm/svm_initial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hsvm/error.hpp"
#include "hsvm/evaluation.hpp"

namespace hsvm {

double l2_objective(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& beta,
                    double intercept, double lambda) {
  Eigen::VectorXd f = x * beta;
  f.array() += intercept;
  return hinge_loss(f, y) + lambda * beta.squaredNorm();
}

namespace {

// Dual of the scaled problem  min 1/2 |w|^2 + C sum xi :
//   min 1/2 a'Qa - e'a,  0 <= a <= C,  y'a = 0,  Q = (y y') .* K.
class DualSolver {
 public:
  DualSolver(const Eigen::MatrixXd& gram, const Eigen::VectorXd& y, double c)
      : y_(y), c_(c), n_(y.size()) {
    q_ = gram.array() * (y * y.transpose()).array();
    diag_ = gram.diagonal();
    alpha_ = Eigen::VectorXd::Zero(n_);
    grad_ = -Eigen::VectorXd::Ones(n_);
  }

  const Eigen::VectorXd& alpha() const { return alpha_; }

  double dual_value() const { return alpha_.sum() - 0.5 * alpha_.dot(q_ * alpha_); }

  // Maximal violating pair gap m(a) - M(a).
  double violation() const {
    double up = -std::numeric_limits<double>::infinity();
    double low = std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < n_; ++t) {
      const double v = -y_[t] * grad_[t];
      if (in_up(t)) up = std::max(up, v);
      if (in_low(t)) low = std::min(low, v);
    }
    if (!std::isfinite(up) || !std::isfinite(low)) return 0.0;
    return up - low;
  }

  // Second-order working-set selection (as in LIBSVM) until the violation
  // drops below tol.
  bool smo(double tol, std::size_t max_iterations) {
    constexpr double tau = 1e-12;
    for (std::size_t iter = 0; iter < max_iterations; ++iter) {
      Eigen::Index i = -1;
      double gmax = -std::numeric_limits<double>::infinity();
      for (Eigen::Index t = 0; t < n_; ++t) {
        if (in_up(t) && -y_[t] * grad_[t] >= gmax) {
          gmax = -y_[t] * grad_[t];
          i = t;
        }
      }
      Eigen::Index j = -1;
      double gmin = std::numeric_limits<double>::infinity();
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index t = 0; t < n_; ++t) {
        if (!in_low(t)) continue;
        const double v = -y_[t] * grad_[t];
        gmin = std::min(gmin, v);
        if (i < 0) continue;
        const double b = gmax - v;
        if (b > 0.0) {
          double a = diag_[i] + diag_[t] - 2.0 * y_[i] * y_[t] * q_(i, t);
          if (a <= 0.0) a = tau;
          if (-(b * b) / a < best) {
            best = -(b * b) / a;
            j = t;
          }
        }
      }
      if (i < 0 || j < 0 || gmax - gmin < tol) return true;
      update_pair(i, j);
    }
    return false;
  }

  // With the bound sets fixed, the KKT conditions on the free multipliers
  // are linear. Solving them exactly removes the SMO tail.
  bool polish(double tol) {
    const double edge = 1e-8 * c_;
    std::vector<Eigen::Index> free;
    Eigen::VectorXd trial = alpha_;
    for (Eigen::Index t = 0; t < n_; ++t) {
      if (trial[t] <= edge) {
        trial[t] = 0.0;
      } else if (trial[t] >= c_ - edge) {
        trial[t] = c_;
      } else {
        free.push_back(t);
      }
    }
    if (free.empty()) return false;
    const auto f = static_cast<Eigen::Index>(free.size());
    Eigen::MatrixXd system = Eigen::MatrixXd::Zero(f + 1, f + 1);
    Eigen::VectorXd rhs(f + 1);
    double bound_sum = 0.0;
    for (Eigen::Index t = 0; t < n_; ++t) {
      if (trial[t] == c_) bound_sum += y_[t] * c_;
    }
    for (Eigen::Index a = 0; a < f; ++a) {
      const Eigen::Index ia = free[static_cast<std::size_t>(a)];
      for (Eigen::Index b = 0; b < f; ++b) system(a, b) = q_(ia, free[static_cast<std::size_t>(b)]);
      system(a, f) = y_[ia];
      system(f, a) = y_[ia];
      double fixed = 0.0;
      for (Eigen::Index t = 0; t < n_; ++t) {
        if (trial[t] == c_) fixed += q_(ia, t) * c_;
      }
      rhs[a] = 1.0 - fixed;
    }
    rhs[f] = -bound_sum;
    const Eigen::VectorXd sol = system.completeOrthogonalDecomposition().solve(rhs);
    if (!sol.allFinite()) return false;
    for (Eigen::Index a = 0; a < f; ++a) {
      double v = sol[a];
      if (v < -edge || v > c_ + edge) return false;
      trial[free[static_cast<std::size_t>(a)]] = std::clamp(v, 0.0, c_);
    }
    if (std::abs(y_.dot(trial)) > 1e-9 * std::max(1.0, c_)) return false;

    const Eigen::VectorXd saved_alpha = alpha_;
    const Eigen::VectorXd saved_grad = grad_;
    const double before = dual_value();
    alpha_ = trial;
    grad_ = q_ * alpha_ - Eigen::VectorXd::Ones(n_);
    if (violation() > tol || dual_value() < before - 1e-12 * std::max(1.0, std::abs(before))) {
      alpha_ = saved_alpha;
      grad_ = saved_grad;
      return false;
    }
    return true;
  }

 private:
  bool in_up(Eigen::Index t) const {
    return (y_[t] > 0 && alpha_[t] < c_) || (y_[t] < 0 && alpha_[t] > 0);
  }
  bool in_low(Eigen::Index t) const {
    return (y_[t] > 0 && alpha_[t] > 0) || (y_[t] < 0 && alpha_[t] < c_);
  }

  void update_pair(Eigen::Index i, Eigen::Index j) {
    constexpr double tau = 1e-12;
    const double old_i = alpha_[i];
    const double old_j = alpha_[j];
    const double qij = q_(i, j);
    if (y_[i] != y_[j]) {
      double quad = diag_[i] + diag_[j] + 2.0 * qij;
      if (quad <= 0.0) quad = tau;
      const double delta = (-grad_[i] - grad_[j]) / quad;
      const double diff = alpha_[i] - alpha_[j];
      alpha_[i] += delta;
      alpha_[j] += delta;
      if (diff > 0.0) {
        if (alpha_[j] < 0.0) {
          alpha_[j] = 0.0;
          alpha_[i] = diff;
        }
      } else if (alpha_[i] < 0.0) {
        alpha_[i] = 0.0;
        alpha_[j] = -diff;
      }
      if (diff > 0.0) {
        if (alpha_[i] > c_) {
          alpha_[i] = c_;
          alpha_[j] = c_ - diff;
        }
      } else if (alpha_[j] > c_) {
        alpha_[j] = c_;
        alpha_[i] = c_ + diff;
      }
    } else {
      double quad = diag_[i] + diag_[j] - 2.0 * qij;
      if (quad <= 0.0) quad = tau;
      const double delta = (grad_[i] - grad_[j]) / quad;
      const double sum = alpha_[i] + alpha_[j];
      alpha_[i] -= delta;
      alpha_[j] += delta;
      if (sum > c_) {
        if (alpha_[i] > c_) {
          alpha_[i] = c_;
          alpha_[j] = sum - c_;
        }
      } else if (alpha_[j] < 0.0) {
        alpha_[j] = 0.0;
        alpha_[i] = sum;
      }
      if (sum > c_) {
        if (alpha_[j] > c_) {
          alpha_[j] = c_;
          alpha_[i] = sum - c_;
        }
      } else if (alpha_[i] < 0.0) {
        alpha_[i] = 0.0;
        alpha_[j] = sum;
      }
    }
    const double di = alpha_[i] - old_i;
    const double dj = alpha_[j] - old_j;
    grad_ += q_.col(i) * di + q_.col(j) * dj;
  }

  Eigen::VectorXd y_;
  double c_;
  Eigen::Index n_;
  Eigen::MatrixXd q_;
  Eigen::VectorXd diag_;
  Eigen::VectorXd alpha_;
  Eigen::VectorXd grad_;
};

L2FitResult fit_features(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda,
                         const L2Options& options) {
  const double c = 1.0 / (2.0 * lambda);
  DualSolver dual(x * x.transpose(), y, c);

  L2FitResult result;
  result.lambda = lambda;
  double tol = options.kkt_tol;
  for (int round = 0; round < 4; ++round) {
    if (!dual.smo(tol, options.max_iterations)) {
      log_warning("l2 SVM dual solver reached its iteration limit (lambda = " + std::to_string(lambda) + ")");
    }
    dual.polish(tol);
    const Eigen::VectorXd ya = dual.alpha().cwiseProduct(y);
    result.coefficients = x.transpose() * ya;
    result.intercept = best_intercept(x * result.coefficients, y);
    result.objective = l2_objective(x, y, result.coefficients, result.intercept, lambda);
    result.dual_objective = 2.0 * lambda * dual.dual_value();
    const double gap = result.objective - result.dual_objective;
    if (gap <= options.relative_gap * std::max(1.0, std::abs(result.objective))) break;
    tol *= 0.01;
  }
  return result;
}

void check_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw ConfigError("l2 SVM needs a finite lambda > 0, got " + std::to_string(lambda));
  }
}

}  // namespace

L2FitResult fit_l2_svm(const Dataset& data, double lambda, const L2Options& options) {
  check_lambda(lambda);
  validate_dataset(data);
  return fit_features(data.x, data.y, lambda, options);
}

L2FitResult fit_l2_svm_svd_reduced(const Eigen::MatrixXd& design, const Eigen::VectorXd& labels,
                                   double lambda, const L2Options& options) {
  check_lambda(lambda);
  validate_dataset(Dataset{design, labels});
  Eigen::BDCSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sigma = svd.singularValues();
  Eigen::Index rank = 0;
  if (sigma.size() > 0 && sigma[0] > 0.0) {
    const double cutoff = 1e-10 * sigma[0];
    while (rank < sigma.size() && sigma[rank] > cutoff) ++rank;
  }

  L2FitResult result;
  result.lambda = lambda;
  result.coefficients = Eigen::VectorXd::Zero(design.cols());
  if (rank == 0) {
    result.intercept = best_intercept(Eigen::VectorXd::Zero(labels.size()), labels);
    result.objective = l2_objective(design, labels, result.coefficients, result.intercept, lambda);
    result.dual_objective = result.objective;
    return result;
  }
  const Eigen::MatrixXd r = svd.matrixU().leftCols(rank) * sigma.head(rank).asDiagonal();
  const L2FitResult reduced = fit_features(r, labels, lambda, options);
  result.coefficients = svd.matrixV().leftCols(rank) * reduced.coefficients;
  result.intercept = reduced.intercept;
  result.objective = l2_objective(design, labels, result.coefficients, result.intercept, lambda);
  result.dual_objective = reduced.dual_objective;
  return result;
}

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  std::vector<double> grid;
  if (count == 0) return grid;
  if (count == 1) return {lo};
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t k = 0; k < count; ++k) {
    grid.push_back(std::exp(a + (b - a) * static_cast<double>(k) / static_cast<double>(count - 1)));
  }
  return grid;
}

std::vector<double> default_l2_grid(std::size_t n, std::size_t p, std::size_t count) {
  const double scale = static_cast<double>(n) / static_cast<double>(std::max<std::size_t>(p, 1));
  return log_grid(1e-4 * scale, 1e4 * scale, count);
}

L2Selection select_l2_by_cv(const Dataset& data, const std::vector<double>& grid, int folds,
                            std::uint64_t seed) {
  if (grid.empty()) throw ConfigError("empty lambda grid for the initial estimator");
  const bool reduce = data.dim() > data.size();
  const auto fitter = [reduce](const Dataset& train, const Eigen::MatrixXd& test,
                               const std::vector<double>& lambdas) {
    Eigen::MatrixXd decisions(test.rows(), static_cast<Eigen::Index>(lambdas.size()));
    for (std::size_t k = 0; k < lambdas.size(); ++k) {
      const L2FitResult fit = reduce ? fit_l2_svm_svd_reduced(train.x, train.y, lambdas[k])
                                     : fit_l2_svm(train, lambdas[k]);
      Eigen::VectorXd f = test * fit.coefficients;
      f.array() += fit.intercept;
      decisions.col(static_cast<Eigen::Index>(k)) = f;
    }
    return decisions;
  };
  const CvResult cv = kfold_cv(data, fitter, grid, folds, seed);
  L2Selection selection;
  selection.lambda = cv.best_tuning;
  selection.cv_error = cv.best_error;
  selection.fit = reduce ? fit_l2_svm_svd_reduced(data.x, data.y, selection.lambda)
                         : fit_l2_svm(data, selection.lambda);
  return selection;
}

}  // namespace hsvm
