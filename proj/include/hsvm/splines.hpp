#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hsvm/dataset.hpp"
#include "hsvm/svm_initial.hpp"

namespace hsvm {

/// Clamped (open-uniform end) B-spline basis on [lower, upper]. Inputs
/// outside that range are evaluated at the nearest boundary.
class SplineBasis {
 public:
  SplineBasis() = default;
  SplineBasis(double lower, double upper, std::vector<double> interior_knots, int degree = 3);

  int degree() const { return degree_; }
  std::size_t num_functions() const { return interior_.size() + static_cast<std::size_t>(degree_) + 1; }
  double lower() const { return lower_; }
  double upper() const { return upper_; }
  const std::vector<double>& interior_knots() const { return interior_; }
  /// Full knot vector with the boundary knots repeated degree + 1 times.
  const std::vector<double>& knots() const { return knots_; }

  /// Writes all num_functions() values; at most degree + 1 are nonzero.
  void evaluate(double x, std::span<double> out) const;
  Eigen::VectorXd evaluate(double x) const;

 private:
  double lower_ = 0.0;
  double upper_ = 1.0;
  int degree_ = 3;
  std::vector<double> interior_;
  std::vector<double> knots_;
};

/// Interior knots at equally spaced sample quantiles, boundary knots at the
/// sample range. Throws DataError for a constant column or when ties push a
/// quantile onto the boundary; ConfigError if num_functions < degree + 1.
SplineBasis build_basis(const Eigen::VectorXd& values, std::size_t num_functions, int degree = 3);

/// g_{k1,k2}(z_r, z_j) = b_{r,k1}(z_r) b_{j,k2}(z_j), k1-major.
Eigen::VectorXd evaluate_tensor(const SplineBasis& basis_r, const SplineBasis& basis_j, double z_r,
                                double z_j);

class BasisExpansion;

/// Ridge-hinge fit over the full spline design and the per-effect score
/// functions built from it.
struct NonparametricInitial {
  L2FitResult fit;  ///< intercept alpha_0 and all alpha blocks, in design-column order
  /// Per-sample effect scores f_e on the training design, one column per effect.
  Eigen::MatrixXd scores;
};

/// f_e(z_i) = sum over the effect's block of design(i, c) * alpha_c.
Eigen::MatrixXd spline_effect_scores(const BasisExpansion& expansion, const Eigen::MatrixXd& design,
                                     const Eigen::VectorXd& alpha);

/// `design` is the spline design produced by `expansion`. Uses the SVD-reduced
/// solver whenever the design has more columns than rows.
NonparametricInitial fit_initial_nonparametric(const BasisExpansion& expansion,
                                               const Eigen::MatrixXd& design,
                                               const Eigen::VectorXd& labels, double lambda);

}  // namespace hsvm
