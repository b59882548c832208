#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "hsvm/dataset.hpp"
#include "hsvm/heredity.hpp"

namespace hsvm {

/// Labels from decision values; an exact zero maps to +1.
Eigen::VectorXd sign_labels(const Eigen::VectorXd& decision);

/// Fraction of samples whose predicted label (tie rule above) differs from y.
/// Equivalent to Pr(y f(x) < 0) with f(x) = 0 counted as a +1 prediction.
double generalization_error(const Eigen::VectorXd& decision, const Eigen::VectorXd& labels);

/// Fits on `train` once per grid value and returns test decision values, one
/// column per grid value.
using GridFitter = std::function<Eigen::MatrixXd(const Dataset& train, const Eigen::MatrixXd& test_x,
                                                 const std::vector<double>& grid)>;

struct CvResult {
  double best_error = 0.0;
  double best_tuning = 0.0;
  std::vector<double> mean_errors;  ///< per grid value, mean over folds
  std::vector<std::vector<std::size_t>> folds;
};

/// Class-stratified fold assignment. Every training split (all folds but one)
/// must contain both classes; otherwise the assignment is redrawn once with a
/// new seed, and a DataError follows if that fails too.
std::vector<std::vector<std::size_t>> stratified_folds(const Eigen::VectorXd& labels, int k,
                                                       std::uint64_t seed);

/// Smallest mean CV error over `grid`; ties go to the earliest grid value.
CvResult kfold_cv(const Dataset& data, const GridFitter& method, const std::vector<double>& grid,
                  int k, std::uint64_t seed);

/// Fraction of active sets (one per fit, as flags over effects) that obey
/// `policy` under `graph`.
double heredity_frequency(const std::vector<std::vector<bool>>& active_sets, const HeredityGraph& graph,
                          HeredityPolicy policy);

}  // namespace hsvm
