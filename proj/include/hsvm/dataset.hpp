#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace hsvm {

/// Labeled samples. Rows of `x` are samples; labels are +1 / -1.
struct Dataset {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;

  std::size_t size() const { return static_cast<std::size_t>(x.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(x.cols()); }

  Dataset subset(const std::vector<std::size_t>& rows) const;
};

/// Throws DataError on non-finite features, labels outside {+1, -1} or a
/// row-count mismatch; SingleClassData if only one label occurs.
void validate_dataset(const Dataset& data);

/// Counts (positives, negatives).
std::pair<std::size_t, std::size_t> class_counts(const Eigen::VectorXd& labels);

/// Sum of [1 - y_i f_i]_+ for decision values f.
double hinge_loss(const Eigen::VectorXd& decision, const Eigen::VectorXd& labels);

/// Exact minimiser over b of sum_i [1 - y_i (f_i + b)]_+. The minimiser set is
/// an interval; its midpoint is returned, or its finite end when the interval
/// is a half-line.
double best_intercept(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels);

}  // namespace hsvm
