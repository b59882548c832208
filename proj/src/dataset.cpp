#include "hsvm/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <string>

#include "hsvm/error.hpp"

namespace hsvm {

void log_warning(const std::string& message) { std::cerr << "warning: " << message << '\n'; }

Dataset Dataset::subset(const std::vector<std::size_t>& rows) const {
  Dataset out;
  out.x.resize(static_cast<Eigen::Index>(rows.size()), x.cols());
  out.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.x.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(rows[i]));
    out.y[static_cast<Eigen::Index>(i)] = y[static_cast<Eigen::Index>(rows[i])];
  }
  return out;
}

std::pair<std::size_t, std::size_t> class_counts(const Eigen::VectorXd& labels) {
  std::size_t pos = 0;
  std::size_t neg = 0;
  for (Eigen::Index i = 0; i < labels.size(); ++i) (labels[i] > 0 ? pos : neg)++;
  return {pos, neg};
}

void validate_dataset(const Dataset& data) {
  if (data.x.rows() != data.y.size()) {
    throw DataError("design has " + std::to_string(data.x.rows()) + " rows but " +
                    std::to_string(data.y.size()) + " labels");
  }
  if (data.y.size() == 0) throw DataError("empty dataset");
  if (!data.x.allFinite()) throw DataError("non-finite feature value");
  for (Eigen::Index i = 0; i < data.y.size(); ++i) {
    if (data.y[i] != 1.0 && data.y[i] != -1.0) {
      throw DataError("label " + std::to_string(data.y[i]) + " at row " + std::to_string(i) +
                      " is not +1 or -1");
    }
  }
  const auto [pos, neg] = class_counts(data.y);
  if (pos == 0 || neg == 0) throw SingleClassData("labels contain a single class");
}

double hinge_loss(const Eigen::VectorXd& decision, const Eigen::VectorXd& labels) {
  return (1.0 - labels.cwiseProduct(decision).array()).max(0.0).sum();
}

double best_intercept(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels) {
  // Term i is [k_i - b]_+ for y = +1 and [b - k_i]_+ for y = -1 with
  // k_i = y_i - f_i. Left of every kink the slope is -n_pos and each kink adds
  // one, so the minimisers are [k_(n_pos), k_(n_pos + 1)] in sorted order.
  const std::size_t n = static_cast<std::size_t>(scores.size());
  if (n == 0) return 0.0;
  std::vector<double> kinks(n);
  std::size_t positives = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    kinks[i] = labels[idx] - scores[idx];
    if (labels[idx] > 0) ++positives;
  }
  std::sort(kinks.begin(), kinks.end());
  if (positives == 0) return kinks.front();
  if (positives == n) return kinks.back();
  return 0.5 * (kinks[positives - 1] + kinks[positives]);
}

}  // namespace hsvm
