#include "hsvm/splines.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hsvm/error.hpp"
#include "hsvm/feature_expand.hpp"

namespace hsvm {

SplineBasis::SplineBasis(double lower, double upper, std::vector<double> interior_knots, int degree)
    : lower_(lower), upper_(upper), degree_(degree), interior_(std::move(interior_knots)) {
  if (degree_ < 0) throw ConfigError("spline degree must be >= 0");
  if (!std::isfinite(lower_) || !std::isfinite(upper_) || !(lower_ < upper_)) {
    throw DataError("spline range must satisfy lower < upper");
  }
  for (std::size_t k = 0; k < interior_.size(); ++k) {
    const double t = interior_[k];
    if (!(t > lower_ && t < upper_)) throw DataError("interior knot outside the open boundary range");
    if (k > 0 && !(t > interior_[k - 1])) throw DataError("interior knots must be strictly increasing");
  }
  const auto reps = static_cast<std::size_t>(degree_) + 1;
  knots_.assign(reps, lower_);
  knots_.insert(knots_.end(), interior_.begin(), interior_.end());
  knots_.insert(knots_.end(), reps, upper_);
}

void SplineBasis::evaluate(double x, std::span<double> out) const {
  const std::size_t nf = num_functions();
  if (out.size() != nf) throw DimensionMismatch("spline output span has the wrong length");
  std::fill(out.begin(), out.end(), 0.0);
  if (std::isnan(x)) throw DataError("spline input is NaN");
  x = std::clamp(x, lower_, upper_);

  const auto p = static_cast<std::size_t>(degree_);
  const std::size_t last = nf - 1;
  std::size_t span;
  if (x >= upper_) {
    span = last;
  } else {
    // knots_[span] <= x < knots_[span + 1], span in [p, last]
    const auto it = std::upper_bound(knots_.begin() + static_cast<std::ptrdiff_t>(p),
                                     knots_.begin() + static_cast<std::ptrdiff_t>(last + 1), x);
    span = static_cast<std::size_t>(it - knots_.begin()) - 1;
  }

  std::vector<double> n(p + 1, 0.0), left(p + 1, 0.0), right(p + 1, 0.0);
  n[0] = 1.0;
  for (std::size_t j = 1; j <= p; ++j) {
    left[j] = x - knots_[span + 1 - j];
    right[j] = knots_[span + j] - x;
    double saved = 0.0;
    for (std::size_t r = 0; r < j; ++r) {
      const double temp = n[r] / (right[r + 1] + left[j - r]);
      n[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    n[j] = saved;
  }
  for (std::size_t r = 0; r <= p; ++r) out[span - p + r] = n[r];
}

Eigen::VectorXd SplineBasis::evaluate(double x) const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(num_functions()));
  evaluate(x, std::span<double>(v.data(), static_cast<std::size_t>(v.size())));
  return v;
}

SplineBasis build_basis(const Eigen::VectorXd& values, std::size_t num_functions, int degree) {
  if (degree < 0) throw ConfigError("spline degree must be >= 0");
  const auto order = static_cast<std::size_t>(degree) + 1;
  if (num_functions < order) {
    throw ConfigError("spline needs at least " + std::to_string(order) + " basis functions, got " +
                      std::to_string(num_functions));
  }
  if (values.size() == 0) throw DataError("cannot place knots on an empty column");
  if (!values.allFinite()) throw DataError("non-finite value in spline column");
  std::vector<double> sorted(values.data(), values.data() + values.size());
  std::sort(sorted.begin(), sorted.end());
  const double lo = sorted.front();
  const double hi = sorted.back();
  if (!(lo < hi)) throw DataError("cannot build a spline basis on a constant column");

  const std::size_t interior = num_functions - order;
  std::vector<double> knots;
  knots.reserve(interior);
  const double last = static_cast<double>(sorted.size() - 1);
  for (std::size_t k = 1; k <= interior; ++k) {
    const double h = last * static_cast<double>(k) / static_cast<double>(interior + 1);
    const auto below = static_cast<std::size_t>(std::floor(h));
    const std::size_t above = std::min(below + 1, sorted.size() - 1);
    const double t = sorted[below] + (h - static_cast<double>(below)) * (sorted[above] - sorted[below]);
    if (!(t > lo && t < hi) || (!knots.empty() && !(t > knots.back()))) {
      throw DataError("tied values leave too few distinct quantiles for " + std::to_string(num_functions) +
                      " basis functions");
    }
    knots.push_back(t);
  }
  return SplineBasis(lo, hi, std::move(knots), degree);
}

Eigen::VectorXd evaluate_tensor(const SplineBasis& basis_r, const SplineBasis& basis_j, double z_r,
                                double z_j) {
  const Eigen::VectorXd a = basis_r.evaluate(z_r);
  const Eigen::VectorXd b = basis_j.evaluate(z_j);
  Eigen::VectorXd out(a.size() * b.size());
  for (Eigen::Index k1 = 0; k1 < a.size(); ++k1) out.segment(k1 * b.size(), b.size()) = a[k1] * b;
  return out;
}

Eigen::MatrixXd spline_effect_scores(const BasisExpansion& expansion, const Eigen::MatrixXd& design,
                                     const Eigen::VectorXd& alpha) {
  if (design.cols() != static_cast<Eigen::Index>(expansion.num_columns())) {
    throw DimensionMismatch("design does not match the basis expansion");
  }
  if (alpha.size() != design.cols()) throw DimensionMismatch("coefficient length does not match the design");
  const auto& cols = expansion.columns();
  Eigen::MatrixXd scores(design.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t e = 0; e < cols.size(); ++e) {
    const auto begin = static_cast<Eigen::Index>(cols[e].begin);
    const auto count = static_cast<Eigen::Index>(cols[e].count);
    scores.col(static_cast<Eigen::Index>(e)) = design.middleCols(begin, count) * alpha.segment(begin, count);
  }
  return scores;
}

NonparametricInitial fit_initial_nonparametric(const BasisExpansion& expansion,
                                               const Eigen::MatrixXd& design,
                                               const Eigen::VectorXd& labels, double lambda) {
  NonparametricInitial out;
  if (design.cols() > design.rows()) {
    out.fit = fit_l2_svm_svd_reduced(design, labels, lambda);
  } else {
    out.fit = fit_l2_svm(Dataset{design, labels}, lambda);
  }
  out.scores = spline_effect_scores(expansion, design, out.fit.coefficients);
  return out;
}

}  // namespace hsvm
