#include "hsvm/evaluation.hpp"

#include <string>

#include "hsvm/error.hpp"
#include "hsvm/rng.hpp"

namespace hsvm {

Eigen::VectorXd sign_labels(const Eigen::VectorXd& decision) {
  return decision.unaryExpr([](double f) { return f >= 0.0 ? 1.0 : -1.0; });
}

double generalization_error(const Eigen::VectorXd& decision, const Eigen::VectorXd& labels) {
  if (decision.size() != labels.size()) {
    throw DimensionMismatch("decision values and labels differ in length");
  }
  if (labels.size() == 0) throw DataError("empty test set");
  std::size_t wrong = 0;
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    const double predicted = decision[i] >= 0.0 ? 1.0 : -1.0;
    if (predicted != labels[i]) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(labels.size());
}

namespace {

void shuffle(std::vector<std::size_t>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(v[i - 1], v[j]);
  }
}

std::vector<std::vector<std::size_t>> deal(const Eigen::VectorXd& labels, int k, std::uint64_t seed) {
  Rng rng = make_stream(seed, 0x63760000u);
  std::vector<std::size_t> pos;
  std::vector<std::size_t> neg;
  for (Eigen::Index i = 0; i < labels.size(); ++i) (labels[i] > 0 ? pos : neg).push_back(static_cast<std::size_t>(i));
  shuffle(pos, rng);
  shuffle(neg, rng);
  std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
  std::size_t next = 0;
  for (const auto* group : {&pos, &neg}) {
    for (std::size_t idx : *group) folds[next++ % folds.size()].push_back(idx);
  }
  return folds;
}

bool training_splits_ok(const std::vector<std::vector<std::size_t>>& folds, const Eigen::VectorXd& labels) {
  const auto [pos, neg] = class_counts(labels);
  for (const auto& fold : folds) {
    std::size_t fold_pos = 0;
    for (std::size_t i : fold) {
      if (labels[static_cast<Eigen::Index>(i)] > 0) ++fold_pos;
    }
    if (pos - fold_pos == 0 || neg - (fold.size() - fold_pos) == 0) return false;
  }
  return true;
}

}  // namespace

std::vector<std::vector<std::size_t>> stratified_folds(const Eigen::VectorXd& labels, int k,
                                                       std::uint64_t seed) {
  if (k < 2 || static_cast<Eigen::Index>(k) > labels.size()) {
    throw ConfigError("cv: fold count " + std::to_string(k) + " must lie in [2, n]");
  }
  auto folds = deal(labels, k, seed);
  if (training_splits_ok(folds, labels)) return folds;
  log_warning("cv: a training split lacks one class; redrawing folds");
  folds = deal(labels, k, seed + 1);
  if (training_splits_ok(folds, labels)) return folds;
  throw DataError("cv: cannot form " + std::to_string(k) + " folds with both classes in every training split");
}

CvResult kfold_cv(const Dataset& data, const GridFitter& method, const std::vector<double>& grid,
                  int k, std::uint64_t seed) {
  if (grid.empty()) throw ConfigError("cv: empty tuning grid");
  CvResult result;
  result.folds = stratified_folds(data.y, k, seed);
  result.mean_errors.assign(grid.size(), 0.0);
  const std::size_t n = data.size();
  for (const auto& fold : result.folds) {
    std::vector<bool> in_test(n, false);
    for (std::size_t i : fold) in_test[i] = true;
    std::vector<std::size_t> train_rows;
    for (std::size_t i = 0; i < n; ++i) {
      if (!in_test[i]) train_rows.push_back(i);
    }
    const Dataset train = data.subset(train_rows);
    const Dataset test = data.subset(fold);
    const Eigen::MatrixXd decisions = method(train, test.x, grid);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      result.mean_errors[g] += generalization_error(decisions.col(static_cast<Eigen::Index>(g)), test.y);
    }
  }
  for (double& e : result.mean_errors) e /= static_cast<double>(result.folds.size());
  std::size_t best = 0;
  for (std::size_t g = 1; g < grid.size(); ++g) {
    if (result.mean_errors[g] < result.mean_errors[best]) best = g;
  }
  result.best_error = result.mean_errors[best];
  result.best_tuning = grid[best];
  return result;
}

double heredity_frequency(const std::vector<std::vector<bool>>& active_sets, const HeredityGraph& graph,
                          HeredityPolicy policy) {
  if (active_sets.empty()) return 0.0;
  std::size_t compliant = 0;
  for (const auto& active : active_sets) {
    if (obeys_heredity(graph, active, policy)) ++compliant;
  }
  return static_cast<double>(compliant) / static_cast<double>(active_sets.size());
}

}  // namespace hsvm
