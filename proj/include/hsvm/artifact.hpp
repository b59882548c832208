#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "hsvm/dataset.hpp"
#include "hsvm/feature_expand.hpp"
#include "hsvm/heredity.hpp"

namespace hsvm {

inline constexpr int kArtifactVersion = 1;

/// Methods l2, l1, garrote, shsvm, whsvm (polynomial expansion, standardized)
/// and np-l2, np-garrote, np-shsvm, np-whsvm (B-spline expansion).
struct TrainOptions {
  std::string method = "shsvm";
  std::optional<double> lambda;
  std::optional<double> big_m;  ///< structured methods only
  int cv_folds = 0;             ///< > 0 selects lambda by stratified CV
  std::vector<double> grid;     ///< CV grid; empty picks the method default
  std::uint64_t seed = 1;
  std::size_t num_basis = 5;
  bool include_quadratic = true;
  int initial_cv_folds = 5;
  std::size_t initial_grid_size = 20;
};

struct ModelArtifact {
  int version = kArtifactVersion;
  std::string method;
  std::string tuning_kind;  ///< "lambda" or "M"
  double tuning = 0.0;
  std::optional<double> cv_error;
  std::uint64_t seed = 0;

  BasisExpansion expansion;
  Standardizer scaler;
  HeredityPolicy policy = HeredityPolicy::none;
  /// Structured methods: the initial estimator and the scaling parameters.
  std::optional<double> initial_intercept;
  Eigen::VectorXd initial_coefficients;
  double initial_lambda = 0.0;
  Eigen::VectorXd theta;

  double intercept = 0.0;
  /// Per design column; decision = intercept + scaler(transform(raw)) . coefficients.
  Eigen::VectorXd coefficients;
  std::vector<std::size_t> active_effects;
  double training_hinge = 0.0;
};

bool is_known_method(const std::string& method);

/// `levels` marks categorical columns (0 = continuous); `names` labels the raw
/// columns. Throws ConfigError for a bad method / tuning combination.
ModelArtifact train_model(const Dataset& raw, const std::vector<std::string>& names,
                          const std::vector<std::size_t>& levels, const TrainOptions& options);

Eigen::VectorXd decision_values(const ModelArtifact& model, const Eigen::MatrixXd& raw);
Eigen::VectorXd predict(const ModelArtifact& model, const Eigen::MatrixXd& raw);

nlohmann::json to_json(const ModelArtifact& model);
ModelArtifact artifact_from_json(const nlohmann::json& j);
void save_artifact(const ModelArtifact& model, const std::string& path);
ModelArtifact load_artifact(const std::string& path);

/// "lo:hi:count" (log spaced) or a comma list of positive values.
std::vector<double> parse_grid(const std::string& spec);

}  // namespace hsvm
