#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hsvm/heredity.hpp"
#include "hsvm/splines.hpp"

namespace hsvm {

enum class EffectKind { main, interaction, quadratic, spline_main, spline_interaction };

const char* to_string(EffectKind kind);
EffectKind parse_effect_kind(const std::string& name);

struct EffectDescriptor {
  std::size_t id = 0;
  EffectKind kind = EffectKind::main;
  std::vector<std::size_t> source_vars;
  /// Set for effects built from a dummy-coded factor; the whole block shares
  /// one scaling parameter.
  std::optional<std::string> group_id;
};

struct ColumnRange {
  std::size_t begin = 0;
  std::size_t count = 0;
};

/// Maps raw explanatory variables to effect columns. Main effects come first
/// (one per raw variable, ids 0..q-1), then pairwise interactions r < j in
/// lexicographic order, then quadratics. Interaction blocks are the outer
/// product of their two parent main blocks, first parent major.
class BasisExpansion {
 public:
  BasisExpansion() = default;
  /// `levels[v]` is 0 for a continuous variable and the level count for a
  /// categorical one. `splines` is empty for parametric expansions, else one
  /// basis per raw variable.
  BasisExpansion(std::vector<std::size_t> levels, std::vector<EffectDescriptor> effects,
                 std::vector<SplineBasis> splines = {}, std::vector<std::string> names = {});

  const std::vector<EffectDescriptor>& effects() const { return effects_; }
  const std::vector<ColumnRange>& columns() const { return columns_; }
  const std::vector<std::size_t>& levels() const { return levels_; }
  const std::vector<SplineBasis>& splines() const { return splines_; }
  const std::vector<std::string>& variable_names() const { return names_; }
  std::size_t num_effects() const { return effects_.size(); }
  std::size_t num_columns() const { return num_columns_; }
  std::size_t num_raw_vars() const { return levels_.size(); }
  bool is_spline() const { return !splines_.empty(); }

  /// Raw samples (rows) to effect columns. Categorical entries must be integer
  /// level codes in [0, levels); throws DataError otherwise.
  Eigen::MatrixXd transform(const Eigen::MatrixXd& raw) const;

  /// D_j for every effect: interaction and spline-interaction effects have the
  /// two main effects of their source variables, quadratics their main effect.
  HeredityGraph heredity_graph(HeredityPolicy policy = HeredityPolicy::none) const;

  /// Column index -> effect id.
  std::vector<std::size_t> column_owner() const;

  std::string effect_name(std::size_t effect) const;

 private:
  std::size_t main_width(std::size_t var) const;

  std::vector<std::size_t> levels_;
  std::vector<EffectDescriptor> effects_;
  std::vector<SplineBasis> splines_;
  std::vector<std::string> names_;
  std::vector<ColumnRange> columns_;
  std::vector<std::size_t> main_of_var_;
  std::size_t num_columns_ = 0;
};

struct Expansion {
  BasisExpansion basis;
  HeredityGraph graph;
};

/// All q main effects, q(q-1)/2 interactions and, if requested, q quadratics.
/// Throws DataError for q = 0.
Expansion expand_polynomial(std::size_t q, bool include_quadratic = true);
Expansion expand_polynomial(const Eigen::MatrixXd& raw, bool include_quadratic = true);

/// Categorical variables (levels[v] >= 2) become reference-coded dummy groups;
/// dummy variables get no quadratic effect. Throws DataError when a factor
/// declares fewer than two levels.
Expansion expand_with_dummies(const Eigen::MatrixXd& raw, const std::vector<std::size_t>& levels,
                              bool include_quadratic = true,
                              std::vector<std::string> names = {});

/// Spline main effects for every variable and tensor-product interactions for
/// every unordered pair, with bases fitted to `raw`.
Expansion expand_splines(const Eigen::MatrixXd& raw, std::size_t num_functions, int degree = 3,
                         std::vector<std::string> names = {});

/// Column centring and scaling to unit sample standard deviation, fitted on
/// training data and reused on test data. Constant columns keep scale 1.
struct Standardizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;

  static Standardizer fit(const Eigen::MatrixXd& design);
  static Standardizer identity(std::size_t columns);
  Eigen::MatrixXd apply(const Eigen::MatrixXd& design) const;
};

}  // namespace hsvm
