#include "hsvm/feature_expand.hpp"

#include <cmath>

#include "hsvm/error.hpp"

namespace hsvm {

const char* to_string(EffectKind kind) {
  switch (kind) {
    case EffectKind::main:
      return "main";
    case EffectKind::interaction:
      return "interaction";
    case EffectKind::quadratic:
      return "quadratic";
    case EffectKind::spline_main:
      return "spline_main";
    case EffectKind::spline_interaction:
      return "spline_interaction";
  }
  return "main";
}

EffectKind parse_effect_kind(const std::string& name) {
  for (auto kind : {EffectKind::main, EffectKind::interaction, EffectKind::quadratic,
                    EffectKind::spline_main, EffectKind::spline_interaction}) {
    if (name == to_string(kind)) return kind;
  }
  throw DataError("unknown effect kind '" + name + "'");
}

namespace {

bool is_main(EffectKind kind) { return kind == EffectKind::main || kind == EffectKind::spline_main; }

}  // namespace

BasisExpansion::BasisExpansion(std::vector<std::size_t> levels, std::vector<EffectDescriptor> effects,
                               std::vector<SplineBasis> splines, std::vector<std::string> names)
    : levels_(std::move(levels)),
      effects_(std::move(effects)),
      splines_(std::move(splines)),
      names_(std::move(names)) {
  const std::size_t q = levels_.size();
  if (names_.empty()) {
    for (std::size_t v = 0; v < q; ++v) names_.push_back("z" + std::to_string(v + 1));
  }
  if (names_.size() != q) throw DataError("variable name count does not match variable count");
  if (!splines_.empty() && splines_.size() != q) {
    throw DataError("spline expansion needs one basis per raw variable");
  }
  main_of_var_.assign(q, static_cast<std::size_t>(-1));
  for (std::size_t e = 0; e < effects_.size(); ++e) {
    auto& effect = effects_[e];
    effect.id = e;
    for (std::size_t v : effect.source_vars) {
      if (v >= q) throw DataError("effect " + std::to_string(e) + " refers to unknown variable");
    }
    const bool pair = effect.kind == EffectKind::interaction || effect.kind == EffectKind::spline_interaction;
    if (pair != (effect.source_vars.size() == 2) ||
        (!pair && effect.source_vars.size() != 1) ||
        (pair && effect.source_vars[0] == effect.source_vars[1])) {
      throw DataError("effect " + std::to_string(e) + " has an invalid source-variable set");
    }
    if (is_main(effect.kind)) main_of_var_[effect.source_vars[0]] = e;
    if (effect.kind == EffectKind::quadratic && levels_[effect.source_vars[0]] != 0) {
      throw DataError("quadratic effect of a categorical variable");
    }
  }
  columns_.reserve(effects_.size());
  for (const auto& effect : effects_) {
    std::size_t width = 0;
    switch (effect.kind) {
      case EffectKind::main:
      case EffectKind::spline_main:
        width = main_width(effect.source_vars[0]);
        break;
      case EffectKind::interaction:
      case EffectKind::spline_interaction:
        width = main_width(effect.source_vars[0]) * main_width(effect.source_vars[1]);
        break;
      case EffectKind::quadratic:
        width = 1;
        break;
    }
    columns_.push_back({num_columns_, width});
    num_columns_ += width;
  }
  for (const auto& effect : effects_) {
    for (std::size_t v : effect.source_vars) {
      if (main_of_var_[v] == static_cast<std::size_t>(-1)) {
        throw DataError("effect " + std::to_string(effect.id) + " has no main effect for its variable");
      }
    }
  }
}

std::size_t BasisExpansion::main_width(std::size_t var) const {
  if (!splines_.empty()) return splines_[var].num_functions();
  return levels_[var] == 0 ? 1 : levels_[var] - 1;
}

Eigen::MatrixXd BasisExpansion::transform(const Eigen::MatrixXd& raw) const {
  const std::size_t q = levels_.size();
  if (static_cast<std::size_t>(raw.cols()) != q) {
    throw DimensionMismatch("expansion expects " + std::to_string(q) + " raw variables, got " +
                            std::to_string(raw.cols()));
  }
  if (!raw.allFinite()) throw DataError("non-finite raw value");
  const Eigen::Index n = raw.rows();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(num_columns_));

  std::vector<Eigen::VectorXd> mains(q);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (std::size_t v = 0; v < q; ++v) {
      const double z = raw(i, static_cast<Eigen::Index>(v));
      auto& block = mains[v];
      block.resize(static_cast<Eigen::Index>(main_width(v)));
      if (!splines_.empty()) {
        splines_[v].evaluate(z, std::span<double>(block.data(), static_cast<std::size_t>(block.size())));
      } else if (levels_[v] == 0) {
        block[0] = z;
      } else {
        const double code = std::round(z);
        if (code != z || code < 0 || code >= static_cast<double>(levels_[v])) {
          throw DataError("variable " + names_[v] + " has invalid level code " + std::to_string(z));
        }
        block.setZero();
        if (code > 0) block[static_cast<Eigen::Index>(code) - 1] = 1.0;
      }
    }
    for (std::size_t e = 0; e < effects_.size(); ++e) {
      const auto& effect = effects_[e];
      const auto begin = static_cast<Eigen::Index>(columns_[e].begin);
      switch (effect.kind) {
        case EffectKind::main:
        case EffectKind::spline_main: {
          const auto& block = mains[effect.source_vars[0]];
          out.row(i).segment(begin, block.size()) = block.transpose();
          break;
        }
        case EffectKind::interaction:
        case EffectKind::spline_interaction: {
          const auto& a = mains[effect.source_vars[0]];
          const auto& b = mains[effect.source_vars[1]];
          Eigen::Index c = begin;
          for (Eigen::Index k1 = 0; k1 < a.size(); ++k1) {
            for (Eigen::Index k2 = 0; k2 < b.size(); ++k2) out(i, c++) = a[k1] * b[k2];
          }
          break;
        }
        case EffectKind::quadratic: {
          const double z = mains[effect.source_vars[0]][0];
          out(i, begin) = z * z;
          break;
        }
      }
    }
  }
  return out;
}

HeredityGraph BasisExpansion::heredity_graph(HeredityPolicy policy) const {
  HeredityGraph graph;
  graph.policy = policy;
  graph.parents.resize(effects_.size());
  for (const auto& effect : effects_) {
    if (is_main(effect.kind)) continue;
    for (std::size_t v : effect.source_vars) graph.parents[effect.id].push_back(main_of_var_[v]);
  }
  return graph;
}

std::vector<std::size_t> BasisExpansion::column_owner() const {
  std::vector<std::size_t> owner(num_columns_);
  for (std::size_t e = 0; e < effects_.size(); ++e) {
    for (std::size_t c = 0; c < columns_[e].count; ++c) owner[columns_[e].begin + c] = e;
  }
  return owner;
}

std::string BasisExpansion::effect_name(std::size_t effect) const {
  const auto& e = effects_.at(effect);
  switch (e.kind) {
    case EffectKind::main:
      return names_[e.source_vars[0]];
    case EffectKind::interaction:
      return names_[e.source_vars[0]] + "*" + names_[e.source_vars[1]];
    case EffectKind::quadratic:
      return names_[e.source_vars[0]] + "^2";
    case EffectKind::spline_main:
      return "f(" + names_[e.source_vars[0]] + ")";
    case EffectKind::spline_interaction:
      return "f(" + names_[e.source_vars[0]] + "," + names_[e.source_vars[1]] + ")";
  }
  return {};
}

namespace {

std::optional<std::string> factor_group(const std::vector<std::size_t>& levels,
                                        const std::vector<std::size_t>& vars,
                                        const std::vector<std::string>& names) {
  std::string label;
  for (std::size_t v : vars) {
    if (levels[v] == 0) continue;
    label += (label.empty() ? "" : ":") + (names.empty() ? "z" + std::to_string(v + 1) : names[v]);
  }
  if (label.empty()) return std::nullopt;
  return label;
}

std::vector<EffectDescriptor> pairwise_effects(const std::vector<std::size_t>& levels,
                                               bool include_quadratic, bool spline,
                                               const std::vector<std::string>& names) {
  const std::size_t q = levels.size();
  std::vector<EffectDescriptor> effects;
  const auto add = [&](EffectKind kind, std::vector<std::size_t> vars) {
    EffectDescriptor e;
    e.id = effects.size();
    e.kind = kind;
    e.group_id = factor_group(levels, vars, names);
    e.source_vars = std::move(vars);
    effects.push_back(std::move(e));
  };
  for (std::size_t v = 0; v < q; ++v) add(spline ? EffectKind::spline_main : EffectKind::main, {v});
  for (std::size_t r = 0; r < q; ++r) {
    for (std::size_t j = r + 1; j < q; ++j) {
      add(spline ? EffectKind::spline_interaction : EffectKind::interaction, {r, j});
    }
  }
  if (include_quadratic && !spline) {
    for (std::size_t v = 0; v < q; ++v) {
      if (levels[v] == 0) add(EffectKind::quadratic, {v});
    }
  }
  return effects;
}

}  // namespace

Expansion expand_polynomial(std::size_t q, bool include_quadratic) {
  if (q == 0) throw DataError("polynomial expansion needs at least one variable");
  std::vector<std::size_t> levels(q, 0);
  BasisExpansion basis(levels, pairwise_effects(levels, include_quadratic, false, {}));
  auto graph = basis.heredity_graph();
  return {std::move(basis), std::move(graph)};
}

Expansion expand_polynomial(const Eigen::MatrixXd& raw, bool include_quadratic) {
  return expand_polynomial(static_cast<std::size_t>(raw.cols()), include_quadratic);
}

Expansion expand_with_dummies(const Eigen::MatrixXd& raw, const std::vector<std::size_t>& levels,
                              bool include_quadratic, std::vector<std::string> names) {
  if (levels.empty()) throw DataError("expansion needs at least one variable");
  if (static_cast<std::size_t>(raw.cols()) != levels.size()) {
    throw DimensionMismatch("level list has " + std::to_string(levels.size()) + " entries for " +
                            std::to_string(raw.cols()) + " variables");
  }
  for (std::size_t v = 0; v < levels.size(); ++v) {
    if (levels[v] == 1) {
      throw DataError("categorical variable " + std::to_string(v + 1) + " has fewer than 2 levels");
    }
  }
  auto effects = pairwise_effects(levels, include_quadratic, false, names);
  BasisExpansion basis(levels, std::move(effects), {}, std::move(names));
  auto graph = basis.heredity_graph();
  return {std::move(basis), std::move(graph)};
}

Expansion expand_splines(const Eigen::MatrixXd& raw, std::size_t num_functions, int degree,
                         std::vector<std::string> names) {
  const std::size_t q = static_cast<std::size_t>(raw.cols());
  if (q == 0) throw DataError("spline expansion needs at least one variable");
  std::vector<SplineBasis> bases;
  bases.reserve(q);
  for (std::size_t v = 0; v < q; ++v) {
    bases.push_back(build_basis(raw.col(static_cast<Eigen::Index>(v)), num_functions, degree));
  }
  std::vector<std::size_t> levels(q, 0);
  auto effects = pairwise_effects(levels, false, true, names);
  BasisExpansion basis(levels, std::move(effects), std::move(bases), std::move(names));
  auto graph = basis.heredity_graph();
  return {std::move(basis), std::move(graph)};
}

Standardizer Standardizer::fit(const Eigen::MatrixXd& design) {
  Standardizer s;
  const Eigen::Index n = design.rows();
  s.mean = design.colwise().mean().transpose();
  s.scale = Eigen::VectorXd::Ones(design.cols());
  if (n < 2) return s;
  for (Eigen::Index c = 0; c < design.cols(); ++c) {
    const double ss = (design.col(c).array() - s.mean[c]).square().sum();
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (sd > 1e-12 * std::max(1.0, std::abs(s.mean[c]))) s.scale[c] = sd;
  }
  return s;
}

Standardizer Standardizer::identity(std::size_t columns) {
  Standardizer s;
  s.mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(columns));
  s.scale = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(columns));
  return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& design) const {
  if (design.cols() != mean.size()) {
    throw DimensionMismatch("standardizer fitted on " + std::to_string(mean.size()) +
                            " columns, got " + std::to_string(design.cols()));
  }
  Eigen::MatrixXd out = design;
  out.rowwise() -= mean.transpose();
  out.array().rowwise() /= scale.transpose().array();
  return out;
}

}  // namespace hsvm
