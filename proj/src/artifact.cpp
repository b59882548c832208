#include "hsvm/artifact.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "hsvm/error.hpp"
#include "hsvm/evaluation.hpp"
#include "hsvm/structured_svm.hpp"
#include "hsvm/svm_initial.hpp"
#include "hsvm/svm_l1.hpp"

namespace hsvm {

namespace {

const std::set<std::string> kKnown{"l2", "l1", "garrote", "shsvm", "whsvm",
                                   "np-l2", "np-garrote", "np-shsvm", "np-whsvm"};

bool spline_method(const std::string& m) { return m.rfind("np-", 0) == 0; }

bool structured_method(const std::string& m) { return m.ends_with("garrote") || m.ends_with("hsvm"); }

HeredityPolicy method_policy(const std::string& m) {
  if (m.ends_with("shsvm")) return HeredityPolicy::strong;
  if (m.ends_with("whsvm")) return HeredityPolicy::weak;
  return HeredityPolicy::none;
}

struct Fitted {
  double intercept = 0.0;
  Eigen::VectorXd coefficients;
  Eigen::VectorXd theta;
  std::vector<std::size_t> active;
};

L2FitResult fit_ridge(const Dataset& d, double lambda) {
  return d.dim() > d.size() ? fit_l2_svm_svd_reduced(d.x, d.y, lambda) : fit_l2_svm(d, lambda);
}

std::vector<std::size_t> active_blocks(const Eigen::VectorXd& coef, const BasisExpansion& basis) {
  std::vector<std::size_t> active;
  const auto& cols = basis.columns();
  for (std::size_t e = 0; e < cols.size(); ++e) {
    const auto block = coef.segment(static_cast<Eigen::Index>(cols[e].begin), static_cast<Eigen::Index>(cols[e].count));
    if (block.size() > 0 && block.cwiseAbs().maxCoeff() > kActiveTol) active.push_back(e);
  }
  return active;
}

class MethodFitter {
 public:
  MethodFitter(const std::string& method, const BasisExpansion& basis, bool budget)
      : method_(method), basis_(basis), budget_(budget), policy_(method_policy(method)) {}

  /// Initial lambda for structured methods; ignored otherwise.
  double initial_lambda = 0.0;

  Fitted fit(const Dataset& d, double tuning, const L2FitResult* initial = nullptr) const {
    Fitted out;
    if (method_ == "l2" || method_ == "np-l2") {
      const L2FitResult f = fit_ridge(d, tuning);
      out.intercept = f.intercept;
      out.coefficients = f.coefficients;
      out.active = active_blocks(out.coefficients, basis_);
    } else if (method_ == "l1") {
      const L1FitResult f = fit_l1_svm(d, tuning);
      out.intercept = f.intercept;
      out.coefficients = f.coefficients;
      out.active = active_blocks(out.coefficients, basis_);
    } else {
      StructuredFitSpec spec;
      spec.initial = initial ? *initial : fit_ridge(d, initial_lambda);
      spec.graph = basis_.heredity_graph(policy_);
      spec.effect_columns = basis_.columns();
      spec.penalty = budget_ ? Penalty::budget(tuning) : Penalty::lagrangian(tuning);
      const StructuredFitResult f = fit_structured(d, spec);
      out.intercept = f.intercept;
      out.coefficients = f.effective_coefficients;
      out.theta = f.theta;
      out.active = f.active_effects;
    }
    return out;
  }

 private:
  std::string method_;
  const BasisExpansion& basis_;
  bool budget_;
  HeredityPolicy policy_;
};

Eigen::VectorXd to_vector(const nlohmann::json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

bool is_known_method(const std::string& method) { return kKnown.contains(method); }

ModelArtifact train_model(const Dataset& raw, const std::vector<std::string>& names,
                          const std::vector<std::size_t>& levels, const TrainOptions& options) {
  const std::string& method = options.method;
  if (!is_known_method(method)) throw ConfigError("unknown method '" + method + "'");
  const int modes = (options.lambda ? 1 : 0) + (options.big_m ? 1 : 0) + (options.cv_folds > 0 ? 1 : 0);
  if (modes != 1) throw ConfigError("give exactly one of --lambda, --big-m or --cv");
  if (options.big_m && !structured_method(method)) {
    throw ConfigError("--big-m applies to structured methods only");
  }
  if (options.lambda && !(*options.lambda >= 0.0 && std::isfinite(*options.lambda))) {
    throw ConfigError("--lambda must be finite and >= 0");
  }
  if (options.big_m && !(*options.big_m >= 0.0)) throw ConfigError("--big-m must be >= 0");
  validate_dataset(raw);
  if (names.size() != raw.dim() || levels.size() != raw.dim()) {
    throw DimensionMismatch("column names / levels do not match the data");
  }

  const bool splines = spline_method(method);
  for (std::size_t lv : levels) {
    if (splines && lv != 0) throw ConfigError("spline methods need continuous columns only");
  }
  Expansion ex = splines ? expand_splines(raw.x, options.num_basis, 3, names)
                         : expand_with_dummies(raw.x, levels, options.include_quadratic, names);

  ModelArtifact model;
  model.method = method;
  model.seed = options.seed;
  model.policy = method_policy(method);
  const Eigen::MatrixXd design = ex.basis.transform(raw.x);
  model.scaler = splines ? Standardizer::identity(static_cast<std::size_t>(design.cols()))
                         : Standardizer::fit(design);
  const Dataset data{model.scaler.apply(design), raw.y};

  MethodFitter fitter(method, ex.basis, options.big_m.has_value());
  std::optional<L2FitResult> initial;
  if (structured_method(method)) {
    const auto grid = default_l2_grid(data.size(), data.dim(), options.initial_grid_size);
    const L2Selection sel = select_l2_by_cv(data, grid, options.initial_cv_folds, options.seed);
    initial = sel.fit;
    fitter.initial_lambda = sel.lambda;
  }

  double tuning = 0.0;
  if (options.lambda) {
    tuning = *options.lambda;
  } else if (options.big_m) {
    tuning = *options.big_m;
  } else {
    std::vector<double> grid = options.grid;
    if (grid.empty()) {
      if (method == "l2" || method == "np-l2") {
        grid = log_grid(1e-4, 1e4, 30);
        for (double& g : grid) g *= static_cast<double>(data.size()) / static_cast<double>(data.dim());
      } else if (method == "l1") {
        const double top = l1_lambda_max(data.x);
        grid = log_grid(top, top * 1e-4, 30);
      } else {
        const double top = structured_lambda_max(effect_scores(data.x, initial->coefficients, ex.basis.columns()));
        grid = log_grid(top, top * 1e-4, 30);
      }
    }
    const GridFitter cv_fit = [&](const Dataset& train, const Eigen::MatrixXd& test_x,
                                  const std::vector<double>& values) {
      std::optional<L2FitResult> fold_initial;
      if (structured_method(method)) fold_initial = fit_ridge(train, fitter.initial_lambda);
      Eigen::MatrixXd out(test_x.rows(), static_cast<Eigen::Index>(values.size()));
      for (std::size_t k = 0; k < values.size(); ++k) {
        const Fitted f = fitter.fit(train, values[k], fold_initial ? &*fold_initial : nullptr);
        Eigen::VectorXd d = test_x * f.coefficients;
        d.array() += f.intercept;
        out.col(static_cast<Eigen::Index>(k)) = d;
      }
      return out;
    };
    const CvResult cv = kfold_cv(data, cv_fit, grid, options.cv_folds, options.seed);
    tuning = cv.best_tuning;
    model.cv_error = cv.best_error;
  }

  const Fitted fit = fitter.fit(data, tuning, initial ? &*initial : nullptr);
  model.tuning_kind = options.big_m ? "M" : "lambda";
  model.tuning = tuning;
  model.intercept = fit.intercept;
  model.coefficients = fit.coefficients;
  model.theta = fit.theta;
  model.active_effects = fit.active;
  if (initial) {
    model.initial_intercept = initial->intercept;
    model.initial_coefficients = initial->coefficients;
    model.initial_lambda = fitter.initial_lambda;
  }
  Eigen::VectorXd d = data.x * model.coefficients;
  d.array() += model.intercept;
  model.training_hinge = hinge_loss(d, data.y);
  model.expansion = std::move(ex.basis);
  return model;
}

Eigen::VectorXd decision_values(const ModelArtifact& model, const Eigen::MatrixXd& raw) {
  const Eigen::MatrixXd x = model.scaler.apply(model.expansion.transform(raw));
  Eigen::VectorXd d = x * model.coefficients;
  d.array() += model.intercept;
  return d;
}

Eigen::VectorXd predict(const ModelArtifact& model, const Eigen::MatrixXd& raw) {
  return sign_labels(decision_values(model, raw));
}

nlohmann::json to_json(const ModelArtifact& m) {
  const auto& basis = m.expansion;
  nlohmann::json variables = nlohmann::json::array();
  for (std::size_t v = 0; v < basis.num_raw_vars(); ++v) {
    variables.push_back({{"name", basis.variable_names()[v]}, {"levels", basis.levels()[v]}});
  }
  nlohmann::json effects = nlohmann::json::array();
  for (const auto& e : basis.effects()) {
    nlohmann::json je{{"kind", to_string(e.kind)}, {"source_vars", e.source_vars}};
    je["group"] = e.group_id ? nlohmann::json(*e.group_id) : nlohmann::json(nullptr);
    effects.push_back(std::move(je));
  }
  nlohmann::json splines = nlohmann::json::array();
  for (const auto& s : basis.splines()) {
    splines.push_back({{"lower", s.lower()},
                       {"upper", s.upper()},
                       {"interior_knots", s.interior_knots()},
                       {"degree", s.degree()}});
  }
  nlohmann::json j{{"format", "hsvm-model"},
                   {"version", m.version},
                   {"method", m.method},
                   {"tuning_kind", m.tuning_kind},
                   {"tuning", m.tuning},
                   {"seed", m.seed},
                   {"expansion", {{"variables", variables}, {"effects", effects}, {"splines", splines}}},
                   {"standardizer", {{"mean", to_std(m.scaler.mean)}, {"scale", to_std(m.scaler.scale)}}},
                   {"heredity", {{"policy", to_string(m.policy)}, {"parents", basis.heredity_graph().parents}}},
                   {"theta", to_std(m.theta)},
                   {"intercept", m.intercept},
                   {"coefficients", to_std(m.coefficients)},
                   {"active_effects", m.active_effects},
                   {"training_hinge", m.training_hinge}};
  j["cv_error"] = m.cv_error ? nlohmann::json(*m.cv_error) : nlohmann::json(nullptr);
  if (m.initial_intercept) {
    j["initial"] = {{"intercept", *m.initial_intercept},
                    {"lambda", m.initial_lambda},
                    {"coefficients", to_std(m.initial_coefficients)}};
  } else {
    j["initial"] = nullptr;
  }
  return j;
}

ModelArtifact artifact_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "hsvm-model") throw DataError("not a model artifact");
    ModelArtifact m;
    m.version = j.at("version").get<int>();
    if (m.version != kArtifactVersion) {
      throw DataError("artifact version " + std::to_string(m.version) + " is not supported");
    }
    m.method = j.at("method").get<std::string>();
    if (!is_known_method(m.method)) throw DataError("artifact names unknown method '" + m.method + "'");
    m.tuning_kind = j.at("tuning_kind").get<std::string>();
    m.tuning = j.at("tuning").get<double>();
    m.seed = j.at("seed").get<std::uint64_t>();
    if (!j.at("cv_error").is_null()) m.cv_error = j.at("cv_error").get<double>();

    const auto& je = j.at("expansion");
    std::vector<std::string> names;
    std::vector<std::size_t> levels;
    for (const auto& v : je.at("variables")) {
      names.push_back(v.at("name").get<std::string>());
      levels.push_back(v.at("levels").get<std::size_t>());
    }
    std::vector<EffectDescriptor> effects;
    for (const auto& e : je.at("effects")) {
      EffectDescriptor d;
      d.kind = parse_effect_kind(e.at("kind").get<std::string>());
      d.source_vars = e.at("source_vars").get<std::vector<std::size_t>>();
      if (!e.at("group").is_null()) d.group_id = e.at("group").get<std::string>();
      effects.push_back(std::move(d));
    }
    std::vector<SplineBasis> splines;
    for (const auto& s : je.at("splines")) {
      splines.emplace_back(s.at("lower").get<double>(), s.at("upper").get<double>(),
                           s.at("interior_knots").get<std::vector<double>>(), s.at("degree").get<int>());
    }
    m.expansion = BasisExpansion(std::move(levels), std::move(effects), std::move(splines), std::move(names));
    m.scaler.mean = to_vector(j.at("standardizer").at("mean"));
    m.scaler.scale = to_vector(j.at("standardizer").at("scale"));
    m.policy = parse_policy(j.at("heredity").at("policy").get<std::string>());
    m.theta = to_vector(j.at("theta"));
    m.intercept = j.at("intercept").get<double>();
    m.coefficients = to_vector(j.at("coefficients"));
    m.active_effects = j.at("active_effects").get<std::vector<std::size_t>>();
    m.training_hinge = j.at("training_hinge").get<double>();
    if (!j.at("initial").is_null()) {
      const auto& ji = j.at("initial");
      m.initial_intercept = ji.at("intercept").get<double>();
      m.initial_lambda = ji.at("lambda").get<double>();
      m.initial_coefficients = to_vector(ji.at("coefficients"));
    }
    const auto cols = static_cast<Eigen::Index>(m.expansion.num_columns());
    if (m.coefficients.size() != cols || m.scaler.mean.size() != cols || m.scaler.scale.size() != cols) {
      throw DataError("artifact coefficient and standardizer lengths do not match its expansion");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed artifact: ") + e.what());
  }
}

void save_artifact(const ModelArtifact& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << to_json(model).dump(2) << '\n';
}

ModelArtifact load_artifact(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open artifact '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError("artifact '" + path + "' is not valid JSON: " + e.what());
  }
  return artifact_from_json(j);
}

std::vector<double> parse_grid(const std::string& spec) {
  const auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || !(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError("grid spec '" + spec + "': '" + s + "' is not a positive number");
    }
    return v;
  };
  std::vector<std::string> parts;
  const char sep = spec.find(':') != std::string::npos ? ':' : ',';
  std::stringstream ss(spec);
  for (std::string item; std::getline(ss, item, sep);) parts.push_back(item);
  if (sep == ':') {
    if (parts.size() != 3) throw ConfigError("grid spec '" + spec + "' must be lo:hi:count");
    const double count = number(parts[2]);
    if (count != std::floor(count)) throw ConfigError("grid spec '" + spec + "': count must be an integer");
    return log_grid(number(parts[0]), number(parts[1]), static_cast<std::size_t>(count));
  }
  std::vector<double> grid;
  for (const auto& p : parts) grid.push_back(number(p));
  if (grid.empty()) throw ConfigError("empty grid spec");
  return grid;
}

}  // namespace hsvm
