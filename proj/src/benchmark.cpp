#include "hsvm/benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include "hsvm/error.hpp"
#include "hsvm/evaluation.hpp"
#include "hsvm/feature_expand.hpp"
#include "hsvm/simulation.hpp"
#include "hsvm/splines.hpp"
#include "hsvm/structured_svm.hpp"
#include "hsvm/svm_initial.hpp"
#include "hsvm/svm_l1.hpp"

namespace hsvm {

namespace {

const std::set<std::string> kMethods{"l2",    "l1",    "garrote", "shsvm",   "whsvm",
                                     "np-l2", "np-garrote", "np-shsvm", "np-whsvm"};

template <typename T>
T get(const nlohmann::json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

std::size_t get_count(const nlohmann::json& j, const char* key, std::size_t min) {
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < static_cast<long long>(min)) {
    throw ConfigError(std::string("config key '") + key + "' must be an integer >= " + std::to_string(min));
  }
  return v.get<std::size_t>();
}

bool is_nonparametric(const std::string& method) { return method.rfind("np-", 0) == 0; }

HeredityPolicy policy_of(const std::string& method) {
  if (method.ends_with("shsvm")) return HeredityPolicy::strong;
  if (method.ends_with("whsvm")) return HeredityPolicy::weak;
  return HeredityPolicy::none;
}

bool is_structured(const std::string& method) {
  return method.ends_with("garrote") || method.ends_with("hsvm");
}

std::vector<double> linear_grid(double lo, double hi, std::size_t count) {
  if (count == 1) return {hi};
  std::vector<double> grid(count);
  for (std::size_t k = 0; k < count; ++k) {
    grid[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
  }
  return grid;
}

struct Best {
  double error = 2.0;
  double tuning = 0.0;
  std::size_t index = 0;

  // strict improvement keeps the earliest grid value on ties
  bool offer(double err, double tuning_value, std::size_t k) {
    if (err < error) {
      error = err;
      tuning = tuning_value;
      index = k;
      return true;
    }
    return false;
  }
};

struct ReplicateOutcome {
  double error = 0.0;
  double tuning = 0.0;
  std::size_t fits = 0;
  std::size_t violations = 0;
  bool strong = false;
  bool weak = false;
};

struct ParametricDesign {
  Expansion expansion;
  Eigen::MatrixXd train;
  Eigen::MatrixXd test;
};

struct SplineDesign {
  Expansion expansion;
  Eigen::MatrixXd train;
  Eigen::MatrixXd test;
};

class Replicate {
 public:
  Replicate(const BenchmarkConfig& config, const LogisticModelSpec& spec, std::size_t index)
      : config_(config), index_(index) {
    train_ = generate_example(spec, config.n, config.seed, 2 * index + 1);
    test_ = generate_example(spec, config.test_size, config.seed, 2 * index + 2);
    validate_dataset(train_);
  }

  ReplicateOutcome run(const std::string& method) {
    if (method == "l2") return run_l2(parametric().train, parametric().test);
    if (method == "np-l2") return run_np_l2();
    if (method == "l1") return run_l1();
    if (is_nonparametric(method)) return run_np_structured(policy_of(method));
    return run_structured(policy_of(method));
  }

 private:
  std::uint64_t cv_seed() const { return config_.seed * 0x9e3779b97f4a7c15ULL + index_; }

  const ParametricDesign& parametric() {
    if (!parametric_) {
      ParametricDesign d;
      d.expansion = expand_polynomial(train_.x, config_.include_quadratic);
      const Eigen::MatrixXd raw_train = d.expansion.basis.transform(train_.x);
      const Standardizer scaler = Standardizer::fit(raw_train);
      d.train = scaler.apply(raw_train);
      d.test = scaler.apply(d.expansion.basis.transform(test_.x));
      parametric_ = std::move(d);
    }
    return *parametric_;
  }

  const SplineDesign& splines() {
    if (!splines_) {
      SplineDesign d;
      d.expansion = expand_splines(train_.x, config_.num_basis);
      d.train = d.expansion.basis.transform(train_.x);
      d.test = d.expansion.basis.transform(test_.x);
      splines_ = std::move(d);
    }
    return *splines_;
  }

  const L2FitResult& parametric_initial() {
    if (!parametric_initial_) {
      const auto& d = parametric();
      const auto grid = default_l2_grid(config_.n, static_cast<std::size_t>(d.train.cols()),
                                        config_.initial_grid_size);
      parametric_initial_ =
          select_l2_by_cv(Dataset{d.train, train_.y}, grid, config_.initial_cv_folds, cv_seed()).fit;
    }
    return *parametric_initial_;
  }

  const L2FitResult& spline_initial() {
    if (!spline_initial_) {
      const auto& d = splines();
      const auto grid = default_l2_grid(config_.n, static_cast<std::size_t>(d.train.cols()),
                                        config_.initial_grid_size);
      spline_initial_ =
          select_l2_by_cv(Dataset{d.train, train_.y}, grid, config_.initial_cv_folds, cv_seed()).fit;
    }
    return *spline_initial_;
  }

  ReplicateOutcome run_l2(const Eigen::MatrixXd& train, const Eigen::MatrixXd& test) {
    const auto grid = log_grid(1e-4 * scale(train), 1e4 * scale(train), config_.grid_size);
    Best best;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const L2FitResult fit = fit_l2_svm(Dataset{train, train_.y}, grid[k]);
      best.offer(generalization_error(decision_values(fit, test), test_.y), grid[k], k);
    }
    return {best.error, best.tuning, grid.size(), 0, false, false};
  }

  ReplicateOutcome run_np_l2() {
    const auto& d = splines();
    const auto grid = log_grid(1e-4 * scale(d.train), 1e4 * scale(d.train), config_.grid_size);
    Best best;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const L2FitResult fit = fit_l2_svm_svd_reduced(d.train, train_.y, grid[k]);
      best.offer(generalization_error(decision_values(fit, d.test), test_.y), grid[k], k);
    }
    return {best.error, best.tuning, grid.size(), 0, false, false};
  }

  ReplicateOutcome run_l1() {
    const auto& d = parametric();
    const double top = l1_lambda_max(d.train);
    const auto grid = log_grid(top, top * 1e-4, config_.grid_size);
    const auto owner = d.expansion.basis.column_owner();
    const Dataset train{d.train, train_.y};
    Best best;
    std::vector<bool> best_active;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const L1FitResult fit = fit_l1_svm(train, grid[k]);
      if (best.offer(generalization_error(decision_values(fit, d.test), test_.y), grid[k], k)) {
        best_active = effect_activity(fit, owner, d.expansion.basis.num_effects());
      }
    }
    const auto& graph = d.expansion.graph;
    return {best.error, best.tuning, grid.size(), 0, obeys_heredity(graph, best_active, HeredityPolicy::strong),
            obeys_heredity(graph, best_active, HeredityPolicy::weak)};
  }

  ReplicateOutcome run_structured(HeredityPolicy policy) {
    const auto& d = parametric();
    StructuredFitSpec spec;
    spec.initial = parametric_initial();
    spec.graph = d.expansion.basis.heredity_graph(policy);
    spec.effect_columns = d.expansion.basis.columns();
    const Eigen::MatrixXd scores = effect_scores(d.train, spec.initial.coefficients, spec.effect_columns);
    const double top = structured_lambda_max(scores);
    const auto grid = log_grid(top, top * 1e-4, config_.grid_size);
    const Dataset train{d.train, train_.y};
    Best best;
    ReplicateOutcome out;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      spec.penalty = Penalty::lagrangian(grid[k]);
      const StructuredFitResult fit = fit_structured(train, spec);
      out.violations += count_heredity_violations(spec.graph, fit.theta, policy);
      best.offer(generalization_error(decision_values(fit, d.test), test_.y), grid[k], k);
    }
    out.error = best.error;
    out.tuning = best.tuning;
    out.fits = grid.size();
    return out;
  }

  ReplicateOutcome run_np_structured(HeredityPolicy policy) {
    const auto& d = splines();
    const L2FitResult& initial = spline_initial();
    const HeredityGraph graph = d.expansion.basis.heredity_graph(policy);
    const Eigen::MatrixXd train_scores = spline_effect_scores(d.expansion.basis, d.train, initial.coefficients);
    const Eigen::MatrixXd test_scores = spline_effect_scores(d.expansion.basis, d.test, initial.coefficients);

    ReplicateOutcome out;
    const double floor_lambda = structured_lambda_max(train_scores) * 1e-4;
    const StructuredFitResult loose =
        fit_nonparametric_structured(train_scores, train_.y, graph, Penalty::lagrangian(floor_lambda));
    out.violations += count_heredity_violations(graph, loose.theta, policy);
    const double top = loose.theta.sum();
    const auto grid = linear_grid(top / static_cast<double>(config_.grid_size), top, config_.grid_size);
    Best best;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const StructuredFitResult fit =
          fit_nonparametric_structured(train_scores, train_.y, graph, Penalty::budget(grid[k]));
      out.violations += count_heredity_violations(graph, fit.theta, policy);
      best.offer(generalization_error(decision_values(fit, test_scores), test_.y), grid[k], k);
    }
    out.error = best.error;
    out.tuning = best.tuning;
    out.fits = grid.size() + 1;
    return out;
  }

  double scale(const Eigen::MatrixXd& design) const {
    return static_cast<double>(config_.n) / static_cast<double>(std::max<Eigen::Index>(design.cols(), 1));
  }

  const BenchmarkConfig& config_;
  std::size_t index_;
  Dataset train_;
  Dataset test_;
  std::optional<ParametricDesign> parametric_;
  std::optional<SplineDesign> splines_;
  std::optional<L2FitResult> parametric_initial_;
  std::optional<L2FitResult> spline_initial_;
};

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

BenchmarkConfig parse_benchmark_config(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("benchmark config must be a JSON object");
  static const std::set<std::string> known{"example",     "rho",           "n",
                                           "replications", "test_size",     "seed",
                                           "methods",     "grid_size",     "initial_grid_size",
                                           "initial_cv_folds", "bayes_samples", "num_basis",
                                           "include_quadratic"};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  BenchmarkConfig c;
  if (j.contains("example")) c.example = get<int>(j, "example");
  if (c.example < 1 || c.example > 5) throw ConfigError("config key 'example' must be 1-5");
  if (j.contains("rho")) c.rho = get<double>(j, "rho");
  if (!(c.rho > -1.0 && c.rho < 1.0)) throw ConfigError("config key 'rho' must lie in (-1, 1)");
  if (j.contains("n")) c.n = get_count(j, "n", 2);
  if (j.contains("replications")) c.replications = get_count(j, "replications", 1);
  if (j.contains("test_size")) c.test_size = get_count(j, "test_size", 1);
  if (j.contains("seed")) c.seed = get_count(j, "seed", 0);
  if (j.contains("grid_size")) c.grid_size = get_count(j, "grid_size", 1);
  if (j.contains("initial_grid_size")) c.initial_grid_size = get_count(j, "initial_grid_size", 1);
  if (j.contains("initial_cv_folds")) c.initial_cv_folds = static_cast<int>(get_count(j, "initial_cv_folds", 2));
  if (j.contains("bayes_samples")) c.bayes_samples = get_count(j, "bayes_samples", 1);
  if (j.contains("num_basis")) c.num_basis = get_count(j, "num_basis", 4);
  if (j.contains("include_quadratic")) c.include_quadratic = get<bool>(j, "include_quadratic");
  if (j.contains("methods")) {
    c.methods = get<std::vector<std::string>>(j, "methods");
    if (c.methods.empty()) throw ConfigError("config key 'methods' is empty");
    std::set<std::string> seen;
    for (const auto& m : c.methods) {
      if (!kMethods.contains(m)) throw ConfigError("config key 'methods': unknown method '" + m + "'");
      if (!seen.insert(m).second) throw ConfigError("config key 'methods': duplicate method '" + m + "'");
    }
  }
  return c;
}

BenchmarkConfig load_benchmark_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_benchmark_config(j);
}

nlohmann::json to_json(const BenchmarkConfig& c) {
  return {{"example", c.example},
          {"rho", c.rho},
          {"n", c.n},
          {"replications", c.replications},
          {"test_size", c.test_size},
          {"seed", c.seed},
          {"methods", c.methods},
          {"grid_size", c.grid_size},
          {"initial_grid_size", c.initial_grid_size},
          {"initial_cv_folds", c.initial_cv_folds},
          {"bayes_samples", c.bayes_samples},
          {"num_basis", c.num_basis},
          {"include_quadratic", c.include_quadratic}};
}

const MethodSummary& BenchmarkReport::method(const std::string& name) const {
  for (const auto& m : methods) {
    if (m.method == name) return m;
  }
  throw ConfigError("report has no method '" + name + "'");
}

BenchmarkReport run_benchmark(const BenchmarkConfig& config) {
  const LogisticModelSpec spec = example_spec(config.example, config.rho);
  BenchmarkReport report;
  report.config = config;
  report.bayes_error = bayes_error(spec, config.bayes_samples, config.seed);
  report.methods.resize(config.methods.size());
  for (std::size_t m = 0; m < config.methods.size(); ++m) report.methods[m].method = config.methods[m];

  for (std::size_t r = 0; r < config.replications; ++r) {
    Replicate replicate(config, spec, r);
    for (std::size_t m = 0; m < config.methods.size(); ++m) {
      ReplicateOutcome out;
      try {
        out = replicate.run(config.methods[m]);
      } catch (const Error& e) {
        throw SolverError("replicate " + std::to_string(r) + ", method " + config.methods[m] + ": " + e.what());
      }
      auto& s = report.methods[m];
      s.errors.push_back(out.error);
      s.best_tuning.push_back(out.tuning);
      if (is_structured(s.method)) {
        s.fits += out.fits;
        s.heredity_violations += out.violations;
      }
      if (s.method == "l1") {
        s.strong_compliant += out.strong ? 1 : 0;
        s.weak_compliant += out.weak ? 1 : 0;
      }
    }
  }

  for (auto& s : report.methods) {
    const auto reps = static_cast<double>(s.errors.size());
    double sum = 0.0;
    for (double e : s.errors) sum += e;
    s.mean_error = sum / reps;
    if (s.errors.size() > 1) {
      double ss = 0.0;
      for (double e : s.errors) ss += (e - s.mean_error) * (e - s.mean_error);
      s.std_error = std::sqrt(ss / (reps - 1.0)) / std::sqrt(reps);
    }
  }
  return report;
}

double pooled_std_error(const MethodSummary& a, const MethodSummary& b) {
  return std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);
}

nlohmann::json to_json(const BenchmarkReport& report) {
  nlohmann::json methods = nlohmann::json::array();
  for (const auto& s : report.methods) {
    nlohmann::json m{{"method", s.method},
                     {"mean_error", s.mean_error},
                     {"std_error", s.std_error},
                     {"errors", s.errors},
                     {"best_tuning", s.best_tuning}};
    if (is_structured(s.method)) {
      m["fits"] = s.fits;
      m["heredity_violations"] = s.heredity_violations;
    }
    if (s.method == "l1") {
      m["strong_heredity_frequency"] = s.strong_compliant;
      m["weak_heredity_frequency"] = s.weak_compliant;
    }
    methods.push_back(std::move(m));
  }
  return {{"format", "hsvm-benchmark-report"},
          {"version", 1},
          {"config", to_json(report.config)},
          {"bayes_error", report.bayes_error},
          {"methods", std::move(methods)}};
}

std::string to_csv(const BenchmarkReport& report) {
  std::ostringstream out;
  const std::size_t reps = report.config.replications;
  out << "method,mean_error,std_error,strong_frequency,weak_frequency\n";
  for (const auto& s : report.methods) {
    out << s.method << ',' << fixed(s.mean_error, 4) << ',' << fixed(s.std_error, 4) << ',';
    if (s.method == "l1") {
      out << s.strong_compliant << '/' << reps << ',' << s.weak_compliant << '/' << reps;
    } else {
      out << ',';
    }
    out << '\n';
  }
  out << "Bayes," << fixed(report.bayes_error, 4) << ",,,\n";
  return out.str();
}

void write_report(const BenchmarkReport& report, const std::string& json_path, const std::string& csv_path) {
  if (!json_path.empty()) {
    std::ofstream out(json_path);
    if (!out) throw ConfigError("cannot write '" + json_path + "'");
    out << to_json(report).dump(2) << '\n';
  }
  if (!csv_path.empty()) {
    std::ofstream out(csv_path);
    if (!out) throw ConfigError("cannot write '" + csv_path + "'");
    out << to_csv(report);
  }
}

}  // namespace hsvm
