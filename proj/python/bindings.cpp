#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hsvm/artifact.hpp"
#include "hsvm/benchmark.hpp"
#include "hsvm/error.hpp"
#include "hsvm/feature_expand.hpp"
#include "hsvm/lp_solver.hpp"
#include "hsvm/simulation.hpp"
#include "hsvm/splines.hpp"
#include "hsvm/structured_svm.hpp"
#include "hsvm/svm_initial.hpp"
#include "hsvm/svm_l1.hpp"

namespace py = pybind11;

namespace {

hsvm::Relation parse_relation(const std::string& s) {
  if (s == "<=") return hsvm::Relation::less_equal;
  if (s == ">=") return hsvm::Relation::greater_equal;
  if (s == "==" || s == "=") return hsvm::Relation::equal;
  throw hsvm::ConfigError("relation must be '<=', '>=' or '=='");
}

py::dict solve_lp_py(const Eigen::VectorXd& c, const Eigen::MatrixXd& a, const std::vector<std::string>& relations,
                     const Eigen::VectorXd& b, std::optional<std::vector<bool>> nonneg) {
  if (a.rows() != b.size() || static_cast<std::size_t>(a.rows()) != relations.size() || a.cols() != c.size()) {
    throw hsvm::DimensionMismatch("c, A, relations and b disagree in size");
  }
  hsvm::LinearProgram lp(static_cast<std::size_t>(c.size()));
  lp.objective = c;
  if (nonneg) lp.nonneg = *nonneg;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    lp.add_constraint(a.row(i).transpose(), parse_relation(relations[static_cast<std::size_t>(i)]), b[i]);
  }
  const hsvm::LpSolution s = hsvm::solve_lp(lp);
  py::dict out;
  out["status"] = hsvm::to_string(s.status);
  out["x"] = s.values;
  out["objective"] = s.objective_value;
  out["duals"] = s.duals;
  out["duality_gap"] = s.duality_gap_bound;
  out["pivots"] = s.pivots;
  return out;
}

py::dict structured_py(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const std::string& policy,
                       std::optional<double> lam, std::optional<double> big_m, bool include_quadratic,
                       double initial_lambda) {
  if (lam.has_value() == big_m.has_value()) throw hsvm::ConfigError("give exactly one of lam or big_m");
  const hsvm::Expansion ex = hsvm::expand_polynomial(x, include_quadratic);
  const Eigen::MatrixXd design = ex.basis.transform(x);
  const hsvm::Dataset data{design, y};
  hsvm::StructuredFitSpec spec;
  spec.initial = hsvm::fit_l2_svm(data, initial_lambda);
  spec.graph = ex.basis.heredity_graph(hsvm::parse_policy(policy));
  spec.effect_columns = ex.basis.columns();
  spec.penalty = lam ? hsvm::Penalty::lagrangian(*lam) : hsvm::Penalty::budget(*big_m);
  const hsvm::StructuredFitResult fit = hsvm::fit_structured(data, spec);
  std::vector<std::string> names;
  for (std::size_t e : fit.active_effects) names.push_back(ex.basis.effect_name(e));
  py::dict out;
  out["intercept"] = fit.intercept;
  out["theta"] = fit.theta;
  out["coefficients"] = fit.effective_coefficients;
  out["active_effects"] = names;
  out["objective"] = fit.objective;
  return out;
}

std::string json_text(const nlohmann::json& j) { return j.dump(); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Structured variable selection for support vector machines";

  py::register_exception<hsvm::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<hsvm::DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<hsvm::DimensionMismatch>(m, "DimensionMismatch", PyExc_ValueError);
  py::register_exception<hsvm::SolverError>(m, "SolverError", PyExc_RuntimeError);
  py::register_exception<hsvm::EmptyInitial>(m, "EmptyInitial", PyExc_RuntimeError);

  m.def("solve_lp", &solve_lp_py, py::arg("c"), py::arg("A"), py::arg("relations"), py::arg("b"),
        py::arg("nonneg") = py::none(), "minimize c.x subject to A x (rel) b");

  m.def(
      "fit_l2_svm",
      [](const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lam) {
        const auto f = hsvm::fit_l2_svm(hsvm::Dataset{x, y}, lam);
        return py::make_tuple(f.intercept, f.coefficients, f.objective);
      },
      py::arg("x"), py::arg("y"), py::arg("lam"), "(intercept, coefficients, objective)");
  m.def(
      "fit_l2_svm_svd_reduced",
      [](const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lam) {
        const auto f = hsvm::fit_l2_svm_svd_reduced(x, y, lam);
        return py::make_tuple(f.intercept, f.coefficients, f.objective);
      },
      py::arg("x"), py::arg("y"), py::arg("lam"));
  m.def(
      "fit_l1_svm",
      [](const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lam) {
        const auto f = hsvm::fit_l1_svm(hsvm::Dataset{x, y}, lam);
        return py::make_tuple(f.intercept, f.coefficients, f.objective);
      },
      py::arg("x"), py::arg("y"), py::arg("lam"));
  m.def("fit_structured", &structured_py, py::arg("x"), py::arg("y"), py::arg("policy") = "strong",
        py::arg("lam") = py::none(), py::arg("big_m") = py::none(), py::arg("include_quadratic") = true,
        py::arg("initial_lambda") = 1.0,
        "Garrote-scaled SVM on the polynomial expansion of raw x with an l2 initial fit");

  m.def(
      "expand_polynomial",
      [](const Eigen::MatrixXd& x, bool include_quadratic) {
        const auto ex = hsvm::expand_polynomial(x, include_quadratic);
        std::vector<std::string> names;
        for (std::size_t e = 0; e < ex.basis.num_effects(); ++e) names.push_back(ex.basis.effect_name(e));
        return py::make_tuple(ex.basis.transform(x), names);
      },
      py::arg("x"), py::arg("include_quadratic") = true);
  m.def(
      "spline_basis",
      [](const Eigen::VectorXd& values, std::size_t num_functions, const Eigen::VectorXd& at) {
        const auto basis = hsvm::build_basis(values, num_functions);
        Eigen::MatrixXd out(at.size(), static_cast<Eigen::Index>(basis.num_functions()));
        for (Eigen::Index i = 0; i < at.size(); ++i) out.row(i) = basis.evaluate(at[i]).transpose();
        return out;
      },
      py::arg("values"), py::arg("num_functions"), py::arg("at"));

  m.def(
      "generate_example",
      [](int example, double rho, std::size_t n, std::uint64_t seed) {
        const auto d = hsvm::generate_example(hsvm::example_spec(example, rho), n, seed);
        return py::make_tuple(d.x, d.y);
      },
      py::arg("example"), py::arg("rho"), py::arg("n"), py::arg("seed") = 1);
  m.def(
      "bayes_error",
      [](int example, double rho, std::size_t samples, std::uint64_t seed) {
        return hsvm::bayes_error(hsvm::example_spec(example, rho), samples, seed);
      },
      py::arg("example"), py::arg("rho"), py::arg("samples") = 1'000'000, py::arg("seed") = 1);

  m.def(
      "run_benchmark_json",
      [](const std::string& config) {
        const auto report = hsvm::run_benchmark(hsvm::parse_benchmark_config(nlohmann::json::parse(config)));
        return json_text(hsvm::to_json(report));
      },
      py::arg("config"), "JSON config text in, JSON report text out");

  m.def(
      "train_json",
      [](const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const std::string& method, std::optional<double> lam,
         std::optional<double> big_m, int cv, std::uint64_t seed) {
        hsvm::TrainOptions o;
        o.method = method;
        o.lambda = lam;
        o.big_m = big_m;
        o.cv_folds = cv;
        o.seed = seed;
        std::vector<std::string> names;
        for (Eigen::Index j = 0; j < x.cols(); ++j) names.push_back("z" + std::to_string(j + 1));
        const auto model = hsvm::train_model(hsvm::Dataset{x, y}, names,
                                             std::vector<std::size_t>(static_cast<std::size_t>(x.cols()), 0), o);
        return json_text(hsvm::to_json(model));
      },
      py::arg("x"), py::arg("y"), py::arg("method"), py::arg("lam") = py::none(), py::arg("big_m") = py::none(),
      py::arg("cv") = 0, py::arg("seed") = 1);
  m.def(
      "predict_json",
      [](const std::string& model, const Eigen::MatrixXd& x) {
        return hsvm::predict(hsvm::artifact_from_json(nlohmann::json::parse(model)), x);
      },
      py::arg("model"), py::arg("x"));
}
