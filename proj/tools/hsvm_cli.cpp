// hsvm: train, predict and benchmark structured SVM classifiers.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hsvm/artifact.hpp"
#include "hsvm/benchmark.hpp"
#include "hsvm/csv.hpp"
#include "hsvm/error.hpp"
#include "hsvm/simulation.hpp"

namespace {

constexpr int kUsage = 1;
constexpr int kData = 2;
constexpr int kSolver = 3;

struct TrainArgs {
  std::string csv;
  std::string schema;
  std::string out = "model.json";
  std::string grid;
  hsvm::TrainOptions options;
  std::optional<double> lambda;
  std::optional<double> big_m;
  bool no_quadratic = false;
};

struct PredictArgs {
  std::string model;
  std::string csv;
  std::string out;
};

struct BenchmarkArgs {
  std::string config;
  std::string out;
  std::optional<std::size_t> replications;
  std::optional<std::uint64_t> seed;
};

struct GenerateArgs {
  int example = 1;
  double rho = 0.0;
  std::size_t n = 100;
  std::uint64_t seed = 1;
  std::string out;
};

void run_train(TrainArgs& a) {
  const hsvm::CsvTable table = hsvm::read_csv(a.csv);
  const hsvm::CsvSchema schema = a.schema.empty() ? hsvm::CsvSchema{} : hsvm::load_schema(a.schema);
  const auto levels = hsvm::column_levels(table, schema);
  a.options.lambda = a.lambda;
  a.options.big_m = a.big_m;
  a.options.include_quadratic = !a.no_quadratic;
  if (!a.grid.empty()) a.options.grid = hsvm::parse_grid(a.grid);
  const hsvm::ModelArtifact model =
      hsvm::train_model(hsvm::Dataset{table.features, table.labels}, table.feature_names, levels, a.options);
  hsvm::save_artifact(model, a.out);

  std::cout << "method " << model.method << ", " << model.tuning_kind << " = " << model.tuning;
  if (model.cv_error) std::cout << " (cv error " << *model.cv_error << ")";
  std::cout << "\nactive effects (" << model.active_effects.size() << "):";
  for (std::size_t e : model.active_effects) std::cout << ' ' << model.expansion.effect_name(e);
  std::cout << "\ntraining hinge " << model.training_hinge << "\nwrote " << a.out << '\n';
}

void run_predict(const PredictArgs& a) {
  const hsvm::ModelArtifact model = hsvm::load_artifact(a.model);
  const hsvm::CsvTable table = hsvm::read_csv(a.csv, false);
  const auto& expected = model.expansion.variable_names();
  if (table.feature_names != expected) {
    std::string want;
    for (const auto& n : expected) want += (want.empty() ? "" : ",") + n;
    throw hsvm::DimensionMismatch("CSV columns do not match the model; expected " + want + " in that order");
  }
  const Eigen::VectorXd labels = hsvm::predict(model, table.features);
  std::ofstream file;
  if (!a.out.empty()) {
    file.open(a.out);
    if (!file) throw hsvm::DataError("cannot write '" + a.out + "'");
  }
  std::ostream& out = a.out.empty() ? std::cout : file;
  out << "y\n";
  for (Eigen::Index i = 0; i < labels.size(); ++i) out << static_cast<int>(labels[i]) << '\n';
  if (table.has_labels()) {
    std::size_t wrong = 0;
    for (Eigen::Index i = 0; i < labels.size(); ++i) wrong += labels[i] != table.labels[i] ? 1 : 0;
    std::cerr << "error rate " << static_cast<double>(wrong) / static_cast<double>(labels.size()) << '\n';
  }
}

void run_benchmark(const BenchmarkArgs& a) {
  hsvm::BenchmarkConfig config = hsvm::load_benchmark_config(a.config);
  if (a.replications) {
    if (*a.replications == 0) throw hsvm::ConfigError("--replications must be >= 1");
    config.replications = *a.replications;
  }
  if (a.seed) config.seed = *a.seed;
  const hsvm::BenchmarkReport report = hsvm::run_benchmark(config);
  if (!a.out.empty()) hsvm::write_report(report, a.out + ".json", a.out + ".csv");
  std::cout << hsvm::to_csv(report);
}

void run_generate(const GenerateArgs& a) {
  const auto spec = hsvm::example_spec(a.example, a.rho);
  const hsvm::Dataset data = hsvm::generate_example(spec, a.n, a.seed);
  std::vector<std::string> names;
  for (std::size_t j = 0; j < spec.q; ++j) names.push_back("z" + std::to_string(j + 1));
  hsvm::write_csv(a.out, names, data.x, data.y);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structured variable selection for support vector machines"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* cmd_train = app.add_subcommand("train", "Fit a classifier and write a model artifact");
  cmd_train->add_option("csv", train.csv, "Training CSV with a 'y' label column")->required()->check(CLI::ExistingFile);
  cmd_train->add_option("--method", train.options.method,
                        "l2, l1, garrote, shsvm, whsvm, np-l2, np-garrote, np-shsvm or np-whsvm")
      ->required();
  auto* opt_lambda = cmd_train->add_option("--lambda", train.lambda, "Penalty weight");
  auto* opt_m = cmd_train->add_option("--big-m", train.big_m, "Budget on the scaling parameters");
  auto* opt_cv = cmd_train->add_option("--cv", train.options.cv_folds, "Select lambda by k-fold CV")
                     ->check(CLI::Range(2, 1000000));
  opt_lambda->excludes(opt_m)->excludes(opt_cv);
  opt_m->excludes(opt_cv);
  cmd_train->add_option("--grid", train.grid, "CV grid: lo:hi:count (log spaced) or a comma list")->needs(opt_cv);
  cmd_train->add_option("--seed", train.options.seed, "Seed for CV folds");
  cmd_train->add_option("--schema", train.schema, "JSON sidecar declaring categorical columns")
      ->check(CLI::ExistingFile);
  cmd_train->add_option("--num-basis", train.options.num_basis, "B-spline functions per variable")
      ->check(CLI::Range(4, 1000));
  cmd_train->add_flag("--no-quadratic", train.no_quadratic, "Leave out z_j^2 effects");
  cmd_train->add_option("--out", train.out, "Artifact path");

  PredictArgs predict;
  auto* cmd_predict = app.add_subcommand("predict", "Label the rows of a CSV with a saved model");
  cmd_predict->add_option("model", predict.model, "Model artifact")->required()->check(CLI::ExistingFile);
  cmd_predict->add_option("csv", predict.csv, "Feature CSV")->required()->check(CLI::ExistingFile);
  cmd_predict->add_option("--out", predict.out, "Write labels here instead of stdout");

  BenchmarkArgs bench;
  auto* cmd_bench = app.add_subcommand("benchmark", "Run a simulation study from a JSON config");
  cmd_bench->add_option("config", bench.config, "Benchmark config")->required()->check(CLI::ExistingFile);
  cmd_bench->add_option("--out", bench.out, "Write <out>.json and <out>.csv");
  cmd_bench->add_option("--replications", bench.replications, "Override the replication count");
  cmd_bench->add_option("--seed", bench.seed, "Override the seed");

  GenerateArgs gen;
  auto* cmd_gen = app.add_subcommand("generate", "Write a simulated training set as CSV");
  cmd_gen->add_option("--example", gen.example, "Simulation example 1-5")->check(CLI::Range(1, 5));
  cmd_gen->add_option("--rho", gen.rho, "AR(1) correlation");
  cmd_gen->add_option("--n", gen.n, "Sample count")->check(CLI::PositiveNumber);
  cmd_gen->add_option("--seed", gen.seed, "Seed");
  cmd_gen->add_option("--out", gen.out, "CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (*cmd_train) run_train(train);
    if (*cmd_predict) run_predict(predict);
    if (*cmd_bench) run_benchmark(bench);
    if (*cmd_gen) run_generate(gen);
  } catch (const hsvm::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const hsvm::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const hsvm::DimensionMismatch& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const hsvm::SolverError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolver;
  } catch (const hsvm::EmptyInitial& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolver;
  } catch (const hsvm::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSolver;
  }
  return 0;
}
