#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace hsvm {

/// Methods: l2, l1, garrote, shsvm, whsvm on the polynomial expansion
/// {z_j, z_r z_j, z_j^2}; np-l2, np-garrote, np-shsvm, np-whsvm on the
/// B-spline expansion.
struct BenchmarkConfig {
  int example = 1;
  double rho = 0.0;
  std::size_t n = 100;
  std::size_t replications = 20;
  std::size_t test_size = 2000;
  std::uint64_t seed = 1;
  std::vector<std::string> methods{"shsvm", "l1", "l2"};
  std::size_t grid_size = 30;
  std::size_t initial_grid_size = 20;
  int initial_cv_folds = 5;
  std::size_t bayes_samples = 1'000'000;
  std::size_t num_basis = 5;
  bool include_quadratic = true;
};

/// Rejects unknown keys (naming them) and ill-typed or out-of-range values
/// with ConfigError.
BenchmarkConfig parse_benchmark_config(const nlohmann::json& j);
BenchmarkConfig load_benchmark_config(const std::string& path);
nlohmann::json to_json(const BenchmarkConfig& config);

struct MethodSummary {
  std::string method;
  double mean_error = 0.0;
  double std_error = 0.0;  ///< sample sd / sqrt(replications); 0 for one replicate
  std::vector<double> errors;       ///< oracle-best test error per replicate
  std::vector<double> best_tuning;  ///< tuning value attaining it
  /// Structured methods: fits run and heredity violations (tol 1e-8) among them.
  std::size_t fits = 0;
  std::size_t heredity_violations = 0;
  /// l1 only: replicates whose oracle-best fit obeys strong / weak heredity.
  std::size_t strong_compliant = 0;
  std::size_t weak_compliant = 0;
};

struct BenchmarkReport {
  BenchmarkConfig config;
  double bayes_error = 0.0;
  std::vector<MethodSummary> methods;

  const MethodSummary& method(const std::string& name) const;
};

/// Per replicate: fresh training and test samples, every method fitted over
/// its whole tuning grid, and the smallest test error kept. A pure function
/// of the config.
BenchmarkReport run_benchmark(const BenchmarkConfig& config);

/// sqrt(se_a^2 + se_b^2).
double pooled_std_error(const MethodSummary& a, const MethodSummary& b);

nlohmann::json to_json(const BenchmarkReport& report);
/// One row per method (mean, standard error, l1 heredity frequency) and a
/// final Bayes row.
std::string to_csv(const BenchmarkReport& report);

void write_report(const BenchmarkReport& report, const std::string& json_path, const std::string& csv_path);

}  // namespace hsvm
