#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "hsvm/dataset.hpp"
#include "hsvm/rng.hpp"

namespace hsvm {

/// z ~ N(0, Sigma) with Sigma_rj = rho^|r-j|, and
/// log(P(y=1|z) / P(y=-1|z)) = linear_predictor(z).
struct LogisticModelSpec {
  std::string name;
  std::size_t q = 0;
  double rho = 0.0;
  std::function<double(std::span<const double>)> linear_predictor;
};

/// Examples 1 to 5. Examples 1 and 2 use q = 7, the rest q = 5. The spline
/// examples (4, 5) evaluate their five-coefficient blocks on functions 2..6 of
/// a fixed cubic basis on [-4.5, 4.5] with interior knots at the standard
/// normal terciles; tensor blocks are first-variable major.
LogisticModelSpec example_spec(int example, double rho);

/// Constant predictor; with c = 0 the Bayes error is exactly 1/2.
LogisticModelSpec constant_spec(std::size_t q, double rho, double c);

/// AR(1) draw: z_1 = e_1, z_j = rho z_{j-1} + sqrt(1 - rho^2) e_j.
Eigen::MatrixXd draw_covariates(std::size_t q, double rho, std::size_t n, Rng& rng);

double logistic(double eta);

/// Raw covariates (n x q) and labels in {+1, -1}. Deterministic in
/// (seed, stream).
Dataset generate_example(const LogisticModelSpec& spec, std::size_t n, std::uint64_t seed,
                         std::uint64_t stream = 0);

/// Monte Carlo mean of min(p(z), 1 - p(z)).
double bayes_error(const LogisticModelSpec& spec, std::size_t mc_samples, std::uint64_t seed);

}  // namespace hsvm
