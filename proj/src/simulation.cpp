#include "hsvm/simulation.hpp"

#include <array>
#include <cmath>
#include <memory>
#include <random>
#include <string>

#include "hsvm/error.hpp"
#include "hsvm/splines.hpp"

namespace hsvm {

namespace {

constexpr std::array<double, 5> kEx4Main1{2.1, -2.9, 0.3, 2.7, -0.1};
constexpr std::array<double, 5> kEx4Main2{-2.8, -1.2, 1.8, 1.7, -0.8};
constexpr std::array<double, 25> kEx4Pair12{-2.4, -0.1, 0.6, 3,    2.8,  -0.9, 0.3,  1,    -0.9,
                                            -1.3, 0.9,  2.3, 1.9,  0.8,  -0.2, 1.2,  2.1,  1.0,
                                            -0.8, -1.7, -0.8, -1.2, 2.1, -2.8, 0.1};

constexpr std::array<double, 5> kEx5Main1{3.0, -2.5, 2.0, -1.5, 1.0};
constexpr std::array<double, 5> kEx5Main2{1.5, 2.0, -3.0, -2.5, -2.0};
constexpr std::array<double, 25> kEx5Pair15{7.1,  -9.8, 1.1, 9.0,  -0.3, -8.1, -0.4, 2.0,  10,
                                            9.4,  -3.1, 1.0, 3.2,  -3.1, -4.3, 3.1,  7.7,  6.2,
                                            2.7,  -0.7, 3.9, 6.8,  3.4,  -2.5, -5.6};
constexpr std::array<double, 25> kEx5Pair23{-2.6, -3.8, 7.0, -9.4, 0.5,  -9.2, -4.0, 6.1,  5.6,
                                            -2.7, 5.5,  9.3, -5.4, 9.1,  -2.8, 5.1,  3.9,  6.6,
                                            -0.6, 6.8,  0.8, 8,    -3.6, -2.5, -6};

// Coefficient k applies to basis function k + 1: the first function of the
// six-function basis is left out, as in an intercept-free regression spline.
double dot5(const Eigen::VectorXd& b, const std::array<double, 5>& c) {
  double s = 0.0;
  for (int k = 0; k < 5; ++k) s += b[k + 1] * c[static_cast<std::size_t>(k)];
  return s;
}

double dot25(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const std::array<double, 25>& c) {
  double s = 0.0;
  for (int k1 = 0; k1 < 5; ++k1) {
    for (int k2 = 0; k2 < 5; ++k2) s += a[k1 + 1] * b[k2 + 1] * c[static_cast<std::size_t>(5 * k1 + k2)];
  }
  return s;
}

std::shared_ptr<const SplineBasis> truth_basis() {
  // interior knots at the N(0, 1) terciles
  constexpr double tercile = 0.4307272992954576;
  static const auto basis =
      std::make_shared<const SplineBasis>(-4.5, 4.5, std::vector<double>{-tercile, tercile}, 3);
  return basis;
}

}  // namespace

LogisticModelSpec example_spec(int example, double rho) {
  if (!(rho > -1.0 && rho < 1.0)) throw ConfigError("rho must lie in (-1, 1)");
  LogisticModelSpec spec;
  spec.name = "example" + std::to_string(example);
  spec.rho = rho;
  switch (example) {
    case 1:
      spec.q = 7;
      spec.linear_predictor = [](std::span<const double> z) {
        return 2 * z[0] + 4 * z[2] + 3 * z[0] * z[2] + 1;
      };
      break;
    case 2:
      spec.q = 7;
      spec.linear_predictor = [](std::span<const double> z) {
        return 3.5 * z[0] + 3 * z[0] * z[1] + 2.5 * z[0] * z[2] + 2 * z[0] * z[3] + 1.5 * z[0] * z[4] +
               z[0] * z[5] + 1;
      };
      break;
    case 3:
      spec.q = 5;
      spec.linear_predictor = [](std::span<const double> z) {
        return 3 * z[0] + 2.5 * z[1] + 2 * z[2] * z[3] + 1.5 * z[3] * z[4] + 1;
      };
      break;
    case 4:
      spec.q = 5;
      spec.linear_predictor = [basis = truth_basis()](std::span<const double> z) {
        const Eigen::VectorXd b1 = basis->evaluate(z[0]);
        const Eigen::VectorXd b2 = basis->evaluate(z[1]);
        return dot5(b1, kEx4Main1) + dot5(b2, kEx4Main2) + dot25(b1, b2, kEx4Pair12) + 1;
      };
      break;
    case 5:
      spec.q = 5;
      spec.linear_predictor = [basis = truth_basis()](std::span<const double> z) {
        const Eigen::VectorXd b1 = basis->evaluate(z[0]);
        const Eigen::VectorXd b2 = basis->evaluate(z[1]);
        const Eigen::VectorXd b3 = basis->evaluate(z[2]);
        const Eigen::VectorXd b5 = basis->evaluate(z[4]);
        return dot5(b1, kEx5Main1) + dot5(b2, kEx5Main2) + dot25(b1, b5, kEx5Pair15) +
               dot25(b2, b3, kEx5Pair23) - 1;
      };
      break;
    default:
      throw ConfigError("unknown example " + std::to_string(example) + " (expected 1-5)");
  }
  return spec;
}

LogisticModelSpec constant_spec(std::size_t q, double rho, double c) {
  LogisticModelSpec spec;
  spec.name = "constant";
  spec.q = q;
  spec.rho = rho;
  spec.linear_predictor = [c](std::span<const double>) { return c; };
  return spec;
}

Eigen::MatrixXd draw_covariates(std::size_t q, double rho, std::size_t n, Rng& rng) {
  std::normal_distribution<double> normal;
  const double innovation = std::sqrt(1.0 - rho * rho);
  Eigen::MatrixXd z(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(q));
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    for (Eigen::Index j = 0; j < z.cols(); ++j) {
      const double e = normal(rng);
      z(i, j) = j == 0 ? e : rho * z(i, j - 1) + innovation * e;
    }
  }
  return z;
}

double logistic(double eta) {
  if (eta >= 0) return 1.0 / (1.0 + std::exp(-eta));
  const double t = std::exp(eta);
  return t / (1.0 + t);
}

Dataset generate_example(const LogisticModelSpec& spec, std::size_t n, std::uint64_t seed,
                         std::uint64_t stream) {
  if (!spec.linear_predictor || spec.q == 0) throw ConfigError("incomplete model spec");
  Rng rng = make_stream(seed, stream, 0x67656e00u);
  Dataset data;
  data.x = draw_covariates(spec.q, spec.rho, n, rng);
  data.y.resize(static_cast<Eigen::Index>(n));
  std::uniform_real_distribution<double> unif;
  std::vector<double> row(spec.q);
  for (Eigen::Index i = 0; i < data.y.size(); ++i) {
    for (std::size_t j = 0; j < spec.q; ++j) row[j] = data.x(i, static_cast<Eigen::Index>(j));
    const double p = logistic(spec.linear_predictor(row));
    data.y[i] = unif(rng) < p ? 1.0 : -1.0;
  }
  return data;
}

double bayes_error(const LogisticModelSpec& spec, std::size_t mc_samples, std::uint64_t seed) {
  if (!spec.linear_predictor || spec.q == 0) throw ConfigError("incomplete model spec");
  if (mc_samples == 0) throw ConfigError("bayes_error needs at least one sample");
  Rng rng = make_stream(seed, 0, 0x62617965u);
  constexpr std::size_t kChunk = 1 << 14;
  std::vector<double> row(spec.q);
  double total = 0.0;
  for (std::size_t done = 0; done < mc_samples; done += kChunk) {
    const std::size_t m = std::min(kChunk, mc_samples - done);
    const Eigen::MatrixXd z = draw_covariates(spec.q, spec.rho, m, rng);
    double chunk = 0.0;
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
      for (std::size_t j = 0; j < spec.q; ++j) row[j] = z(i, static_cast<Eigen::Index>(j));
      const double p = logistic(spec.linear_predictor(row));
      chunk += std::min(p, 1.0 - p);
    }
    total += chunk;
  }
  return total / static_cast<double>(mc_samples);
}

}  // namespace hsvm
