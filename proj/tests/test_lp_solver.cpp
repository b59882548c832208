#include <doctest.h>

#include <random>

#include "hsvm/error.hpp"
#include "hsvm/lp_solver.hpp"
#include "oracles.hpp"

using hsvm::LinearProgram;
using hsvm::LpStatus;
using hsvm::Relation;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

}  // namespace

TEST_SUITE("lp_solver") {
  TEST_CASE("textbook maximisation") {
    // max 3x + 5y st x <= 4, 2y <= 12, 3x + 2y <= 18  ->  36 at (2, 6)
    LinearProgram lp(2);
    lp.objective = vec({-3, -5});
    lp.add_constraint(vec({1, 0}), Relation::less_equal, 4);
    lp.add_constraint(vec({0, 2}), Relation::less_equal, 12);
    lp.add_constraint(vec({3, 2}), Relation::less_equal, 18);
    const auto s = hsvm::solve_lp(lp);
    REQUIRE(s.status == LpStatus::optimal);
    CHECK(s.objective_value == doctest::Approx(-36).epsilon(1e-12));
    CHECK(s.values[0] == doctest::Approx(2));
    CHECK(s.values[1] == doctest::Approx(6));
    CHECK(s.duality_gap_bound < 1e-9);
    // shadow prices of the binding rows
    CHECK(s.duals[1] == doctest::Approx(-1.5));
    CHECK(s.duals[2] == doctest::Approx(-1.0));
  }

  TEST_CASE("greater-equal rows and equalities need phase one") {
    // min x + y st x + y >= 2, x - y = 0
    LinearProgram lp(2);
    lp.objective = vec({1, 1});
    lp.add_constraint(vec({1, 1}), Relation::greater_equal, 2);
    lp.add_constraint(vec({1, -1}), Relation::equal, 0);
    const auto s = hsvm::solve_lp(lp);
    REQUIRE(s.status == LpStatus::optimal);
    CHECK(s.objective_value == doctest::Approx(2));
    CHECK(s.values[0] == doctest::Approx(1));
    CHECK(hsvm::check_feasible(lp, s.values, 1e-9));
  }

  TEST_CASE("free variables") {
    // min x st x >= -5, x free
    LinearProgram lp(1);
    lp.nonneg[0] = false;
    lp.objective = vec({1});
    lp.add_constraint(vec({1}), Relation::greater_equal, -5);
    const auto s = hsvm::solve_lp(lp);
    REQUIRE(s.status == LpStatus::optimal);
    CHECK(s.values[0] == doctest::Approx(-5));
  }

  TEST_CASE("infeasible and unbounded programs are reported") {
    LinearProgram bad(1);
    bad.objective = vec({1});
    bad.add_constraint(vec({1}), Relation::less_equal, 1);
    bad.add_constraint(vec({1}), Relation::greater_equal, 2);
    CHECK(hsvm::solve_lp(bad).status == LpStatus::infeasible);

    LinearProgram open(2);
    open.objective = vec({-1, 0});
    open.add_constraint(vec({1, -1}), Relation::less_equal, 1);
    CHECK(hsvm::solve_lp(open).status == LpStatus::unbounded);
  }

  TEST_CASE("degenerate program that cycles under naive pricing terminates") {
    // Beale's example
    LinearProgram lp(4);
    lp.objective = vec({-0.75, 150, -0.02, 6});
    lp.add_constraint(vec({0.25, -60, -0.04, 9}), Relation::less_equal, 0);
    lp.add_constraint(vec({0.5, -90, -0.02, 3}), Relation::less_equal, 0);
    lp.add_constraint(vec({0, 0, 1, 0}), Relation::less_equal, 1);
    const auto s = hsvm::solve_lp(lp);
    REQUIRE(s.status == LpStatus::optimal);
    CHECK(s.objective_value == doctest::Approx(-0.05));
  }

  TEST_CASE("malformed programs and dimension errors throw") {
    LinearProgram lp(2);
    lp.add_constraint(vec({1}), Relation::less_equal, 1);
    CHECK_THROWS_AS(hsvm::validate_program(lp), hsvm::MalformedProgram);
    CHECK_THROWS_AS(hsvm::solve_lp(lp), hsvm::MalformedProgram);
    LinearProgram ok(2);
    CHECK_THROWS_AS(hsvm::check_feasible(ok, vec({1}), 1e-9), hsvm::DimensionMismatch);
    LinearProgram nan(1);
    nan.objective[0] = std::nan("");
    CHECK_THROWS_AS(hsvm::solve_lp(nan), hsvm::MalformedProgram);
  }

  TEST_CASE("pivot limit") {
    LinearProgram lp(2);
    lp.objective = vec({-1, -1});
    lp.add_constraint(vec({1, 2}), Relation::less_equal, 4);
    lp.add_constraint(vec({3, 1}), Relation::less_equal, 6);
    hsvm::SolverOptions o;
    o.max_pivots = 1;
    CHECK_THROWS_AS(hsvm::solve_lp(lp, o), hsvm::MaxPivotsExceeded);
  }

  TEST_CASE("random small programs match vertex enumeration") {
    std::mt19937_64 rng(20240611);
    for (int t = 0; t < 100; ++t) {
      const LinearProgram lp = oracle::random_bounded_lp(rng, t % 2 == 1);
      const auto want = oracle::vertex_enumeration(lp);
      REQUIRE(want.has_value());
      const auto got = hsvm::solve_lp(lp);
      REQUIRE(got.status == LpStatus::optimal);
      CHECK(std::abs(got.objective_value - *want) <= 1e-8 * std::max(1.0, std::abs(*want)));
      CHECK(hsvm::check_feasible(lp, got.values, 1e-8));
      CHECK(got.duality_gap_bound <= 1e-8 * std::max(1.0, std::abs(*want)));
    }
  }
}
