#include <doctest.h>

#include <random>

#include "hsvm/error.hpp"
#include "hsvm/feature_expand.hpp"
#include "hsvm/heredity.hpp"
#include "hsvm/structured_svm.hpp"
#include "oracles.hpp"

using namespace hsvm;

TEST_SUITE("feature_expand") {
  TEST_CASE("q = 7 with quadratics gives 35 effects in canonical order") {
    const auto ex = expand_polynomial(7, true);
    REQUIRE(ex.basis.num_effects() == 35);
    CHECK(ex.basis.num_columns() == 35);
    CHECK(ex.basis.effect_name(0) == "z1");
    CHECK(ex.basis.effect_name(7) == "z1*z2");
    CHECK(ex.basis.effect_name(8) == "z1*z3");
    CHECK(ex.basis.effect_name(27) == "z6*z7");
    CHECK(ex.basis.effect_name(28) == "z1^2");
    CHECK(ex.graph.parents[8] == std::vector<std::size_t>{0, 2});
    CHECK(ex.graph.parents[28] == std::vector<std::size_t>{0});
    CHECK(validate_heredity_graph(ex.graph));
  }

  TEST_CASE("q = 5 without quadratics gives 15 effects") {
    CHECK(expand_polynomial(5, false).basis.num_effects() == 15);
  }

  TEST_CASE("transform computes products and squares") {
    const auto ex = expand_polynomial(3, true);
    Eigen::MatrixXd raw(1, 3);
    raw << 2, -3, 5;
    const Eigen::MatrixXd d = ex.basis.transform(raw);
    REQUIRE(d.cols() == 9);
    CHECK(d(0, 3) == 2 * -3);
    CHECK(d(0, 4) == 2 * 5);
    CHECK(d(0, 5) == -3 * 5);
    CHECK(d(0, 6) == 4);
    CHECK(d(0, 8) == 25);
    CHECK_THROWS_AS(ex.basis.transform(Eigen::MatrixXd::Zero(1, 2)), DimensionMismatch);
  }

  TEST_CASE("dummy coding shares one effect per factor") {
    Eigen::MatrixXd raw(4, 2);
    raw << 0.5, 0, 1.5, 1, -1.0, 2, 0.0, 1;
    const auto ex = expand_with_dummies(raw, {0, 3}, true, {"age", "race"});
    const auto& b = ex.basis;
    // age, race (2 dummies), age*race (2 columns), age^2 ; no race^2
    REQUIRE(b.num_effects() == 4);
    CHECK(b.num_columns() == 1 + 2 + 2 + 1);
    CHECK(b.effects()[1].group_id == std::optional<std::string>("race"));
    CHECK(b.effects()[2].group_id == std::optional<std::string>("race"));
    const Eigen::MatrixXd d = b.transform(raw);
    // row 1: race level 1 -> (1, 0); row 2: level 2 -> (0, 1); reference level 0 -> (0, 0)
    CHECK(d(1, 1) == 1);
    CHECK(d(1, 2) == 0);
    CHECK(d(2, 2) == 1);
    CHECK(d(0, 1) == 0);
    CHECK(d(0, 2) == 0);
    CHECK(d(1, 3) == doctest::Approx(1.5));
    CHECK(b.effect_name(3) == "age^2");
    Eigen::MatrixXd bad = raw;
    bad(0, 1) = 3;
    CHECK_THROWS_AS(b.transform(bad), DataError);
    bad(0, 1) = 0.5;
    CHECK_THROWS_AS(b.transform(bad), DataError);
    CHECK_THROWS_AS(expand_with_dummies(raw, {0, 1}), DataError);
  }

  TEST_CASE("standardizer uses the sample standard deviation and keeps constants") {
    Eigen::MatrixXd x(4, 2);
    x << 1, 7, 2, 7, 3, 7, 4, 7;
    const auto s = Standardizer::fit(x);
    CHECK(s.mean[0] == doctest::Approx(2.5));
    CHECK(s.scale[0] == doctest::Approx(std::sqrt(5.0 / 3.0)));
    CHECK(s.scale[1] == 1.0);
    const Eigen::MatrixXd z = s.apply(x);
    CHECK(z.col(1).cwiseAbs().maxCoeff() == 0.0);
    CHECK(z.col(0).sum() == doctest::Approx(0.0));
  }

  TEST_CASE("strong heredity over the q = 7 expansion has 49 rows, weak has 28") {
    const auto ex = expand_polynomial(7, true);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd scores(12, 35);
    for (Eigen::Index i = 0; i < scores.size(); ++i) scores.data()[i] = normal(rng);
    Eigen::VectorXd y(12);
    for (int i = 0; i < 12; ++i) y[i] = i % 2 ? 1 : -1;
    CHECK(compile_structured_lp(scores, y, ex.basis.heredity_graph(HeredityPolicy::strong), Penalty::lagrangian(1))
              .num_heredity_rows == 49);
    CHECK(compile_structured_lp(scores, y, ex.basis.heredity_graph(HeredityPolicy::weak), Penalty::lagrangian(1))
              .num_heredity_rows == 28);
    CHECK(compile_structured_lp(scores, y, ex.basis.heredity_graph(HeredityPolicy::none), Penalty::lagrangian(1))
              .num_heredity_rows == 0);
  }
}

TEST_SUITE("heredity") {
  TEST_CASE("graph validation finds cycles and dangling parents") {
    HeredityGraph g{{{}, {0}, {1}}, HeredityPolicy::strong};
    CHECK(validate_heredity_graph(g));
    g.parents[0] = {2};
    const auto cyc = validate_heredity_graph(g);
    CHECK_FALSE(cyc);
    CHECK_FALSE(cyc.problems.empty());
    HeredityGraph dangling{{{}, {7}}, HeredityPolicy::weak};
    CHECK_FALSE(validate_heredity_graph(dangling));
  }

  TEST_CASE("selection predicates") {
    const auto ex = expand_polynomial(3, false);  // z1 z2 z3 z1z2 z1z3 z2z3
    const auto& g = ex.graph;
    std::vector<bool> none(6, false);
    CHECK(obeys_heredity(g, none, HeredityPolicy::strong));
    std::vector<bool> orphan{false, false, false, true, false, false};
    CHECK_FALSE(obeys_heredity(g, orphan, HeredityPolicy::strong));
    CHECK_FALSE(obeys_heredity(g, orphan, HeredityPolicy::weak));
    std::vector<bool> half{true, false, false, true, false, false};
    CHECK_FALSE(obeys_heredity(g, half, HeredityPolicy::strong));
    CHECK(obeys_heredity(g, half, HeredityPolicy::weak));
    CHECK(obeys_heredity(g, orphan, HeredityPolicy::none));
  }

  TEST_CASE("selection predicate agrees with a second implementation on random sets") {
    const auto ex = expand_polynomial(7, true);
    std::mt19937_64 rng(11);
    std::bernoulli_distribution on(0.25);
    for (int t = 0; t < 2000; ++t) {
      std::vector<bool> a(35);
      for (std::size_t j = 0; j < 35; ++j) a[j] = on(rng);
      for (auto p : {HeredityPolicy::strong, HeredityPolicy::weak}) {
        CHECK(obeys_heredity(ex.graph, a, p) == oracle::obeys(ex.graph, a, p));
      }
    }
  }

  TEST_CASE("numerical violation counts") {
    HeredityGraph g{{{}, {}, {0, 1}}, HeredityPolicy::strong};
    Eigen::VectorXd theta(3);
    theta << 1.0, 0.5, 0.7;
    CHECK(count_heredity_violations(g, theta, HeredityPolicy::strong) == 1);
    CHECK(count_heredity_violations(g, theta, HeredityPolicy::weak) == 0);
    theta << 0.0, 0.0, 1e-9;
    CHECK(count_heredity_violations(g, theta, HeredityPolicy::strong) == 0);
    CHECK(parse_policy("weak") == HeredityPolicy::weak);
    CHECK_THROWS(parse_policy("medium"));
  }
}
