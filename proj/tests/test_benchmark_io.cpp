#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hsvm/artifact.hpp"
#include "hsvm/benchmark.hpp"
#include "hsvm/csv.hpp"
#include "hsvm/error.hpp"
#include "hsvm/evaluation.hpp"
#include "hsvm/feature_expand.hpp"
#include "hsvm/structured_svm.hpp"
#include "hsvm/svm_l1.hpp"
#include "hsvm/simulation.hpp"

using namespace hsvm;

namespace {

BenchmarkConfig tiny(std::vector<std::string> methods) {
  BenchmarkConfig c;
  c.n = 60;
  c.replications = 2;
  c.test_size = 300;
  c.grid_size = 4;
  c.initial_grid_size = 4;
  c.initial_cv_folds = 3;
  c.bayes_samples = 5000;
  c.methods = std::move(methods);
  return c;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("hsvm_test_" + name)).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_SUITE("benchmark") {
  TEST_CASE("config parsing is strict") {
    const auto c = parse_benchmark_config(nlohmann::json::parse(R"({"example": 2, "rho": 0.5, "methods": ["whsvm"]})"));
    CHECK(c.example == 2);
    CHECK(c.rho == 0.5);
    CHECK(c.methods == std::vector<std::string>{"whsvm"});
    CHECK(c.replications == 20);
    try {
      parse_benchmark_config(nlohmann::json::parse(R"({"exmaple": 1})"));
      FAIL("accepted an unknown key");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("exmaple") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_benchmark_config(nlohmann::json::parse(R"({"n": "100"})")), ConfigError);
    CHECK_THROWS_AS(parse_benchmark_config(nlohmann::json::parse(R"({"n": 1})")), ConfigError);
    CHECK_THROWS_AS(parse_benchmark_config(nlohmann::json::parse(R"({"example": 6})")), ConfigError);
    CHECK_THROWS_AS(parse_benchmark_config(nlohmann::json::parse(R"({"rho": 1.0})")), ConfigError);
    CHECK_THROWS_AS(parse_benchmark_config(nlohmann::json::parse(R"({"methods": ["l1", "l1"]})")), ConfigError);
    CHECK_THROWS_AS(parse_benchmark_config(nlohmann::json::parse(R"({"methods": ["lasso"]})")), ConfigError);
    CHECK(parse_benchmark_config(to_json(c)).methods == c.methods);
  }

  TEST_CASE("bundled desk config loads") {
    const auto c = load_benchmark_config(HSVM_SOURCE_DIR "/configs/example1_desk.json");
    CHECK(c.example == 1);
    CHECK(c.seed == 11);
    CHECK(c.methods.size() == 3);
  }

  TEST_CASE("one replicate and one grid point: no spread, error of the single fit") {
    auto c = tiny({"l1"});
    c.replications = 1;
    c.grid_size = 1;
    const auto r = run_benchmark(c);
    const auto& m = r.method("l1");
    REQUIRE(m.errors.size() == 1);
    CHECK(m.std_error == 0.0);
    CHECK(m.mean_error == m.errors[0]);
    // refit by hand on the same streams at the single grid value
    const auto spec = example_spec(1, 0.0);
    const Dataset train = generate_example(spec, c.n, c.seed, 1);
    const Dataset test = generate_example(spec, c.test_size, c.seed, 2);
    const auto ex = expand_polynomial(train.x, true);
    const Eigen::MatrixXd raw = ex.basis.transform(train.x);
    const Standardizer scaler = Standardizer::fit(raw);
    const Dataset design{scaler.apply(raw), train.y};
    const auto fit = fit_l1_svm(design, m.best_tuning[0]);
    const Eigen::VectorXd f = decision_values(fit, scaler.apply(ex.basis.transform(test.x)));
    CHECK(m.errors[0] == generalization_error(f, test.y));
  }

  TEST_CASE("reports are byte-identical across runs and carry a Bayes row") {
    const auto c = tiny({"shsvm", "l1", "l2", "np-whsvm"});
    const auto a = run_benchmark(c);
    const auto b = run_benchmark(c);
    CHECK(to_json(a).dump() == to_json(b).dump());
    const std::string csv = to_csv(a);
    CHECK(csv == to_csv(b));
    std::istringstream lines(csv);
    std::vector<std::string> rows;
    for (std::string l; std::getline(lines, l);) rows.push_back(l);
    REQUIRE(rows.size() == 6);
    CHECK(rows[0] == "method,mean_error,std_error,strong_frequency,weak_frequency");
    CHECK(rows[2].rfind("l1,", 0) == 0);
    CHECK(rows[2].find("/2") != std::string::npos);
    CHECK(rows[5].rfind("Bayes,", 0) == 0);
    for (const auto& m : a.methods) {
      if (m.method.ends_with("hsvm")) {
        CHECK(m.fits > 0);
        CHECK(m.heredity_violations == 0);
      }
    }
    const auto seeded = [&] {
      auto d = c;
      d.seed = 2;
      return run_benchmark(d);
    }();
    CHECK(to_json(seeded).dump() != to_json(a).dump());
    const double pooled = pooled_std_error(a.method("shsvm"), a.method("l1"));
    CHECK(pooled == doctest::Approx(std::hypot(a.method("shsvm").std_error, a.method("l1").std_error)));
    CHECK_THROWS_AS(a.method("garrote"), ConfigError);
  }
}

TEST_SUITE("cli_io") {
  TEST_CASE("CSV parsing") {
    const auto t = parse_csv("a, b ,y\n1,2,1\n\n3,+4.5,-1\n");
    CHECK(t.feature_names == std::vector<std::string>{"a", "b"});
    CHECK(t.features(1, 1) == 4.5);
    CHECK(t.labels[1] == -1);
    const auto z = parse_csv("y,x\n1,0.5\n0,0.25\n");
    CHECK(z.labels[0] == 1);
    CHECK(z.labels[1] == -1);
    try {
      parse_csv("a,y\n1,1\n,1\n", true, "f.csv");
      FAIL("accepted a missing value");
    } catch (const DataError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("f.csv:3") != std::string::npos);
      CHECK(msg.find("'a'") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_csv("a,y\nfoo,1\n"), DataError);
    CHECK_THROWS_AS(parse_csv("a,y\n1,2\n"), DataError);
    CHECK_THROWS_AS(parse_csv("a,y\n1\n"), DataError);
    CHECK_THROWS_AS(parse_csv("a,b\n1,2\n"), DataError);
    CHECK_FALSE(parse_csv("a,b\n1,2\n", false).has_labels());
    CHECK_THROWS_AS(parse_csv("a,a,y\n1,2,1\n"), DataError);
  }

  TEST_CASE("categorical schema") {
    const auto t = parse_csv("race,x,y\n0,1,1\n2,3,-1\n1,0,1\n");
    CsvSchema s;
    s.categorical["race"] = 3;
    CHECK(column_levels(t, s) == std::vector<std::size_t>{3, 0});
    s.categorical["race"] = 2;
    CHECK_THROWS_AS(column_levels(t, s), DataError);
    CsvSchema absent;
    absent.categorical["age"] = 2;
    CHECK_THROWS_AS(column_levels(t, absent), DataError);
  }

  TEST_CASE("grid specs") {
    const auto g = parse_grid("0.01:100:5");
    REQUIRE(g.size() == 5);
    CHECK(g[0] == doctest::Approx(0.01));
    CHECK(g[2] == doctest::Approx(1.0));
    CHECK(g[4] == doctest::Approx(100.0));
    CHECK(parse_grid("0.5,2") == std::vector<double>{0.5, 2.0});
    CHECK_THROWS_AS(parse_grid("1:2"), ConfigError);
    CHECK_THROWS_AS(parse_grid("a,b"), ConfigError);
    CHECK_THROWS_AS(parse_grid("-1,2"), ConfigError);
    CHECK_THROWS_AS(parse_grid(""), ConfigError);
  }

  TEST_CASE("train options are validated") {
    const Dataset d = generate_example(example_spec(1, 0.0), 40, 3);
    std::vector<std::string> names;
    for (int j = 0; j < 7; ++j) names.push_back("z" + std::to_string(j + 1));
    const std::vector<std::size_t> levels(7, 0);
    TrainOptions o;
    o.method = "shsvm";
    CHECK_THROWS_AS(train_model(d, names, levels, o), ConfigError);
    o.lambda = 1.0;
    o.big_m = 1.0;
    CHECK_THROWS_AS(train_model(d, names, levels, o), ConfigError);
    o.big_m.reset();
    o.method = "ridge";
    CHECK_THROWS_AS(train_model(d, names, levels, o), ConfigError);
    o.method = "l1";
    o.lambda.reset();
    o.big_m = 2.0;
    CHECK_THROWS_AS(train_model(d, names, levels, o), ConfigError);
    std::vector<std::size_t> cat(7, 0);
    cat[0] = 2;
    TrainOptions np;
    np.method = "np-l2";
    np.lambda = 1.0;
    CHECK_THROWS_AS(train_model(d, names, cat, np), ConfigError);
  }

  TEST_CASE("artifact round trip reproduces predictions bit for bit") {
    const auto spec = example_spec(1, 0.0);
    const Dataset d = generate_example(spec, 100, 4);
    const Dataset probe = generate_example(spec, 1000, 5);
    std::vector<std::string> names;
    for (int j = 0; j < 7; ++j) names.push_back("z" + std::to_string(j + 1));
    const std::vector<std::size_t> levels(7, 0);
    const std::string path = temp_path("model.json");
    for (const std::string method : {"shsvm", "whsvm", "l1", "l2", "garrote"}) {
      TrainOptions o;
      o.method = method;
      o.lambda = method == "l2" ? 0.5 : 2.0;
      const ModelArtifact m = train_model(d, names, levels, o);
      save_artifact(m, path);
      const ModelArtifact back = load_artifact(path);
      const Eigen::VectorXd f1 = decision_values(m, probe.x);
      const Eigen::VectorXd f2 = decision_values(back, probe.x);
      CHECK_MESSAGE((f1.array() == f2.array()).all(), method);
      CHECK(predict(m, probe.x) == predict(back, probe.x));
      CHECK(to_json(back).dump() == to_json(m).dump());
    }
    TrainOptions np;
    np.method = "np-shsvm";
    np.big_m = 3.0;
    const Dataset dq = generate_example(example_spec(4, 0.0), 100, 6);
    const Dataset pq = generate_example(example_spec(4, 0.0), 1000, 7);
    std::vector<std::string> n5(names.begin(), names.begin() + 5);
    const ModelArtifact m = train_model(dq, n5, std::vector<std::size_t>(5, 0), np);
    save_artifact(m, path);
    const ModelArtifact back = load_artifact(path);
    CHECK((decision_values(m, pq.x).array() == decision_values(back, pq.x).array()).all());
    std::remove(path.c_str());
  }

  TEST_CASE("malformed artifacts") {
    CHECK_THROWS_AS(artifact_from_json(nlohmann::json::parse(R"({"format": "other"})")), DataError);
    CHECK_THROWS_AS(artifact_from_json(nlohmann::json::parse(R"({"format": "hsvm-model", "version": 99})")), DataError);
    CHECK_THROWS_AS(artifact_from_json(nlohmann::json::parse(R"({"format": "hsvm-model", "version": 1})")), DataError);
    CHECK_THROWS_AS(load_artifact(temp_path("does_not_exist.json")), DataError);
  }

  TEST_CASE("written CSV reads back exactly") {
    const Dataset d = generate_example(example_spec(2, 0.5), 50, 8);
    const std::string path = temp_path("data.csv");
    std::vector<std::string> names;
    for (int j = 0; j < 7; ++j) names.push_back("z" + std::to_string(j + 1));
    write_csv(path, names, d.x, d.y);
    const auto t = read_csv(path);
    CHECK(t.feature_names == names);
    CHECK(t.features == d.x);
    CHECK(t.labels == d.y);
    std::remove(path.c_str());
    CHECK(slurp(path).empty());
  }
}
