#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "bsieve/harness.hpp"

using namespace bsieve;

TEST_CASE("ks of interleaved samples") {
  SampleSet a{"a", {1.0, 3.0}, 0, 2, {}}, b{"b", {2.0, 4.0}, 0, 2, {}};
  CHECK(ks_two_sample(a, b) == doctest::Approx(0.5));
  CHECK(ks_two_sample(a, a) == 0.0);
  SampleSet bad{"bad", {1.0, NAN}, 0, 2, {}};
  CHECK_THROWS(ks_two_sample(a, bad));
  SampleSet empty{"e", {}, 0, 0, {}};
  CHECK_THROWS(ks_two_sample(a, empty));
}

TEST_CASE("default levels follow (log n)^0.3") {
  ExperimentConfig cfg;
  CHECK(cfg.j_for(0) == 3);  // 50^0.3 = 3.23
  CHECK(cfg.j_for(1) == 4);  // 150^0.3 = 4.5
  CHECK(cfg.j_for(2) == 6);  // 400^0.3 = 6.03
  cfg.j_list = {2, 2, 2};
  CHECK(cfg.j_for(2) == 2);
}

TEST_CASE("config validation") {
  ExperimentConfig cfg;
  CHECK_NOTHROW(cfg.validate(true));
  auto c = cfg;
  c.j_list = {20, 20, 20};
  CHECK_THROWS_AS(c.validate(true), std::invalid_argument);
  c = cfg;
  c.u_list = {0.1};  // floor(3 * 0.1) = 0
  CHECK_THROWS(c.validate(true));
  c = cfg;
  c.replicas = 10;
  CHECK_THROWS(c.validate(false));
  c = cfg;
  c.j = 50;
  const auto w = c.validate(false);  // t-based experiments only warn
  CHECK_FALSE(w.empty());
}

TEST_CASE("threshold rules") {
  CHECK(threshold_from_rule("default", 100.0) == doctest::Approx(-(100.0 + 2.0 * std::log(100.0))));
  CHECK(threshold_from_rule("offset:2.5", 100.0) == doctest::Approx(-(102.5 + 2.0 * std::log(100.0))));
  CHECK_THROWS(threshold_from_rule("bogus", 100.0));
}

TEST_CASE("config hash ignores workers and output location") {
  ExperimentConfig a, b;
  b.workers = 16;
  b.out_dir = "elsewhere";
  b.format = "json";
  CHECK(a.hash() == b.hash());
  b.seed += 1;
  CHECK(a.hash() != b.hash());
  ExperimentConfig c;
  c.u_list = {1.0};
  CHECK(a.hash() != c.hash());
}

TEST_CASE("empty report emits a header-only csv") {
  Report r;
  r.experiment = "empty";
  CHECK(to_csv(r) == "experiment,scale,j,u,replica,value\n");
  CHECK(r.ok());
  r.check("x", "always", false, 1.5);
  CHECK_FALSE(r.ok());
  const Json j = to_json(r);
  CHECK(j["checks"][0]["name"] == "x");
  CHECK(j["checks"][0]["measured"] == 1.5);
}

TEST_CASE("emit writes the requested formats") {
  const auto dir = std::filesystem::temp_directory_path() / "bsieve_emit_test";
  std::filesystem::remove_all(dir);
  Report r;
  r.experiment = "demo";
  r.rows.push_back({"demo", 50.0, 3, 0.6, 0, 0.1});
  emit(r, dir.string(), "csv");
  CHECK(std::filesystem::exists(dir / "demo.csv"));
  CHECK_FALSE(std::filesystem::exists(dir / "demo.json"));
  emit(r, dir.string(), "both");
  CHECK(std::filesystem::exists(dir / "demo.json"));
  std::ifstream in(dir / "demo.csv");
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == "experiment,scale,j,u,replica,value\ndemo,50,3,0.59999999999999998,0,0.10000000000000001\n");
  std::filesystem::remove_all(dir);
}

TEST_CASE("unknown experiment names") { CHECK_FALSE(run_named("nope", ExperimentConfig{}).has_value()); }

TEST_CASE("theorem runs refuse the Pareto stress case") {
  ExperimentConfig cfg;
  cfg.params = ModelParams::pareto(0.5, 1.0);
  CHECK_THROWS(run_theorem_main(cfg));
}

TEST_CASE("reduced experiment runs are reproducible") {
  ExperimentConfig cfg;
  cfg.replicas = 100;
  cfg.limit_samples = 100;
  cfg.log_n_list = {20.0, 30.0};
  cfg.log2_points = 10;
  const auto a = run_theorem_main(cfg), b = run_theorem_main(cfg);
  CHECK(to_csv(a) == to_csv(b));
  CHECK(to_json(a).dump() == to_json(b).dump());
  CHECK(a.rows.size() == 2 * 2 * 100);
}
