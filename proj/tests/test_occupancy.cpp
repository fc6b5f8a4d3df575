#include "doctest.h"

#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

#include "bsieve/occupancy.hpp"
#include "bsieve/renewal.hpp"
#include "bsieve/stats.hpp"

using namespace bsieve;

TEST_CASE("default threshold") {
  const double ln = 100.0;
  CHECK(default_log_threshold(ln) == doctest::Approx(-(ln + 2.0 * std::log(ln))));
}

TEST_CASE("level index is robust to rounding in j u") {
  CHECK(level_of(5, 0.6) == 3);
  CHECK(level_of(10, 0.3) == 3);
  CHECK(level_of(7, 1.0) == 7);
  CHECK(level_of(3, 0.5) == 1);
  CHECK(level_of(1, 0.6) == 0);
}

TEST_CASE("tree mass conservation and structure") {
  const auto p = ModelParams::stable(0.5, 1.0);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto tree = expand_tree(p, 3, -30.0, Stream(seed));
    REQUIRE(tree.levels.size() == 4);
    REQUIRE(tree.size(0) == 1);
    for (int j = 0; j <= 3; ++j)
      REQUIRE(tree.retained_mass(j) + tree.pruned_mass(j) == doctest::Approx(1.0).epsilon(1e-9));
    for (int j = 1; j <= 3; ++j) {
      REQUIRE(tree.pruned_mass(j) >= tree.pruned_mass(j - 1) - 1e-15);
      for (const auto& v : tree.levels[j]) {
        REQUIRE(v.neglog <= tree.neglog_cut());
        REQUIRE(v.parent < tree.size(j - 1));
        REQUIRE(v.neglog >= tree.levels[j - 1][v.parent].neglog);  // weights shrink down the tree
      }
    }
  }
}

TEST_CASE("trees at a lower threshold extend the coarse tree") {
  const auto p = ModelParams::gamma_mixture(0.5, 1.0, 2.0);
  const Stream rng(5);
  const auto coarse = expand_tree(p, 2, -20.0, rng);
  const auto fine = expand_tree(p, 2, -25.0, rng);
  for (int j = 1; j <= 2; ++j) {
    std::multiset<double> have;
    for (const auto& v : fine.levels[j]) have.insert(v.neglog);
    for (const auto& v : coarse.levels[j]) REQUIRE(have.count(v.neglog) > 0);
    CHECK(fine.size(j) >= coarse.size(j));
  }
}

TEST_CASE("node cap") {
  const auto p = ModelParams::stable(0.5, 1.0);
  CHECK_THROWS_AS(expand_tree(p, 3, -2000.0, Stream(1), 1000), std::length_error);
}

TEST_CASE("occupancy counts are monotone across levels and bounded by n") {
  const auto p = ModelParams::stable(0.5, 1.0);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const double ln = std::log(5000.0);
    const auto tree = expand_tree(p, 3, default_log_threshold(ln), Stream(seed));
    const auto ex = throw_balls_exact(tree, 5000, Stream(seed).derive(9));
    const auto po = occupancy_poissonized(tree, ln);
    for (const auto* r : {&ex, &po}) {
      REQUIRE(r->counts.size() == 3);
      REQUIRE(r->K(1) >= 1);
      REQUIRE(r->K(1) <= r->K(2));
      REQUIRE(r->K(2) <= r->K(3));
    }
    REQUIRE(ex.K(3) <= 5000);
    CHECK(ex.mode == OccupancyMode::ExactBalls);
    CHECK(po.mode == OccupancyMode::Poissonized);
  }
}

TEST_CASE("pruning bias bound covers the change from a ten times lower threshold") {
  const auto p = ModelParams::stable(0.5, 1.0);
  const double ln = 20.0;
  std::vector<double> gap, bound;
  for (std::uint64_t r = 0; r < 300; ++r) {
    const Stream s(77, r);
    const auto coarse = expand_tree(p, 2, default_log_threshold(ln), s);
    const auto fine = expand_tree(p, 2, default_log_threshold(ln) - std::log(10.0), s);
    const auto a = occupancy_poissonized(coarse, ln), b = occupancy_poissonized(fine, ln);
    // the fine tree holds every coarse leaf with the same uniform, so counts can only grow
    REQUIRE(b.K(2) >= a.K(2));
    gap.push_back(static_cast<double>(b.K(2) - a.K(2)));
    bound.push_back(a.pruned_bias_bound[1]);
  }
  CHECK(stats::mean(gap) <= stats::mean(bound) + 4.0 * stats::std_error(gap));
}

TEST_CASE("mean level counts against grid convolution powers") {
  const auto p = ModelParams::stable(0.5, 1.0);
  const double t = 30.0;
  std::vector<double> n1, n2, n3;
  for (std::uint64_t r = 0; r < 1500; ++r) {
    const auto tree = expand_tree(p, 3, -t, Stream(123, r));
    const auto n = count_N_j(tree, t);
    n1.push_back(static_cast<double>(n[0]));
    n2.push_back(static_cast<double>(n[1]));
    n3.push_back(static_cast<double>(n[2]));
  }
  EstimateOptions opt;
  opt.n_replicas = 40000;
  const auto V = estimate_V(p, t, t / 2048, opt, Stream(124));
  const auto powers = convolution_powers(V, 3);
  const std::vector<double>* samples[] = {&n1, &n2, &n3};
  for (int j = 1; j <= 3; ++j) {
    const auto& s = *samples[j - 1];
    const double grid = powers[j - 1].values.back(), gse = powers[j - 1].std_error.back();
    CHECK(std::abs(stats::mean(s) - grid) <= 4.0 * std::hypot(stats::std_error(s), gse) + 0.01 * grid);
  }
}

TEST_CASE("count_N_j refuses times beyond the pruning cut") {
  const auto tree = expand_tree(ModelParams::stable(0.5, 1.0), 1, -10.0, Stream(3));
  CHECK_THROWS(count_N_j(tree, 11.0));
  CHECK_NOTHROW(count_N_j(tree, 10.0));
}

TEST_CASE("normalized count") {
  const auto p = ModelParams::stable(0.5, 1.0);
  const auto k = constants(p);
  OccupancyResult r;
  r.log_n = 100.0;
  r.counts = {8, 40};
  // level 2 for j = 2, u = 1: c 2^alpha K(2) / (rho_1 (log n)^(2 alpha))
  const double expect = std::sqrt(2.0) * 40.0 / (k.rho(1) * 100.0);
  CHECK(normalize_counts(r, p, k, 2, 1.0) == doctest::Approx(expect));
  r.counts = {0, 0};
  CHECK(normalize_counts(r, p, k, 2, 1.0) == 0.0);
  CHECK_THROWS(normalize_counts(r, p, k, 5, 1.0));
}
