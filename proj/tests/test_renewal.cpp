#include "doctest.h"

#include <cmath>
#include <sstream>

#include "bsieve/perturbed_walk.hpp"
#include "bsieve/renewal.hpp"
#include "bsieve/stats.hpp"

using namespace bsieve;

namespace {

// xi uniform on {1, 2}, eta = 1/2. The walk lives on the integers, so U is exact by recursion.
WPair toy_pair(Stream& rng) { return {rng.uniform() < 0.5 ? 1.0 : 2.0, 0.5, 0.0}; }

// U(x) = sum_i P{S_i <= x} for the toy walk.
double toy_U(double x) {
  if (x < 0) return 0.0;
  const int top = static_cast<int>(std::floor(x));
  // p[m] = P{walk ever visits m} = expected visits, since the walk is strictly increasing
  std::vector<double> p(top + 1, 0.0);
  p[0] = 1.0;
  for (int m = 1; m <= top; ++m) p[m] = 0.5 * p[m - 1] + (m >= 2 ? 0.5 * p[m - 2] : 0.0);
  double s = 0.0;
  for (double v : p) s += v;
  return s;
}

// V_j by brute force: T-points of the toy walk sit at integer + 1/2, so V = U(. - 1/2), and V_j is
// a lattice convolution of point masses.
std::vector<double> toy_point_masses(int top) {
  std::vector<double> p(top + 1, 0.0);
  p[0] = 1.0;
  for (int m = 1; m <= top; ++m) p[m] = 0.5 * p[m - 1] + (m >= 2 ? 0.5 * p[m - 2] : 0.0);
  return p;  // mass of V at m + 1/2
}

double toy_Vj(int j, double t) {
  // V_j has mass at m + j/2 equal to the j-fold lattice convolution of p.
  const int top = static_cast<int>(std::floor(t)) + 2;
  const auto p = toy_point_masses(top);
  std::vector<double> q = p;
  for (int k = 2; k <= j; ++k) {
    std::vector<double> r(top + 1, 0.0);
    for (int a = 0; a <= top; ++a)
      for (int b = 0; a + b <= top; ++b) r[a + b] += q[a] * p[b];
    q = r;
  }
  double s = 0.0;
  for (int m = 0; m <= top; ++m)
    if (m + 0.5 * j <= t) s += q[m];
  return s;
}

GridFunction linear(double step, std::size_t points) {
  GridFunction g;
  g.step = step;
  for (std::size_t m = 0; m < points; ++m) g.values.push_back(step * static_cast<double>(m));
  return g;
}

}  // namespace

TEST_CASE("walk path structure") {
  const auto p = ModelParams::stable(0.5, 1.0);
  Stream rng(11);
  for (int r = 0; r < 200; ++r) {
    const WalkPath w = generate_walk(p, 50.0, rng);
    REQUIRE(w.s_values.front() == 0.0);
    REQUIRE(w.s_values.back() > 50.0);
    for (std::size_t k = 1; k + 1 < w.s_values.size(); ++k) REQUIRE(w.s_values[k] <= 50.0);
    for (std::size_t k = 1; k < w.s_values.size(); ++k) REQUIRE(w.s_values[k] > w.s_values[k - 1]);
    for (double t : w.t_values) REQUIRE(t <= 50.0);
    REQUIRE(count_N(w, 50.0) == w.t_values.size());
    REQUIRE(count_N(w, 10.0) <= count_N(w, 20.0));
  }
  const WalkPath w = generate_walk(p, 5.0, rng);
  CHECK_THROWS_WITH(count_N(w, 6.0), doctest::Contains("beyond horizon"));
}

TEST_CASE("weighted sum with V_0 = 1 counts the walk points") {
  const auto p = ModelParams::gamma_mixture(0.5, 1.0, 2.0);
  Stream rng(12);
  const auto one = GridFunction::constant_one(0.5, 201);
  for (int r = 0; r < 100; ++r) {
    const WalkPath w = generate_walk(p, 100.0, rng);
    for (double t : {10.0, 55.0, 100.0})
      REQUIRE(weighted_sum_statistic(w, one, t) == doctest::Approx(static_cast<double>(count_N(w, t))));
  }
}

TEST_CASE("grid U and V against the exact toy renewal function") {
  EstimateOptions opt;
  opt.n_replicas = 40000;
  const Stream rng(13);
  const auto U = estimate_U(toy_pair, 12.0, 0.25, opt, rng);
  const auto V = estimate_V(toy_pair, 12.0, 0.25, opt, rng.derive(1));
  for (double t : {0.25, 1.25, 3.75, 7.5, 11.75}) {
    const auto m = static_cast<std::size_t>(std::llround(t / 0.25));
    CHECK(std::abs(U.values[m] - toy_U(t)) <= 4.0 * U.se_at(m) + 1e-12);
    CHECK(std::abs(V.values[m] - toy_U(t - 0.5)) <= 4.0 * V.se_at(m) + 1e-12);
  }
  CHECK(U.values[0] == 1.0);  // S_0 = 0 always counts
  CHECK(V.values[0] == 0.0);  // eta > 0
}

TEST_CASE("convolution powers of the toy V against lattice convolution") {
  EstimateOptions opt;
  opt.n_replicas = 40000;
  const auto V = estimate_V(toy_pair, 12.0, 0.125, opt, Stream(14));
  const auto powers = convolution_powers(V, 3);
  REQUIRE(powers.size() == 3);
  // Atoms of V_j sit at m + j/2, on grid points, and the midpoint rule spreads each over up to j/2
  // cells to its left. Halfway between atoms the grid value is exact up to noise.
  for (int j = 2; j <= 3; ++j)
    for (double t0 : {4.0, 8.0, 10.0}) {
      const double t = t0 + 0.5 * (j + 1) - std::floor(0.5 * (j + 1));
      const auto m = static_cast<std::size_t>(std::llround(t / 0.125));
      const double exact = toy_Vj(j, t);
      CHECK(std::abs(powers[j - 1].values[m] - exact) <= 4.0 * powers[j - 1].se_at(m) + 1e-9);
    }
}

TEST_CASE("convolution of t with t is t^2 / 2") {
  const auto a = linear(0.01, 1001);
  const auto c = convolve(a, a);
  for (std::size_t m = 0; m < c.values.size(); m += 97) {
    const double t = 0.01 * static_cast<double>(m);
    CHECK(c.values[m] == doctest::Approx(0.5 * t * t).epsilon(1e-9));
  }
}

TEST_CASE("V_0 = 1 is the convolution identity and the product commutes") {
  GridFunction a;
  a.step = 0.05;
  for (int m = 0; m <= 400; ++m) a.values.push_back(std::sqrt(0.05 * m) + 0.3);
  GridFunction b;
  b.step = 0.05;
  for (int m = 0; m <= 400; ++m) b.values.push_back(1.0 - std::exp(-0.05 * m));
  const auto ident = convolve(a, GridFunction::constant_one(0.05, 401));
  for (std::size_t m = 0; m < a.values.size(); ++m) REQUIRE(ident.values[m] == doctest::Approx(a.values[m]));
  const auto ab = convolve(a, b), ba = convolve(b, a);
  for (std::size_t m = 20; m < a.values.size(); m += 20) CHECK(ab.values[m] == doctest::Approx(ba.values[m]).epsilon(0.01));
  b.step = 0.1;
  CHECK_THROWS_WITH(convolve(a, b), doctest::Contains("step mismatch"));
}

TEST_CASE("mean of N(t) over walks matches grid V") {
  const auto p = ModelParams::stable(0.5, 1.0);
  EstimateOptions opt;
  opt.n_replicas = 20000;
  const auto V = estimate_V(p, 100.0, 100.0 / 1024, opt, Stream(15));
  Stream rng(16);
  std::vector<double> n50(20000), n100(20000);
  for (std::size_t r = 0; r < n50.size(); ++r) {
    const WalkPath w = generate_walk(p, 100.0, rng);
    n50[r] = static_cast<double>(count_N(w, 50.0));
    n100[r] = static_cast<double>(count_N(w, 100.0));
  }
  CHECK(std::abs(stats::mean(n50) - V.at(50.0)) <= 4.0 * std::hypot(stats::std_error(n50), V.se_at(512)));
  CHECK(std::abs(stats::mean(n100) - V.at(100.0)) <= 4.0 * std::hypot(stats::std_error(n100), V.se_at(1024)));
}

TEST_CASE("grid estimates do not depend on the worker count") {
  const auto p = ModelParams::stable(0.6, 1.0);
  EstimateOptions opt;
  opt.n_replicas = 2000;
  const auto a = estimate_V(p, 50.0, 0.5, opt, Stream(17));
  opt.workers = 7;
  const auto b = estimate_V(p, 50.0, 0.5, opt, Stream(17));
  CHECK(a.values == b.values);
  CHECK(a.std_error == b.std_error);
}

TEST_CASE("transform of a grid with one atom") {
  GridFunction g;
  g.step = 0.1;
  g.values.assign(11, 2.0);  // atom of mass 2 at 0
  CHECK(stieltjes_laplace(g, 3.0) == doctest::Approx(2.0));
}

TEST_CASE("eta transform is a probability transform") {
  for (const auto& p : {ModelParams::stable(0.5, 1.0), ModelParams::gamma_mixture(0.5, 1.0, 2.0)}) {
    CHECK(laplace_eta(p, 0.0) == doctest::Approx(1.0));
    double prev = 1.0;
    for (double s : {0.25, 0.5, 1.0, 2.0, 4.0}) {
      const double v = laplace_eta(p, s);
      CHECK(v < prev);
      CHECK(v > 0.0);
      prev = v;
    }
    // monte carlo: E (1 - W)^s with W = exp(-xi)
    const XiSampler xi(p);
    Stream rng(18);
    std::vector<double> d(100000);
    for (double& x : d) x = -std::expm1(-xi(rng));
    CHECK(std::abs(stats::mean(d) - laplace_eta(p, 1.0)) <= 4.0 * stats::std_error(d));
  }
}

TEST_CASE("two-term fit and bound pieces") {
  GridFunction g;
  g.step = 1.0;
  for (int m = 0; m <= 100; ++m) g.values.push_back(0.6 * std::sqrt(m) + 0.4);
  CHECK(fit_two_term(g, 0.6, 0.5, 0.0) == doctest::Approx(0.4));
  CHECK_THROWS(fit_two_term(g, 0.6, 0.5, 0.5));
  // n = 1: the bound is D t^beta
  CHECK(first_bound_rhs(1, 50.0, 0.5, 0.0, 0.6, 0.4) == doctest::Approx(0.4));
  CHECK(growth_condition(2, 1e6, 0.5, 0.0, 0.6, 0.4));
}

TEST_CASE("grid csv columns") {
  std::ostringstream os;
  write_grid_csv(os, {GridFunction::constant_one(0.5, 3)});
  const std::string s = os.str();
  CHECK(s.rfind("t,value,kind,j\n", 0) == 0);
  CHECK(s.find("1,1,Vj,0") != std::string::npos);
}
