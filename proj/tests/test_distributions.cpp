#include "doctest.h"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bsieve/distributions.hpp"
#include "bsieve/special.hpp"
#include "bsieve/stats.hpp"

using namespace bsieve;

namespace {

struct McMean {
  double mean, se;
};

template <class F>
McMean mc(int n, F&& draw) {
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double x = draw();
    s += x;
    s2 += x * x;
  }
  const double m = s / n;
  return {m, std::sqrt((s2 / n - m * m) / n)};
}

}  // namespace

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(ModelParams::stable(1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams::stable(0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams::gamma_mixture(0.5, 1.0, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams::make(WLaw::StableA, 0.5, 1.0, 2.0), std::invalid_argument);
  CHECK(parse_law("b") == WLaw::GammaMixtureB);
  CHECK_THROWS(parse_law("z"));
}

TEST_CASE("constants at alpha = 1/2, c = 1") {
  const auto k = constants(ModelParams::stable(0.5, 1.0));
  CHECK(k.C == doctest::Approx(2.0 / std::numbers::pi).epsilon(1e-12));
  CHECK(k.rho(0) == 1.0);
  CHECK(k.rho(1) == doctest::Approx(k.C).epsilon(1e-13));
  CHECK(k.rho(2) == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-12));
  // (C Gamma(3/2))^3 / Gamma(5/2) = pi^{-3/2} / (3 sqrt(pi) / 4) = 4 / (3 pi^2)
  CHECK(k.rho(3) == doctest::Approx(4.0 / (3.0 * std::numbers::pi * std::numbers::pi)).epsilon(1e-12));
  CHECK(k.beta == 0.0);
  CHECK(k.beta_verified);
  CHECK_FALSE(constants(ModelParams::pareto(0.5, 1.0)).beta_verified);
}

TEST_CASE("rho recursion holds in log space") {
  for (double alpha : {0.2, 0.5, 0.9}) {
    const auto k = constants(ModelParams::stable(alpha, 1.7), 201);
    const double lcg = std::log(k.C) + log_gamma(alpha + 1.0);
    for (std::size_t i = 0; i < 200; ++i) {
      const double lhs = k.log_rho_at(i + 1) + log_gamma(alpha * (i + 1) + 1.0);
      const double rhs = k.log_rho_at(i) + lcg + log_gamma(alpha * i + 1.0);
      REQUIRE(std::abs(lhs - rhs) < 1e-10);
    }
  }
}

TEST_CASE("laplace transforms") {
  const auto a = ModelParams::stable(0.5, 1.0);
  const auto b1 = ModelParams::gamma_mixture(0.5, 1.0, 1.0);
  const auto p = ModelParams::pareto(0.5, 1.0);
  CHECK(laplace_xi(a, 0.0) == 1.0);
  CHECK(laplace_xi(a, 1.0) == doctest::Approx(std::exp(-std::sqrt(std::numbers::pi))).epsilon(1e-12));
  CHECK(laplace_xi(b1, 4.0) == doctest::Approx(1.0 / (1.0 + 2.0 * std::sqrt(std::numbers::pi))).epsilon(1e-12));
  CHECK(laplace_xi(b1, 4.0) == doctest::Approx(0.2200).epsilon(1e-3));
  for (const auto& m : {a, b1, p}) {
    double prev = 1.0;
    for (double s = 0.05; s < 50; s *= 1.3) {
      const double l = laplace_xi(m, s);
      REQUIRE(l > 0.0);
      REQUIRE(l < prev);
      prev = l;
    }
  }
  // Pareto with c = 1: xi = U^{-2}; E exp(-xi) = int_0^1 exp(-u^{-2}) du
  CHECK(laplace_xi(p, 1.0) == doctest::Approx(0.08907386).epsilon(1e-6));
}

TEST_CASE("sampled xi matches its laplace transform") {
  const ModelParams laws[] = {ModelParams::stable(0.5, 1.0), ModelParams::gamma_mixture(0.5, 1.0, 2.0),
                              ModelParams::pareto(0.5, 1.0), ModelParams::stable(0.8, 0.6)};
  std::uint64_t tag = 0;
  for (const auto& m : laws) {
    const XiSampler xi(m);
    for (double s : {0.25, 1.0, 4.0}) {
      Stream rng = Stream(11).derive(tag++);
      const auto r = mc(200000, [&] { return std::exp(-s * xi(rng)); });
      INFO(m.describe(), " s=", s);
      CHECK(std::abs(r.mean - laplace_xi(m, s)) < 4 * r.se);
    }
  }
  CHECK(laplace_xi(ModelParams::gamma_mixture(0.5, 1.0, 2.0), 1.0) == doctest::Approx(0.2811).epsilon(1e-3));
}

TEST_CASE("positive stable: positivity, scaling, negative moment") {
  Stream rng(5);
  const PositiveStable z1(0.5, 1.0), z4(0.5, 4.0);
  std::vector<double> a(20000), b(20000);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = z4(rng);
    b[i] = 16.0 * z1(rng);  // Z(4) =d 4^{1/alpha} Z(1)
    REQUIRE(a[i] > 0.0);
  }
  CHECK(stats::ks_two_sample(a, b) < 0.02);
  const auto r = mc(200000, [&] { return std::pow(z1(rng), -0.5); });
  CHECK(std::abs(r.mean - 2.0 / std::numbers::pi) < 4 * r.se);
  CHECK_THROWS(PositiveStable(1.2, 1.0));
  CHECK_THROWS(PositiveStable(0.5, 0.0));
}

TEST_CASE("w pairs") {
  const auto half = w_pair_from_xi(std::log(2.0));
  CHECK(half.w == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(half.eta == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  double prev = INFINITY;
  for (double xi = 1e-8; xi <= 50; xi *= 1.1) {
    const auto p = w_pair_from_xi(xi);
    REQUIRE(std::abs(p.w - std::exp(-xi)) <= 1e-12 * p.w);
    REQUIRE(std::abs(p.eta + std::log1p(-p.w)) <= 1e-12 * p.eta);
    REQUIRE(p.eta < prev);
    prev = p.eta;
  }
  CHECK(w_pair_from_xi(800.0).eta > 0.0);
  CHECK(w_pair_from_xi(1e6).eta > 0.0);
}

TEST_CASE("eta tail in the gamma mixture case") {
  const auto m = ModelParams::gamma_mixture(0.5, 1.0, 1.0);
  const XiSampler xi(m);
  Stream rng(17);
  const int n = 400000;
  int hits = 0;
  for (int i = 0; i < n; ++i) hits += xi.pair(rng).eta > 5.0;
  const double p = static_cast<double>(hits) / n;
  const double se = std::sqrt(p * (1 - p) / n);
  // the asymptotic form has a relative correction of order exp(-alpha kappa x)
  CHECK(std::abs(p - eta_tail_asymptotic(m, 5.0)) < 4 * se + 0.1 * p);
}

TEST_CASE("negative moment quadrature") {
  auto expo = [](double s) { return 1.0 / (1.0 + s); };
  CHECK(neg_moment_via_laplace(expo, 0.5) == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-6));
  for (double g = 0.1; g < 0.95; g += 0.1)
    CHECK(neg_moment_via_laplace(expo, g) == doctest::Approx(gamma_fn(1.0 - g)).epsilon(1e-6));
  CHECK(neg_moment_via_laplace([](double s) { return std::exp(-s); }, 1.0) == doctest::Approx(1.0).epsilon(1e-9));
  const double sp = std::sqrt(std::numbers::pi);
  CHECK(neg_moment_via_laplace([sp](double s) { return std::exp(-sp * std::sqrt(s)); }, 0.5) ==
        doctest::Approx(2.0 / std::numbers::pi).epsilon(1e-8));
  // E eta^{-1} for exponential eta is infinite
  CHECK(std::isinf(neg_moment_via_laplace(expo, 1.0)));
}

TEST_CASE("gamma ratio bound") {
  auto r = gamma_ratio_bound(0, 0);
  CHECK(r.holds);
  CHECK(r.lhs == doctest::Approx(1.0));
  CHECK(r.rhs == doctest::Approx(1.1));
  r = gamma_ratio_bound(3, 2);
  CHECK(r.holds);
  CHECK(r.lhs == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(r.rhs == doctest::Approx(39.6).epsilon(1e-12));
  CHECK(gamma_ratio_bound(400, 300).holds);
}
