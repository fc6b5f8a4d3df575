#include "bsieve/distributions.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "bsieve/special.hpp"

namespace bsieve {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("alpha must lie in (0, 1)");
}

template <class F>
double integrate(F&& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-14);
}

}  // namespace

std::string to_string(WLaw law) {
  switch (law) {
    case WLaw::StableA: return "a";
    case WLaw::GammaMixtureB: return "b";
    case WLaw::GenericPareto: return "pareto";
  }
  return "?";
}

WLaw parse_law(const std::string& name) {
  if (name == "a") return WLaw::StableA;
  if (name == "b") return WLaw::GammaMixtureB;
  if (name == "pareto") return WLaw::GenericPareto;
  throw std::invalid_argument("unknown case '" + name + "' (expected a, b or pareto)");
}

ModelParams::ModelParams(WLaw law, double alpha, double c, std::optional<double> kappa)
    : law_(law), alpha_(alpha), c_(c), kappa_(kappa) {
  require_alpha(alpha);
  if (!(c > 0.0)) throw std::invalid_argument("tail constant c must be positive");
  if (law == WLaw::GammaMixtureB) {
    if (!kappa || !(*kappa > 0.0)) throw std::invalid_argument("case (b) requires kappa > 0");
  } else if (kappa) {
    throw std::invalid_argument("kappa is only meaningful for case (b)");
  }
}

ModelParams ModelParams::stable(double alpha, double c) {
  return ModelParams(WLaw::StableA, alpha, c, std::nullopt);
}
ModelParams ModelParams::gamma_mixture(double alpha, double c, double kappa) {
  return ModelParams(WLaw::GammaMixtureB, alpha, c, kappa);
}
ModelParams ModelParams::pareto(double alpha, double c) {
  return ModelParams(WLaw::GenericPareto, alpha, c, std::nullopt);
}
ModelParams ModelParams::make(WLaw law, double alpha, double c, std::optional<double> kappa) {
  if (law != WLaw::GammaMixtureB && kappa) throw std::invalid_argument("kappa applies only to case b");
  return ModelParams(law, alpha, c, kappa);
}

std::string ModelParams::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "case=" << to_string(law_) << " alpha=" << alpha_ << " c=" << c_;
  if (kappa_) os << " kappa=" << *kappa_;
  return os.str();
}

double DerivedConstants::log_rho_at(std::size_t i) const {
  if (i < log_rho.size()) return log_rho[i];
  return static_cast<double>(i) * std::log(C * gamma_fn(alpha + 1.0)) -
         log_gamma(alpha * static_cast<double>(i) + 1.0);
}

double DerivedConstants::rho(std::size_t i) const { return std::exp(log_rho_at(i)); }

PositiveStable::PositiveStable(double alpha, double time_scale) : alpha_(alpha) {
  require_alpha(alpha);
  if (!(time_scale > 0.0)) throw std::invalid_argument("time_scale must be positive");
  // X below has Laplace transform exp(-s^alpha); rescale to exp(-time_scale Gamma(1-alpha) s^alpha).
  log_scale_ = std::log(time_scale * gamma_fn(1.0 - alpha)) / alpha;
}

double PositiveStable::operator()(Stream& rng) const {
  const double u = rng.uniform();
  const double e = rng.exponential();
  const double theta = std::numbers::pi * u;
  // sin(pi u) evaluated on the short side so it keeps full relative precision near u = 1.
  const double sin_theta = u < 0.5 ? std::sin(theta) : std::sin(std::numbers::pi * (1.0 - u));
  const double log_x = std::log(std::sin(alpha_ * theta)) - std::log(sin_theta) / alpha_ +
                       (1.0 - alpha_) / alpha_ * std::log(std::sin((1.0 - alpha_) * theta) / e);
  return std::exp(log_x + log_scale_);
}

double sample_positive_stable(double alpha, double time_scale, Stream& rng) {
  return PositiveStable(alpha, time_scale)(rng);
}

XiSampler::XiSampler(const ModelParams& params)
    : params_(params),
      stable_(params.alpha(), params.c()),
      pareto_scale_(std::pow(params.c(), 1.0 / params.alpha())) {}

double XiSampler::operator()(Stream& rng) const {
  switch (params_.law()) {
    case WLaw::StableA:
      return stable_(rng);
    case WLaw::GammaMixtureB: {
      const double kappa = *params_.kappa();
      const double z = stable_(rng);
      const double x = rng.gamma(kappa) / kappa;
      return z * std::pow(x, 1.0 / params_.alpha());
    }
    case WLaw::GenericPareto:
      return pareto_scale_ * std::pow(rng.uniform(), -1.0 / params_.alpha());
  }
  throw std::logic_error("unreachable");
}

WPair XiSampler::pair(Stream& rng) const { return w_pair_from_xi((*this)(rng)); }

double sample_xi(const ModelParams& params, Stream& rng) { return XiSampler(params)(rng); }

WPair w_pair_from_xi(double xi) {
  if (!(xi > 0.0)) throw std::invalid_argument("xi must be positive");
  constexpr double kTiny = std::numeric_limits<double>::denorm_min();
  const double w = std::exp(-xi);
  double eta;
  if (w < 1e-12) {
    eta = w * (1.0 + 0.5 * w);
  } else {
    eta = -std::log1p(-w);
  }
  return {xi, std::max(eta, kTiny), std::max(w, kTiny)};
}

WPair sample_w_pair(const ModelParams& params, Stream& rng) { return XiSampler(params).pair(rng); }

double laplace_xi(const ModelParams& params, double s) {
  if (!(s >= 0.0)) throw std::invalid_argument("laplace_xi: s must be nonnegative");
  if (s == 0.0) return 1.0;
  const double alpha = params.alpha();
  const double g = gamma_fn(1.0 - alpha);
  switch (params.law()) {
    case WLaw::StableA:
      return std::exp(-params.c() * g * std::pow(s, alpha));
    case WLaw::GammaMixtureB: {
      const double kappa = *params.kappa();
      return std::pow(1.0 + params.c() / kappa * g * std::pow(s, alpha), -kappa);
    }
    case WLaw::GenericPareto: {
      // With y = P{xi > x}, x = x0 y^(-1/alpha) and y is uniform on (0, 1].
      const double x0 = std::pow(params.c(), 1.0 / alpha);
      auto f = [&](double y) { return y <= 0.0 ? 0.0 : std::exp(-s * x0 * std::pow(y, -1.0 / alpha)); };
      return integrate(f, 0.0, 1.0);
    }
  }
  throw std::logic_error("unreachable");
}

double renewal_constant(double alpha, double c) {
  require_alpha(alpha);
  return 1.0 / (c * gamma_fn(1.0 + alpha) * gamma_fn(1.0 - alpha));
}

DerivedConstants constants(const ModelParams& params, std::size_t max_index) {
  DerivedConstants k;
  k.alpha = params.alpha();
  k.C = renewal_constant(params.alpha(), params.c());
  const double log_step = std::log(k.C) + log_gamma(params.alpha() + 1.0);
  k.log_rho.resize(max_index + 1);
  for (std::size_t i = 0; i <= max_index; ++i)
    k.log_rho[i] = static_cast<double>(i) * log_step - log_gamma(params.alpha() * static_cast<double>(i) + 1.0);
  k.beta = 0.0;
  k.beta_verified = params.assumptions_verified();
  return k;
}

double neg_moment_via_laplace(const std::function<double(double)>& laplace, double gamma_exp) {
  if (!(gamma_exp > 0.0)) throw std::invalid_argument("gamma_exp must be positive");
  // [0, 1]: substitute s = r^(1/gamma) to remove the s^(gamma-1) singularity.
  const double head =
      integrate([&](double r) { return laplace(std::pow(r, 1.0 / gamma_exp)); }, 0.0, 1.0) / gamma_exp;

  // [1, inf): octave pieces. Algebraic tails give asymptotically geometric pieces, whose
  // ratio decides convergence and supplies the remainder.
  auto integrand = [&](double s) { return std::pow(s, gamma_exp - 1.0) * laplace(s); };
  double tail = 0.0;
  double prev_piece = -1.0, prev_ratio = -1.0;
  bool finished = false;
  for (int k = 0; k < 1000 && !finished; ++k) {
    const double lo = std::ldexp(1.0, k);
    const double piece = integrate(integrand, lo, 2.0 * lo);
    if (!std::isfinite(piece)) return kInf;
    tail += piece;
    if (piece <= 1e-17 * (head + tail)) { finished = true; break; }
    if (prev_piece > 0.0) {
      const double ratio = piece / prev_piece;
      if (k >= 24 && prev_ratio > 0.0 && std::abs(ratio - prev_ratio) < 1e-9 * ratio) {
        if (ratio >= 1.0 - 1e-6) return kInf;
        tail += piece * ratio / (1.0 - ratio);
        finished = true;
      }
      prev_ratio = ratio;
    }
    prev_piece = piece;
  }
  if (!finished) return kInf;
  return gamma_exp / gamma_fn(1.0 + gamma_exp) * (head + tail);
}

GammaRatioCheck gamma_ratio_bound(double x, double y) {
  if (!(x >= 0.0 && y >= 0.0)) throw std::invalid_argument("gamma_ratio_bound: x, y must be >= 0");
  const double log_lhs = log_gamma(x + 1.0 + y) - log_gamma(x + 1.0);
  const double log_rhs = std::log(1.1) + y * std::log(x + 1.0 + y);
  return {log_lhs <= log_rhs, std::exp(log_lhs), std::exp(log_rhs)};
}

double eta_tail_asymptotic(const ModelParams& params, double x) {
  if (params.law() != WLaw::GammaMixtureB)
    throw std::invalid_argument("eta tail asymptotic is only available for case (b)");
  const double alpha = params.alpha();
  const double kappa = *params.kappa();
  const double log_const = kappa * std::log(kappa) -
                           kappa * std::log(params.c() * gamma_fn(1.0 - alpha)) -
                           log_gamma(1.0 + alpha * kappa);
  return std::exp(log_const - alpha * kappa * x);
}

}  // namespace bsieve
