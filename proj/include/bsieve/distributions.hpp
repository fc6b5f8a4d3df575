#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bsieve/random.hpp"

namespace bsieve {

/// Law of W, described through xi = |log W|.
enum class WLaw {
  StableA,        ///< xi is alpha-stable: E exp(-s xi) = exp(-c Gamma(1-alpha) s^alpha)
  GammaMixtureB,  ///< E exp(-s xi) = (1 + (c/kappa) Gamma(1-alpha) s^alpha)^(-kappa)
  GenericPareto,  ///< P{xi > t} = min(1, c t^(-alpha)) exactly
};

std::string to_string(WLaw law);
WLaw parse_law(const std::string& name);  // "a", "b", "pareto"

/// Parameters of the stick-breaking environment. P{xi > t} ~ c t^(-alpha).
class ModelParams {
 public:
  static ModelParams stable(double alpha, double c);
  static ModelParams gamma_mixture(double alpha, double c, double kappa);
  static ModelParams pareto(double alpha, double c);
  static ModelParams make(WLaw law, double alpha, double c, std::optional<double> kappa);

  WLaw law() const { return law_; }
  double alpha() const { return alpha_; }
  double c() const { return c_; }
  std::optional<double> kappa() const { return kappa_; }

  /// Cases (a) and (b) satisfy the two-term expansion hypotheses; the Pareto law is a stress case.
  bool assumptions_verified() const { return law_ != WLaw::GenericPareto; }

  std::string describe() const;

 private:
  ModelParams(WLaw law, double alpha, double c, std::optional<double> kappa);

  WLaw law_;
  double alpha_;
  double c_;
  std::optional<double> kappa_;
};

/// Constants derived from (alpha, c).
struct DerivedConstants {
  double alpha = 0.0;
  double C = 0.0;                ///< (c Gamma(1+alpha) Gamma(1-alpha))^(-1)
  std::vector<double> log_rho;   ///< log rho_i, rho_i = (C Gamma(alpha+1))^i / Gamma(alpha i + 1)
  double beta = 0.0;             ///< second-order exponent of |V(t) - C t^alpha| <= D t^beta
  bool beta_verified = true;     ///< false for laws where beta is not derivable
  std::optional<double> D;       ///< fitted by renewal::fit_two_term

  double rho(std::size_t i) const;
  double log_rho_at(std::size_t i) const;
};

struct WPair {
  double xi;   ///< |log W|
  double eta;  ///< |log(1 - W)|
  double w;
};

/// Draws of Z_alpha(time_scale), where E exp(-s Z_alpha(1)) = exp(-Gamma(1-alpha) s^alpha).
/// Kanter's representation: exact, one uniform and one exponential per draw.
class PositiveStable {
 public:
  PositiveStable(double alpha, double time_scale);
  double operator()(Stream& rng) const;
  double alpha() const { return alpha_; }

 private:
  double alpha_;
  double log_scale_;
};

double sample_positive_stable(double alpha, double time_scale, Stream& rng);

/// Sampler for xi = |log W| with the law-dependent constants precomputed.
class XiSampler {
 public:
  explicit XiSampler(const ModelParams& params);
  double operator()(Stream& rng) const;
  WPair pair(Stream& rng) const;

 private:
  ModelParams params_;
  PositiveStable stable_;
  double pareto_scale_;
};

double sample_xi(const ModelParams& params, Stream& rng);

/// (xi, eta, w) for a given xi. w and eta are clamped to the smallest subnormal when
/// exp(-xi) underflows, so eta is never zero.
WPair w_pair_from_xi(double xi);

WPair sample_w_pair(const ModelParams& params, Stream& rng);

/// E exp(-s xi).
double laplace_xi(const ModelParams& params, double s);

/// C (tail constant of U and V).
double renewal_constant(double alpha, double c);

DerivedConstants constants(const ModelParams& params, std::size_t max_index = 256);

/// E eta^(-gamma) = gamma / Gamma(1+gamma) * int_0^inf s^(gamma-1) l(s) ds, where l is the
/// Laplace transform of eta. Returns +infinity when the integral diverges.
double neg_moment_via_laplace(const std::function<double(double)>& laplace, double gamma_exp);

struct GammaRatioCheck {
  bool holds;
  double lhs;  ///< Gamma(x+1+y) / Gamma(x+1)
  double rhs;  ///< 11/10 (x+1+y)^y
};

/// Gamma(x+1+y)/Gamma(x+1) <= 11/10 (x+1+y)^y, evaluated through log-gamma.
GammaRatioCheck gamma_ratio_bound(double x, double y);

/// Asymptotic tail of eta = |log(1-W)| in case (b):
/// kappa^kappa / ((c Gamma(1-alpha))^kappa Gamma(1+alpha kappa)) exp(-alpha kappa x).
double eta_tail_asymptotic(const ModelParams& params, double x);

}  // namespace bsieve
