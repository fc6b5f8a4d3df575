#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "bsieve/distributions.hpp"
#include "bsieve/grid.hpp"
#include "bsieve/random.hpp"

namespace bsieve {

using PairSampler = std::function<WPair(Stream&)>;

struct EstimateOptions {
  std::size_t n_replicas = 100000;
  std::size_t n_batches = 20;
  unsigned workers = 1;
};

/// V(t) = E N(t) by Monte Carlo over independent walks; replica r uses rng.derive(r).
/// Counts are accumulated in integers so the result does not depend on the worker count.
GridFunction estimate_V(const ModelParams& params, double horizon, double step, const EstimateOptions& opt,
                        const Stream& rng);
GridFunction estimate_V(const PairSampler& draw, double horizon, double step, const EstimateOptions& opt,
                        const Stream& rng);

/// U(t) = sum_{i>=0} P{S_i <= t}, counting S_0 = 0.
GridFunction estimate_U(const ModelParams& params, double horizon, double step, const EstimateOptions& opt,
                        const Stream& rng);
GridFunction estimate_U(const PairSampler& draw, double horizon, double step, const EstimateOptions& opt,
                        const Stream& rng);

/// int_[0, horizon] exp(-s t) dG(t), atom at 0 included, midpoint rule on each cell.
double stieltjes_laplace(const GridFunction& g, double s);

/// E exp(-s eta) = E (1 - exp(-xi))^s, by the binomial series in the Laplace transform of xi.
double laplace_eta(const ModelParams& params, double s);

/// out[m] = a[m] b[0] + sum_{i=1..m} a((m - i + 1/2) h) (b[i] - b[i-1]), a interpolated linearly.
/// Batch estimates, when both sides carry the same number, are convolved batchwise and give SE.
GridFunction convolve(const GridFunction& a, const GridFunction& b);

/// {V_1, ..., V_jmax} with V_1 = v.
std::vector<GridFunction> convolution_powers(const GridFunction& v, int j_max);

/// D = max over grid t > 0 of |v(t) - C t^alpha| / t^beta.
double fit_two_term(const GridFunction& v, double C, double alpha, double beta);

struct BoundViolation {
  std::string inequality;  ///< "first", "2jb1" or "vj"
  int j = 0;
  double t = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
};

struct BoundReport {
  std::size_t checked_first = 0;
  std::size_t checked_conditional = 0;  ///< grid points where the growth condition holds
  std::vector<BoundViolation> violations;
  std::vector<double> uniform_sup;     ///< index j: sup_{y >= y_min} |V_j(y) / (rho_j y^{alpha j}) - 1|
  /// same sup without any condition; records where the unconditional envelope check fails.
  std::vector<double> envelope_max_ratio;  ///< index j: max over 0 < t <= t_max of V_j / (rho_j t^{alpha j})
  bool ok() const { return violations.empty(); }
};

/// Right-hand side of the convolution-power bound sum_{i<n} binom(n,i) ... (C t^a)^i (D t^b)^(n-i).
double first_bound_rhs(int n, double t, double alpha, double beta, double C, double D);
double two_jb1_rhs(int j, double t, double alpha, double beta, double C, double D);
bool growth_condition(int j, double t, double alpha, double beta, double C, double D);

/// v_list[j-1] = V_j. Checks every grid 0 < t <= t_max; violations beyond
/// eps = 3 (SE + local grid increment) are reported, never thrown.
BoundReport check_vj_bound_chain(const std::vector<GridFunction>& v_list, const DerivedConstants& k, int j_max,
                                 double t_max, double y_min = 100.0);

struct UEquationRow {
  double t = 0.0;
  double grid = 0.0;
  double grid_se = 0.0;
  double mc = 0.0;
  double mc_se = 0.0;
  bool agree = false;  ///< within 4 combined standard errors
};

/// Compares grid U(t) with E Uhat(Z_alpha(c)^(-alpha) t^alpha). Case (a): Uhat(x) = floor(x) + 1.
/// Case (b): Uhat is counted on one gamma walk per draw.
std::vector<UEquationRow> check_u_equation(const ModelParams& params, const GridFunction& u_grid,
                                           std::span<const double> t_list, std::size_t n_mc, const Stream& rng,
                                           unsigned workers = 1);

/// CSV with columns t,value,kind,j; %.17g formatting.
void write_grid_csv(std::ostream& os, const std::vector<GridFunction>& grids, bool header = true);

}  // namespace bsieve
