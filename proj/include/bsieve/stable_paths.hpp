#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bsieve/random.hpp"

namespace bsieve {

/// Z_alpha sampled on the grid 0, step, 2 step, ...
struct SubordinatorPath {
  double alpha = 0.5;
  double step = 0.0;
  std::vector<double> values;  ///< values[0] = 0, strictly increasing

  double horizon() const { return step * static_cast<double>(values.size() - 1); }
};

/// Z_alpha^{<-} on the grid 0, y_step, 2 y_step, ...; values[m] is the smallest grid time v
/// of the underlying path with Z(v) > m y_step, so it overshoots the true inverse by less
/// than v_step.
struct InversePath {
  double y_step = 0.0;
  double v_step = 0.0;
  std::vector<double> values;

  double y_horizon() const { return y_step * static_cast<double>(values.size() - 1); }
};

SubordinatorPath sample_subordinator_path(double alpha, double horizon_v, double step, Stream& rng);

/// Appends increments (continuing the same stream) until the path exceeds `level`.
void extend_until_above(SubordinatorPath& path, double level, Stream& rng);

InversePath invert_path(const SubordinatorPath& path, double y_horizon, double y_step);

/// Smallest grid time k step with Z(k step) > level, simulated lazily without storing the path.
double first_passage_on_grid(double alpha, double level, double step, Stream& rng);

/// E Z_alpha^{<-}(y) = mean_inverse_scale(alpha) y^alpha, i.e. C with c = 1.
double mean_inverse_scale(double alpha);

/// Discretization of one limit-law draw.
struct LimitGrid {
  double y_horizon = 0.0;
  double y_step = 0.0;
  double v_step = 0.0;

  /// y_horizon = 40 / (alpha min_u); y_step = y_horizon / 2^log2_points; v_step chosen so that
  /// the expected inverse at y_horizon spans 2^log2_points subordinator steps.
  static LimitGrid defaults(double alpha, double min_u, int log2_points = 14);
};

struct LimitIntegralDraw {
  std::vector<double> values;       ///< one per u
  std::vector<double> tail_bound;   ///< truncation bound beyond y_horizon
  std::vector<double> error_bound;  ///< truncation + inverse-grid + quadrature bound
};

/// int_0^inf exp(-alpha u y) dZ^{<-}(y) for every u, from one inverse path. The quadrature
/// integrates the path against the exact measure d(-exp(-alpha u y)) cell by cell.
LimitIntegralDraw limit_integral_on_path(const InversePath& inverse, double alpha,
                                         std::span<const double> u_list);

/// One joint draw of the limit process at every u. Throws "truncation too coarse" when the
/// tail bound exceeds 1e-3 of the estimate.
LimitIntegralDraw sample_limit_integral(double alpha, std::span<const double> u_list, Stream& rng,
                                        const LimitGrid& grid);
LimitIntegralDraw sample_limit_integral(double alpha, std::span<const double> u_list, Stream& rng,
                                        double y_horizon, double y_step);

/// int_[0,1] (1-y)^(alpha (j-1)) dZ^{<-}(y) on a path covering [0, 1].
double fixed_level_on_path(const InversePath& inverse, double alpha, int j);

/// int_[0,j] (1-y/j)^(alpha (j-1)) dZ^{<-}(y), equal in law to j^alpha times the above.
double fixed_level_substituted_on_path(const InversePath& inverse, double alpha, int j);

double sample_fixed_level_limit(double alpha, int j, Stream& rng, int log2_points = 14);

/// KS distance between draws of Z^{<-}(1/j) and j^{-alpha} Z^{<-}(1).
double self_similarity_check(double alpha, double j, std::size_t n_draws, Stream& rng,
                             unsigned workers = 1, int log2_steps = 10);

}  // namespace bsieve
