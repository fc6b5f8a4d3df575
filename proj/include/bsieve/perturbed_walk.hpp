#pragma once

#include <cstddef>
#include <vector>

#include "bsieve/distributions.hpp"
#include "bsieve/grid.hpp"
#include "bsieve/random.hpp"

namespace bsieve {

/// One realization of S_k = xi_1 + ... + xi_k and T_k = S_{k-1} + eta_k up to a horizon.
struct WalkPath {
  double horizon = 0.0;
  std::vector<double> s_values;  ///< S_0 = 0, S_1, ..., ending with the first S_k > horizon
  std::vector<double> t_values;  ///< every T_k <= horizon, in generation order
};

/// Generation stops at the first k with S_k > horizon: later T exceed S_k, so none is lost.
WalkPath generate_walk(const XiSampler& xi, double horizon, Stream& rng);
WalkPath generate_walk(const ModelParams& params, double horizon, Stream& rng);

/// N(t) = #{k : T_k <= t}; throws "beyond horizon" for t > horizon.
std::size_t count_N(const WalkPath& path, double t);

/// sum over T_r <= t of v_prev(t - T_r), v_prev by linear interpolation.
double weighted_sum_statistic(const WalkPath& path, const GridFunction& v_prev, double t);

}  // namespace bsieve
