#include "bsieve/perturbed_walk.hpp"

#include <stdexcept>

namespace bsieve {

WalkPath generate_walk(const XiSampler& xi, double horizon, Stream& rng) {
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  WalkPath path;
  path.horizon = horizon;
  double s = 0.0;
  path.s_values.push_back(s);
  while (s <= horizon) {
    const WPair p = xi.pair(rng);
    const double t = s + p.eta;
    if (t <= horizon) path.t_values.push_back(t);
    s += p.xi;
    path.s_values.push_back(s);
  }
  return path;
}

WalkPath generate_walk(const ModelParams& params, double horizon, Stream& rng) {
  return generate_walk(XiSampler(params), horizon, rng);
}

std::size_t count_N(const WalkPath& path, double t) {
  if (t > path.horizon) throw std::out_of_range("beyond horizon: t exceeds the walk horizon");
  std::size_t n = 0;
  for (double x : path.t_values) n += x <= t;
  return n;
}

double weighted_sum_statistic(const WalkPath& path, const GridFunction& v_prev, double t) {
  if (t > path.horizon) throw std::out_of_range("beyond horizon: t exceeds the walk horizon");
  if (t > v_prev.horizon() * (1.0 + 1e-12))
    throw std::out_of_range("grid coverage: V grid does not reach t");
  double sum = 0.0;
  for (double x : path.t_values)
    if (x <= t) sum += v_prev.at(t - x);
  return sum;
}

}  // namespace bsieve
