#include "bsieve/stable_paths.hpp"

#include <cmath>
#include <stdexcept>

#include "bsieve/distributions.hpp"
#include "bsieve/parallel.hpp"
#include "bsieve/stats.hpp"

namespace bsieve {

namespace {

void require_positive(double x, const char* what) {
  if (!(x > 0.0)) throw std::invalid_argument(std::string(what) + " must be positive");
}

/// sum over cells of (f(y_m) - f(y_{m+1})) (g_m + g_{m+1}) / 2 for a decreasing weight f,
/// i.e. the trapezoid rule for int g d(-f). The second member is the quadrature error
/// bound for nondecreasing g: max cell mass times the total rise of g, halved.
template <class Weight>
std::pair<double, double> stieltjes_trapezoid(std::span<const double> g, double y_step, std::size_t cells,
                                              Weight&& f) {
  double sum = 0.0, max_mass = 0.0;
  double f_lo = f(0.0);
  for (std::size_t m = 0; m < cells; ++m) {
    const double f_hi = f(y_step * static_cast<double>(m + 1));
    const double mass = f_lo - f_hi;
    sum += mass * 0.5 * (g[m] + g[m + 1]);
    max_mass = std::max(max_mass, mass);
    f_lo = f_hi;
  }
  return {sum, 0.5 * max_mass * (g[cells] - g[0])};
}

}  // namespace

SubordinatorPath sample_subordinator_path(double alpha, double horizon_v, double step, Stream& rng) {
  require_positive(step, "step");
  if (!(horizon_v >= step)) throw std::invalid_argument("horizon_v must be at least one step");
  const PositiveStable increment(alpha, step);
  const auto n = static_cast<std::size_t>(std::ceil(horizon_v / step - 1e-9));
  SubordinatorPath path{alpha, step, {}};
  path.values.reserve(n + 1);
  path.values.push_back(0.0);
  for (std::size_t k = 0; k < n; ++k) path.values.push_back(path.values.back() + increment(rng));
  return path;
}

void extend_until_above(SubordinatorPath& path, double level, Stream& rng) {
  const PositiveStable increment(path.alpha, path.step);
  if (path.values.empty()) path.values.push_back(0.0);
  while (!(path.values.back() > level)) path.values.push_back(path.values.back() + increment(rng));
}

InversePath invert_path(const SubordinatorPath& path, double y_horizon, double y_step) {
  require_positive(y_horizon, "y_horizon");
  require_positive(y_step, "y_step");
  if (path.values.empty() || !(path.values.back() > y_horizon))
    throw std::runtime_error("path too short: subordinator has not crossed y_horizon");
  const auto points = static_cast<std::size_t>(std::llround(y_horizon / y_step)) + 1;
  InversePath inv{y_step, path.step, {}};
  inv.values.resize(points);
  std::size_t k = 0;  // memoized crossing index; queries are monotone in y
  for (std::size_t m = 0; m < points; ++m) {
    const double y = y_step * static_cast<double>(m);
    while (!(path.values[k] > y)) ++k;
    inv.values[m] = path.step * static_cast<double>(k);
  }
  return inv;
}

double first_passage_on_grid(double alpha, double level, double step, Stream& rng) {
  require_positive(step, "step");
  const PositiveStable increment(alpha, step);
  double z = 0.0;
  std::size_t k = 0;
  while (!(z > level)) {
    z += increment(rng);
    ++k;
  }
  return step * static_cast<double>(k);
}

double mean_inverse_scale(double alpha) { return renewal_constant(alpha, 1.0); }

LimitGrid LimitGrid::defaults(double alpha, double min_u, int log2_points) {
  require_positive(min_u, "min_u");
  LimitGrid g;
  g.y_horizon = 40.0 / (alpha * min_u);
  g.y_step = std::ldexp(g.y_horizon, -log2_points);
  g.v_step = std::ldexp(mean_inverse_scale(alpha) * std::pow(g.y_horizon, alpha), -log2_points);
  return g;
}

LimitIntegralDraw limit_integral_on_path(const InversePath& inverse, double alpha,
                                         std::span<const double> u_list) {
  if (inverse.values.size() < 2) throw std::invalid_argument("inverse path has no cells");
  const std::size_t cells = inverse.values.size() - 1;
  const double y_horizon = inverse.y_horizon();
  const double g_end = inverse.values.back();
  LimitIntegralDraw out;
  for (double u : u_list) {
    require_positive(u, "u");
    const double a = alpha * u;
    const auto [sum, quad_err] =
        stieltjes_trapezoid(inverse.values, inverse.y_step, cells, [a](double y) { return std::exp(-a * y); });
    const double tail = std::exp(-a * y_horizon) * g_end * (1.0 + 1.0 / a);
    out.values.push_back(sum);
    out.tail_bound.push_back(tail);
    out.error_bound.push_back(tail + inverse.v_step + quad_err);
  }
  return out;
}

LimitIntegralDraw sample_limit_integral(double alpha, std::span<const double> u_list, Stream& rng,
                                        const LimitGrid& grid) {
  if (u_list.empty()) throw std::invalid_argument("u_list must be nonempty");
  SubordinatorPath path{alpha, grid.v_step, {0.0}};
  path.values.reserve(static_cast<std::size_t>(4.0 * mean_inverse_scale(alpha) *
                                               std::pow(grid.y_horizon, alpha) / grid.v_step) +
                      16);
  extend_until_above(path, grid.y_horizon, rng);
  const InversePath inverse = invert_path(path, grid.y_horizon, grid.y_step);
  LimitIntegralDraw draw = limit_integral_on_path(inverse, alpha, u_list);
  for (std::size_t i = 0; i < draw.values.size(); ++i)
    if (draw.tail_bound[i] > 1e-3 * draw.values[i])
      throw std::runtime_error("truncation too coarse: tail bound exceeds 1e-3 of the estimate");
  return draw;
}

LimitIntegralDraw sample_limit_integral(double alpha, std::span<const double> u_list, Stream& rng,
                                        double y_horizon, double y_step) {
  LimitGrid grid;
  grid.y_horizon = y_horizon;
  grid.y_step = y_step;
  const double points = y_horizon / y_step;
  grid.v_step = mean_inverse_scale(alpha) * std::pow(y_horizon, alpha) / points;
  return sample_limit_integral(alpha, u_list, rng, grid);
}

double fixed_level_on_path(const InversePath& inverse, double alpha, int j) {
  if (j < 1) throw std::invalid_argument("fixed level j must be >= 1");
  const double ratio = 1.0 / inverse.y_step;
  const auto cells = static_cast<std::size_t>(std::llround(ratio));
  if (std::abs(ratio - static_cast<double>(cells)) > 1e-9 || inverse.values.size() <= cells)
    throw std::invalid_argument("inverse path must cover [0, 1] on a grid containing y = 1");
  if (j == 1) return inverse.values[cells];
  const double a = alpha * (j - 1);
  return stieltjes_trapezoid(inverse.values, inverse.y_step, cells,
                             [a](double y) { return std::pow(std::max(0.0, 1.0 - y), a); })
      .first;
}

double fixed_level_substituted_on_path(const InversePath& inverse, double alpha, int j) {
  if (j < 1) throw std::invalid_argument("fixed level j must be >= 1");
  const double jj = static_cast<double>(j);
  const double ratio = jj / inverse.y_step;
  const auto cells = static_cast<std::size_t>(std::llround(ratio));
  if (std::abs(ratio - static_cast<double>(cells)) > 1e-9 || inverse.values.size() <= cells)
    throw std::invalid_argument("inverse path must cover [0, j] on a grid containing y = j");
  if (j == 1) return inverse.values[cells];
  const double a = alpha * (jj - 1.0);
  return stieltjes_trapezoid(inverse.values, inverse.y_step, cells,
                             [a, jj](double y) { return std::pow(std::max(0.0, 1.0 - y / jj), a); })
      .first;
}

double sample_fixed_level_limit(double alpha, int j, Stream& rng, int log2_points) {
  if (j < 1) throw std::invalid_argument("fixed level j must be >= 1");
  const double y_step = std::ldexp(1.0, -log2_points);
  // Mass of (1-y)^(alpha(j-1)) sits on y of order 1/j, where Z^{<-} is of order C j^-alpha.
  const double v_step = std::ldexp(mean_inverse_scale(alpha) * std::pow(static_cast<double>(j), -alpha),
                                   -log2_points);
  if (j == 1) return first_passage_on_grid(alpha, 1.0, v_step, rng);
  SubordinatorPath path{alpha, v_step, {0.0}};
  extend_until_above(path, 1.0, rng);
  return fixed_level_on_path(invert_path(path, 1.0, y_step), alpha, j);
}

double self_similarity_check(double alpha, double j, std::size_t n_draws, Stream& rng, unsigned workers,
                             int log2_steps) {
  require_positive(j, "j");
  if (n_draws == 0) throw std::invalid_argument("n_draws must be positive");
  const double scale = mean_inverse_scale(alpha);
  const double level_a = 1.0 / j;
  const double step_a = std::ldexp(scale * std::pow(level_a, alpha), -log2_steps);
  const double step_b = std::ldexp(scale, -log2_steps);
  const double shrink = std::pow(j, -alpha);
  std::vector<double> a(n_draws), b(n_draws);
  parallel_for(n_draws, workers, [&](std::size_t i) {
    Stream sa = rng.derive(2 * i), sb = rng.derive(2 * i + 1);
    a[i] = first_passage_on_grid(alpha, level_a, step_a, sa);
    b[i] = shrink * first_passage_on_grid(alpha, 1.0, step_b, sb);
  });
  return stats::ks_two_sample(a, b);
}

}  // namespace bsieve
