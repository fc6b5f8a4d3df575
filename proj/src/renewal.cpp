#include "bsieve/renewal.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "bsieve/parallel.hpp"
#include "bsieve/special.hpp"

namespace bsieve {

namespace {

enum class Counted { U, V };

std::size_t cells_for(double horizon, double step) {
  if (!(horizon > 0.0) || !(step > 0.0)) throw std::invalid_argument("horizon and step must be positive");
  const auto m = static_cast<std::size_t>(std::llround(horizon / step));
  if (m < 1) throw std::invalid_argument("step exceeds horizon");
  return m;
}

GridFunction estimate_counts(const PairSampler& draw, double horizon, double step, const EstimateOptions& opt,
                             const Stream& rng, Counted what) {
  if (opt.n_replicas < 100) throw std::invalid_argument("at least 100 replicas required");
  const std::size_t cells = cells_for(horizon, step);
  const double h = horizon / static_cast<double>(cells);
  const std::size_t n_batches = std::clamp<std::size_t>(opt.n_batches, 1, opt.n_replicas);
  const std::size_t R = opt.n_replicas;

  // per batch: histogram of counts and of N^2 increments by bin ceil(x / h)
  std::vector<std::vector<std::int64_t>> cnt(n_batches), sq(n_batches);
  parallel_for(n_batches, opt.workers, [&](std::size_t b) {
    auto& c = cnt[b];
    auto& q = sq[b];
    c.assign(cells + 1, 0);
    q.assign(cells + 1, 0);
    std::vector<double> events;
    const std::size_t lo = b * R / n_batches, hi = (b + 1) * R / n_batches;
    for (std::size_t r = lo; r < hi; ++r) {
      Stream s = rng.derive(r);
      events.clear();
      double S = 0.0;
      if (what == Counted::U) events.push_back(0.0);
      while (S <= horizon) {
        const WPair p = draw(s);
        if (what == Counted::V) {
          const double T = S + p.eta;
          if (T <= horizon) events.push_back(T);
        }
        S += p.xi;
        if (what == Counted::U && S <= horizon) events.push_back(S);
      }
      std::sort(events.begin(), events.end());
      for (std::size_t k = 0; k < events.size(); ++k) {
        const auto bin = std::min(cells, static_cast<std::size_t>(std::ceil(events[k] / h)));
        c[bin] += 1;
        q[bin] += static_cast<std::int64_t>(2 * k + 1);
      }
    }
    for (std::size_t m = 1; m <= cells; ++m) {
      c[m] += c[m - 1];
      q[m] += q[m - 1];
    }
  });

  GridFunction g;
  g.step = h;
  g.kind = what == Counted::U ? GridKind::U : GridKind::V;
  g.j = what == Counted::U ? 0 : 1;
  g.values.resize(cells + 1);
  g.std_error.resize(cells + 1);
  g.batches.assign(n_batches, std::vector<double>(cells + 1));
  const double n = static_cast<double>(R);
  for (std::size_t m = 0; m <= cells; ++m) {
    std::int64_t tc = 0, tq = 0;
    for (std::size_t b = 0; b < n_batches; ++b) {
      tc += cnt[b][m];
      tq += sq[b][m];
      const double rb = static_cast<double>((b + 1) * R / n_batches - b * R / n_batches);
      g.batches[b][m] = static_cast<double>(cnt[b][m]) / rb;
    }
    const double mean = static_cast<double>(tc) / n;
    const double var = std::max(0.0, (static_cast<double>(tq) / n - mean * mean) * n / (n - 1.0));
    g.values[m] = mean;
    g.std_error[m] = std::sqrt(var / n);
  }
  return g;
}

PairSampler pair_sampler(const ModelParams& params) {
  return [xi = XiSampler(params)](Stream& s) { return xi.pair(s); };
}

std::vector<double> convolve_values(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = std::min(a.size(), b.size());
  std::vector<double> mid(n), db(n);
  for (std::size_t k = 0; k + 1 < n; ++k) mid[k] = 0.5 * (a[k] + a[k + 1]);
  for (std::size_t i = 1; i < n; ++i) db[i] = b[i] - b[i - 1];
  std::vector<double> out(n);
  for (std::size_t m = 0; m < n; ++m) {
    double s = a[m] * b[0];
    for (std::size_t i = 1; i <= m; ++i) s += mid[m - i] * db[i];
    out[m] = s;
  }
  return out;
}

double pow_term(double exponent, double log_t) { return exponent == 0.0 ? 0.0 : exponent * log_t; }

double local_increment(const std::vector<double>& v, std::size_t m) {
  double d = 0.0;
  if (m > 0) d = std::max(d, v[m] - v[m - 1]);
  if (m + 1 < v.size()) d = std::max(d, v[m + 1] - v[m]);
  return d;
}

}  // namespace

GridFunction estimate_V(const PairSampler& draw, double horizon, double step, const EstimateOptions& opt,
                        const Stream& rng) {
  return estimate_counts(draw, horizon, step, opt, rng, Counted::V);
}

GridFunction estimate_V(const ModelParams& params, double horizon, double step, const EstimateOptions& opt,
                        const Stream& rng) {
  return estimate_V(pair_sampler(params), horizon, step, opt, rng);
}

GridFunction estimate_U(const PairSampler& draw, double horizon, double step, const EstimateOptions& opt,
                        const Stream& rng) {
  return estimate_counts(draw, horizon, step, opt, rng, Counted::U);
}

GridFunction estimate_U(const ModelParams& params, double horizon, double step, const EstimateOptions& opt,
                        const Stream& rng) {
  return estimate_U(pair_sampler(params), horizon, step, opt, rng);
}

double stieltjes_laplace(const GridFunction& g, double s) {
  if (g.values.empty()) throw std::invalid_argument("empty grid");
  double sum = g.values[0];
  for (std::size_t m = 1; m < g.values.size(); ++m)
    sum += std::exp(-s * (static_cast<double>(m) - 0.5) * g.step) * (g.values[m] - g.values[m - 1]);
  return sum;
}

double laplace_eta(const ModelParams& params, double s) {
  if (!(s >= 0.0)) throw std::invalid_argument("s must be nonnegative");
  if (s == 0.0) return 1.0;
  // (1 - w)^s = sum_k binom(s, k) (-w)^k, and E W^k = phi(k); the series converges absolutely.
  double sum = 1.0, coef = 1.0;
  for (int k = 1; k <= 2000000; ++k) {
    coef *= (s - (k - 1)) / k * -1.0;
    if (coef == 0.0) break;  // integer s
    const double term = coef * laplace_xi(params, static_cast<double>(k));
    sum += term;
    if (std::abs(term) < 1e-16 * std::abs(sum) && k > 8) break;
  }
  return sum;
}

GridFunction convolve(const GridFunction& a, const GridFunction& b) {
  if (std::abs(a.step - b.step) > 1e-12 * std::max(a.step, b.step))
    throw std::invalid_argument("step mismatch in convolution");
  GridFunction out;
  out.step = a.step;
  out.values = convolve_values(a.values, b.values);
  const bool powers = (a.kind == GridKind::V || a.kind == GridKind::Vj) && b.kind == GridKind::V;
  out.kind = powers ? GridKind::Vj : GridKind::Generic;
  out.j = powers ? a.j + b.j : 0;
  if (a.batches.size() > 1 && a.batches.size() == b.batches.size()) {
    const std::size_t B = a.batches.size();
    out.batches.resize(B);
    for (std::size_t k = 0; k < B; ++k) out.batches[k] = convolve_values(a.batches[k], b.batches[k]);
    out.std_error.resize(out.values.size());
    for (std::size_t m = 0; m < out.values.size(); ++m) {
      double mu = 0.0, ss = 0.0;
      for (std::size_t k = 0; k < B; ++k) mu += out.batches[k][m];
      mu /= static_cast<double>(B);
      for (std::size_t k = 0; k < B; ++k) ss += (out.batches[k][m] - mu) * (out.batches[k][m] - mu);
      out.std_error[m] = std::sqrt(ss / static_cast<double>(B - 1) / static_cast<double>(B));
    }
  }
  return out;
}

std::vector<GridFunction> convolution_powers(const GridFunction& v, int j_max) {
  if (j_max < 1) throw std::invalid_argument("j_max must be >= 1");
  std::vector<GridFunction> out{v};
  out[0].j = 1;
  for (int j = 2; j <= j_max; ++j) out.push_back(convolve(out.back(), v));
  return out;
}

double fit_two_term(const GridFunction& v, double C, double alpha, double beta) {
  if (!(beta >= 0.0 && beta < alpha)) throw std::invalid_argument("beta must lie in [0, alpha)");
  double D = 0.0;
  for (std::size_t m = 1; m < v.values.size(); ++m) {
    const double t = v.step * static_cast<double>(m);
    D = std::max(D, std::abs(v.values[m] - C * std::pow(t, alpha)) / std::pow(t, beta));
  }
  return D;
}

double first_bound_rhs(int n, double t, double alpha, double beta, double C, double D) {
  const double log_t = std::log(t), log_ga = log_gamma(alpha + 1.0), log_gb = log_gamma(beta + 1.0);
  const double log_C = std::log(C), log_D = std::log(D);
  LogSum sum;
  for (int i = 0; i < n; ++i) {
    const int r = n - i;
    sum.add_log(log_binomial(n, i) + i * log_ga + r * log_gb - log_gamma(alpha * i + beta * r + 1.0) +
                (i ? i * log_C : 0.0) + pow_term(alpha * i, log_t) + r * log_D + pow_term(beta * r, log_t));
  }
  return sum.value();
}

double two_jb1_rhs(int j, double t, double alpha, double beta, double C, double D) {
  const double e = alpha * (j - 1) + beta;
  return 2.1 * D * std::exp((j - 1) * std::log(C) + std::log(static_cast<double>(j)) +
                            (j - 1) * log_gamma(alpha + 1.0) + log_gamma(beta + 1.0) - log_gamma(e + 1.0) +
                            pow_term(e, std::log(t)));
}

bool growth_condition(int j, double t, double alpha, double beta, double C, double D) {
  const double lhs = 2.0 * D * gamma_fn(beta + 1.0) * j * std::pow(alpha * (j - 1) + beta + 1.0, alpha - beta);
  return lhs <= C * gamma_fn(alpha + 1.0) * std::pow(t, alpha - beta);
}

BoundReport check_vj_bound_chain(const std::vector<GridFunction>& v_list, const DerivedConstants& k, int j_max,
                                 double t_max, double y_min) {
  if (!k.D) throw std::invalid_argument("D must be fitted before checking the bound chain");
  if (j_max < 1 || static_cast<std::size_t>(j_max) > v_list.size())
    throw std::invalid_argument("v_list does not reach j_max");
  const double alpha = k.alpha, beta = k.beta, C = k.C, D = *k.D;
  BoundReport rep;
  rep.uniform_sup.assign(j_max + 1, 0.0);
  rep.envelope_max_ratio.assign(j_max + 1, 0.0);
  for (int j = 1; j <= j_max; ++j) {
    const GridFunction& g = v_list[j - 1];
    const double log_rho = k.log_rho_at(j);
    for (std::size_t m = 1; m < g.values.size(); ++m) {
      const double t = g.step * static_cast<double>(m);
      const double v = g.values[m];
      const double main = std::exp(log_rho + alpha * j * std::log(t));
      if (t >= y_min) rep.uniform_sup[j] = std::max(rep.uniform_sup[j], std::abs(v / main - 1.0));
      if (t > t_max * (1.0 + 1e-12)) continue;
      rep.envelope_max_ratio[j] = std::max(rep.envelope_max_ratio[j], v / main);
      const double eps = 3.0 * (g.se_at(m) + local_increment(g.values, m));
      const double dev = std::abs(v - main);
      ++rep.checked_first;
      const double r1 = first_bound_rhs(j, t, alpha, beta, C, D);
      if (dev - r1 > eps) rep.violations.push_back({"first", j, t, dev, r1, eps});
      if (!growth_condition(j, t, alpha, beta, C, D)) continue;
      ++rep.checked_conditional;
      const double r2 = two_jb1_rhs(j, t, alpha, beta, C, D);
      if (dev - r2 > eps) rep.violations.push_back({"2jb1", j, t, dev, r2, eps});
      const double r3 = 3.31 * main;
      if (v - r3 > eps) rep.violations.push_back({"vj", j, t, v, r3, eps});
    }
  }
  return rep;
}

std::vector<UEquationRow> check_u_equation(const ModelParams& params, const GridFunction& u_grid,
                                           std::span<const double> t_list, std::size_t n_mc, const Stream& rng,
                                           unsigned workers) {
  if (params.law() == WLaw::GenericPareto) throw std::invalid_argument("u equation needs case a or b");
  if (n_mc < 2) throw std::invalid_argument("n_mc must be at least 2");
  const double alpha = params.alpha();
  const PositiveStable z(alpha, params.c());
  std::vector<UEquationRow> rows;
  for (std::size_t q = 0; q < t_list.size(); ++q) {
    const double t = t_list[q];
    std::vector<double> draws(n_mc);
    const Stream base = rng.derive(q);
    parallel_for(n_mc, workers, [&](std::size_t i) {
      Stream s = base.derive(i);
      const double x = std::pow(z(s), -alpha) * std::pow(t, alpha);
      if (params.law() == WLaw::StableA) {
        draws[i] = std::floor(x) + 1.0;
        return;
      }
      const double kappa = *params.kappa();
      double S = 0.0, count = 0.0;
      while (S <= x) {
        count += 1.0;
        S += s.gamma(kappa) / kappa;
      }
      draws[i] = count;
    });
    double mu = 0.0, ss = 0.0;
    for (double d : draws) mu += d;
    mu /= static_cast<double>(n_mc);
    for (double d : draws) ss += (d - mu) * (d - mu);
    UEquationRow row;
    row.t = t;
    row.mc = mu;
    row.mc_se = std::sqrt(ss / static_cast<double>(n_mc - 1) / static_cast<double>(n_mc));
    const auto m = static_cast<std::size_t>(std::llround(t / u_grid.step));
    if (std::abs(m * u_grid.step - t) > 1e-9 * std::max(1.0, t) || m >= u_grid.values.size())
      throw std::out_of_range("grid coverage: t is not a point of the U grid");
    row.grid = u_grid.values[m];
    row.grid_se = u_grid.se_at(m);
    row.agree = std::abs(row.grid - row.mc) <= 4.0 * std::hypot(row.grid_se, row.mc_se);
    rows.push_back(row);
  }
  return rows;
}

void write_grid_csv(std::ostream& os, const std::vector<GridFunction>& grids, bool header) {
  if (header) os << "t,value,kind,j\n";
  char buf[128];
  for (const auto& g : grids) {
    const std::string kind = to_string(g.kind);
    for (std::size_t m = 0; m < g.values.size(); ++m) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%s,%d\n", g.step * static_cast<double>(m), g.values[m],
                    kind.c_str(), g.j);
      os << buf;
    }
  }
}

}  // namespace bsieve
