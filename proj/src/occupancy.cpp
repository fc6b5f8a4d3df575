#include "bsieve/occupancy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace bsieve {

namespace {

constexpr std::uint64_t kOccupancyTag = 0x6f63637570ULL;
constexpr std::uint64_t kRootTag = 0x726f6f74ULL;

}  // namespace

double OccupancyTree::retained_mass(int j) const {
  LogSum s;
  for (const auto& v : levels.at(j)) s.add_log(-v.neglog);
  return s.value();
}

double default_log_threshold(double log_n) {
  if (!(log_n > 1.0)) throw std::invalid_argument("default threshold needs log n > 1");
  return -(log_n + 2.0 * std::log(log_n));
}

OccupancyTree expand_tree(const ModelParams& params, int max_level, double log_threshold, const Stream& rng,
                          std::size_t node_cap) {
  if (max_level < 1) throw std::invalid_argument("max_level must be >= 1");
  if (!(log_threshold < 0.0)) throw std::invalid_argument("threshold must lie in (0, 1)");
  const XiSampler xi(params);
  OccupancyTree tree;
  tree.max_level = max_level;
  tree.log_threshold = log_threshold;
  tree.seed = rng.seed();
  tree.levels.resize(max_level + 1);
  tree.pruned.resize(max_level + 1);
  tree.levels[0].push_back({0, 0.0, rng.derive(kRootTag).id()});
  const double cut = -log_threshold;
  for (int j = 1; j <= max_level; ++j) {
    auto& next = tree.levels[j];
    LogSum& lost = tree.pruned[j];
    lost.add(tree.pruned[j - 1]);
    const auto& cur = tree.levels[j - 1];
    for (std::uint32_t p = 0; p < cur.size(); ++p) {
      const TreeNode& v = cur[p];
      Stream s(tree.seed, v.stream_id);
      double S = v.neglog;  // -log of the residual stick of v
      for (std::uint64_t k = 1; S <= cut; ++k) {
        const WPair w = xi.pair(s);
        const double child = S + w.eta;
        if (child <= cut) {
          if (next.size() >= node_cap)
            throw std::length_error("tree level " + std::to_string(j) + " exceeds the node cap of " +
                                    std::to_string(node_cap) + " retained nodes");
          next.push_back({p, child, s.derive(k).id()});
        } else {
          lost.add_log(-child);
        }
        S += w.xi;
      }
      lost.add_log(-S);  // every later child lies below the residual
    }
  }
  return tree;
}

OccupancyResult throw_balls_exact(const OccupancyTree& tree, std::int64_t n, const Stream& rng) {
  if (n < 1 || n > 10000000) throw std::invalid_argument("exact mode requires 1 <= n <= 1e7");
  const int J = tree.max_level;
  const auto& leaves = tree.levels[J];
  std::vector<double> cum(leaves.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < leaves.size(); ++i) cum[i] = acc += std::exp(-leaves[i].neglog);
  Stream s = rng.derive(kOccupancyTag);
  std::vector<std::vector<char>> hit(J + 1);
  for (int j = 1; j <= J; ++j) hit[j].assign(tree.levels[j].size(), 0);
  std::int64_t bucket = 0;
  for (std::int64_t b = 0; b < n; ++b) {
    const double u = s.uniform();
    if (u >= acc) {
      ++bucket;
      continue;
    }
    hit[J][static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin())] = 1;
  }
  OccupancyResult r;
  r.log_n = std::log(static_cast<double>(n));
  r.mode = OccupancyMode::ExactBalls;
  r.counts.assign(J, 0);
  for (int j = J; j >= 1; --j) {
    for (std::size_t i = 0; i < hit[j].size(); ++i) {
      if (!hit[j][i]) continue;
      ++r.counts[j - 1];
      if (j > 1) hit[j - 1][tree.levels[j][i].parent] = 1;
    }
  }
  r.pruned_bias_bound.assign(J, static_cast<double>(bucket));
  return r;
}

OccupancyResult occupancy_poissonized(const OccupancyTree& tree, double log_n) {
  if (!(log_n > 0.0)) throw std::invalid_argument("log n must be positive");
  const int J = tree.max_level;
  OccupancyResult r;
  r.log_n = log_n;
  r.mode = OccupancyMode::Poissonized;
  r.counts.assign(J, 0);
  std::vector<std::vector<char>> occ(J + 1);
  for (int j = 1; j <= J; ++j) occ[j].assign(tree.levels[j].size(), 0);
  for (std::size_t i = 0; i < tree.levels[J].size(); ++i) {
    const TreeNode& v = tree.levels[J][i];
    const double p = -std::expm1(-std::exp(log_n - v.neglog));
    Stream s = Stream(tree.seed, v.stream_id).derive(kOccupancyTag);
    occ[J][i] = s.uniform() < p;
  }
  for (int j = J; j >= 1; --j) {
    for (std::size_t i = 0; i < occ[j].size(); ++i) {
      if (!occ[j][i]) continue;
      ++r.counts[j - 1];
      if (j > 1) occ[j - 1][tree.levels[j][i].parent] = 1;
    }
  }
  const double bias = tree.pruned[J].empty() ? 0.0 : std::exp(log_n + tree.log_pruned_mass(J));
  r.pruned_bias_bound.assign(J, bias);
  for (int j = 1; j <= J; ++j)
    if (bias > 0.01 * static_cast<double>(r.counts[j - 1]))
      r.warnings.push_back("pruned bias bound " + std::to_string(bias) + " exceeds 1% of K(" + std::to_string(j) +
                           ") = " + std::to_string(r.counts[j - 1]));
  return r;
}

int level_of(int j, double u) {
  return static_cast<int>(std::floor(static_cast<double>(j) * u + 1e-9));
}

double normalize_counts(const OccupancyResult& result, const ModelParams& params, const DerivedConstants& k, int j,
                        double u) {
  const int level = level_of(j, u);
  if (level < 1 || level > static_cast<int>(result.counts.size()))
    throw std::out_of_range("level floor(j u) = " + std::to_string(level) + " out of range");
  const auto K = result.K(level);
  if (K == 0) return 0.0;
  const double alpha = params.alpha();
  return std::exp(std::log(params.c()) + alpha * std::log(static_cast<double>(j)) +
                  std::log(static_cast<double>(K)) - k.log_rho_at(level - 1) -
                  alpha * level * std::log(result.log_n));
}

std::vector<std::int64_t> count_N_j(const OccupancyTree& tree, double t) {
  if (t > tree.neglog_cut() * (1.0 + 1e-12))
    throw std::invalid_argument("count_N_j: t exceeds -log threshold, counts would be incomplete");
  std::vector<std::int64_t> out(tree.max_level, 0);
  for (int j = 1; j <= tree.max_level; ++j)
    for (const auto& v : tree.levels[j]) out[j - 1] += v.neglog <= t;
  return out;
}

void write_tree_csv(std::ostream& os, const OccupancyTree& tree) {
  os << "level,parent,neglog_weight\n";
  char buf[96];
  for (int j = 0; j <= tree.max_level; ++j)
    for (const auto& v : tree.levels[j]) {
      std::snprintf(buf, sizeof buf, "%d,%u,%.17g\n", j, v.parent, v.neglog);
      os << buf;
    }
}

}  // namespace bsieve
