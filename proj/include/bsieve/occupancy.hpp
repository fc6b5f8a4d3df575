#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "bsieve/distributions.hpp"
#include "bsieve/random.hpp"
#include "bsieve/special.hpp"

namespace bsieve {

struct TreeNode {
  std::uint32_t parent = 0;     ///< index into the previous level
  double neglog = 0.0;          ///< -log P(v)
  std::uint64_t stream_id = 0;  ///< address of the node's private random stream
};

/// Weighted branching tree of boxes, expanded breadth first and pruned at a weight threshold.
/// Children of a node come from that node's own stream, so trees expanded from the same root
/// stream at different thresholds are nested: the finer tree contains the coarser one.
struct OccupancyTree {
  int max_level = 0;
  double log_threshold = 0.0;  ///< log of the threshold; kept in log form since it can underflow
  std::uint64_t seed = 0;
  std::vector<std::vector<TreeNode>> levels;  ///< levels[0] holds the root
  std::vector<LogSum> pruned;                 ///< pruned[j]: mass not retained at level j (cumulative)

  double neglog_cut() const { return -log_threshold; }
  std::size_t size(int j) const { return levels.at(j).size(); }
  double pruned_mass(int j) const { return pruned.at(j).value(); }
  double log_pruned_mass(int j) const { return pruned.at(j).log(); }
  double retained_mass(int j) const;
};

enum class OccupancyMode { ExactBalls, Poissonized };

struct OccupancyResult {
  double log_n = 0.0;
  std::vector<std::int64_t> counts;      ///< counts[j-1] = K(j)
  std::vector<double> pruned_bias_bound;  ///< per level, expected occupied boxes missed by pruning
  OccupancyMode mode = OccupancyMode::Poissonized;
  std::vector<std::string> warnings;

  std::int64_t K(int j) const { return counts.at(j - 1); }
};

/// -(log n + 2 log log n): prunes boxes of weight below 1 / (n (log n)^2).
double default_log_threshold(double log_n);

/// Throws std::length_error when a level exceeds node_cap retained nodes.
OccupancyTree expand_tree(const ModelParams& params, int max_level, double log_threshold, const Stream& rng,
                          std::size_t node_cap = 100000000);

/// n balls, each landing on a retained level-J leaf with probability equal to its weight or in the
/// pruned bucket. Bucket balls are counted in the bias bound only.
OccupancyResult throw_balls_exact(const OccupancyTree& tree, std::int64_t n, const Stream& rng);

/// Poisson(n) balls: level-J leaves are occupied independently with probability
/// 1 - exp(-n P(v)), using one uniform from each leaf's stream; occupancy is propagated to prefixes.
/// The bias bound at every level is n times the pruned mass at level J.
OccupancyResult occupancy_poissonized(const OccupancyTree& tree, double log_n);

/// The level floor(j u), guarding against representation error in the product.
int level_of(int j, double u);

/// c j^alpha K(floor(j u)) / (rho_{floor(j u) - 1} (log n)^(alpha floor(j u))), in log space.
double normalize_counts(const OccupancyResult& result, const ModelParams& params, const DerivedConstants& k, int j,
                        double u);

/// Per level, the count of retained nodes with -log P(v) <= t. Requires t <= -log threshold.
std::vector<std::int64_t> count_N_j(const OccupancyTree& tree, double t);

/// CSV with columns level,parent,neglog_weight.
void write_tree_csv(std::ostream& os, const OccupancyTree& tree);

}  // namespace bsieve
