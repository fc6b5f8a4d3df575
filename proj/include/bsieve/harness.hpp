#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bsieve/distributions.hpp"
#include "bsieve/grid.hpp"
#include "json.hpp"

namespace bsieve {

using Json = nlohmann::ordered_json;

struct ExperimentConfig {
  ModelParams params = ModelParams::stable(0.5, 1.0);
  std::vector<double> log_n_list{50.0, 150.0, 400.0};
  std::vector<int> j_list;  ///< explicit j per log n; empty means floor((log n)^0.3)
  std::vector<double> u_list{0.6, 1.0};
  std::vector<double> t_list{100.0, 200.0, 400.0};
  int j = 5;  ///< level for the walk and tree theorems
  std::size_t replicas = 1000;
  std::size_t limit_samples = 10000;
  std::size_t grid_replicas = 100000;  ///< walks behind each U / V grid
  std::size_t mc_draws = 1000000;      ///< plain Monte Carlo checks
  std::size_t inverse_draws = 100000;  ///< first-passage draws for the inverse-subordinator laws
  int j_max = 6;                       ///< deepest convolution power in the bound checks
  std::int64_t n_balls = 10000;
  std::uint64_t seed = 20240917;
  std::string threshold_rule = "default";
  double step = 0.0;     ///< grid step; 0 selects horizon / 2^12
  double horizon = 0.0;  ///< grid horizon; 0 selects the experiment default
  int log2_points = 14;  ///< resolution of limit-law paths
  unsigned workers = 1;
  std::string out_dir = "out";
  std::string format = "both";

  int j_for(std::size_t log_n_index) const;

  /// Throws std::invalid_argument on hard violations; returns warnings otherwise.
  std::vector<std::string> validate(bool tree_theorem) const;

  /// Every field that affects results, one key=value per line. Excludes workers and output location.
  std::string canonical() const;
  std::uint64_t hash() const;
};

/// log of the pruning threshold for a given log n under the configured rule:
/// "default" is -(log n + 2 log log n); "offset:d" lowers it by a further d.
double threshold_from_rule(const std::string& rule, double log_n);

/// growth cap (log n)^min(1/3, (alpha - beta) / (alpha - beta + 1)).
double j_cap(double log_n, double alpha, double beta);

struct SampleSet {
  std::string label;
  std::vector<double> values;
  std::uint64_t config_hash = 0;
  std::size_t replicas = 0;
  std::vector<double> error_bars;

  void require_valid() const;  ///< nonempty and finite
};

double ks_two_sample(const SampleSet& a, const SampleSet& b);

struct CsvRow {
  std::string experiment;
  double scale = 0.0;  ///< log n or t
  int j = 0;
  double u = 0.0;
  std::int64_t replica = 0;
  double value = 0.0;
};

struct CheckResult {
  std::string name;
  std::string requirement;
  bool pass = false;
  Json measured;
};

struct Report {
  std::string experiment;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;
  std::vector<CsvRow> rows;
  Json summary = Json::object();
  std::vector<std::string> warnings;
  std::vector<GridFunction> grids;  ///< written as <experiment>_grids.csv when present

  bool ok() const;
  void check(std::string name, std::string requirement, bool pass, Json measured);
};

/// CSV: experiment,scale,j,u,replica,value.
std::string to_csv(const Report& report);
Json to_json(const Report& report);

/// Writes <dir>/<experiment>.csv (plus _grids.csv) and/or .json according to format (csv, json, both).
void emit(const Report& report, const std::string& dir, const std::string& format);

Report run_limit_sample(const ExperimentConfig& cfg);
Report run_occupancy(const ExperimentConfig& cfg);
Report run_renewal(const ExperimentConfig& cfg);
Report run_verify_bounds(const ExperimentConfig& cfg);
Report run_theorem_main(const ExperimentConfig& cfg);
Report run_theorem2(const ExperimentConfig& cfg);
Report run_theorem3(const ExperimentConfig& cfg);
Report run_fixed_level_link(const ExperimentConfig& cfg);
Report run_appendix_checks(const ExperimentConfig& cfg);

/// Runner by CLI subcommand name; nullopt for unknown names.
std::optional<Report> run_named(const std::string& name, const ExperimentConfig& cfg);

}  // namespace bsieve
