#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bsieve/harness.hpp"

namespace {

const char* const kCommands[][2] = {
    {"limit-sample", "draw the limit process; inverse-subordinator checks"},
    {"occupancy", "exact vs Poissonized occupancy counts"},
    {"renewal", "grid U and V; transform identities; U against the walk identity"},
    {"verify-bounds", "convolution-power bound chain for V_j"},
    {"theorem-main", "normalized occupied-box counts at intermediate levels vs the limit law"},
    {"theorem-2", "weighted sums over the perturbed walk vs the limit law"},
    {"theorem-3", "N_j against its decomposition through level-1 boxes"},
    {"fixed-level", "fixed-level limits against the intermediate-level limit"},
    {"appendix", "gamma-ratio inequality and negative-moment formula"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nested Bernoulli sieve simulations and numerical checks"};
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key=value file; flags given on the command line win");

  bsieve::ExperimentConfig cfg;
  std::string law = "a";
  double alpha = 0.5, c = 1.0;
  std::optional<double> kappa;

  app.add_option("--case", law, "law of |log W|: a (stable), b (gamma mixture), pareto")
      ->check(CLI::IsMember({"a", "b", "pareto"}));
  app.add_option("--alpha", alpha, "tail index in (0, 1)");
  app.add_option("--c", c, "tail constant");
  app.add_option("--kappa", kappa, "mixture shape for case b");
  app.add_option("--log-n", cfg.log_n_list, "log n values (repeatable)")->take_all();
  app.add_option("--j-list", cfg.j_list, "explicit level per log n (repeatable)")->take_all();
  app.add_option("--j", cfg.j, "level for theorem-2 and theorem-3");
  app.add_option("--u", cfg.u_list, "u values (repeatable)")->take_all();
  app.add_option("--t", cfg.t_list, "t values (repeatable)")->take_all();
  app.add_option("--replicas", cfg.replicas, "outer replicas");
  app.add_option("--limit-samples", cfg.limit_samples, "limit-law draws");
  app.add_option("--grid-replicas", cfg.grid_replicas, "walks behind each U / V grid");
  app.add_option("--mc-draws", cfg.mc_draws, "plain Monte Carlo draws");
  app.add_option("--inverse-draws", cfg.inverse_draws, "first-passage draws");
  app.add_option("--j-max", cfg.j_max, "deepest convolution power in verify-bounds");
  app.add_option("--n-balls", cfg.n_balls, "balls in the exact occupancy experiment");
  app.add_option("--seed", cfg.seed, "master seed");
  app.add_option("--threshold-rule", cfg.threshold_rule, "default or offset:<d>");
  app.add_option("--step", cfg.step, "grid step (0: horizon / 2^12)");
  app.add_option("--horizon", cfg.horizon, "grid horizon (0: experiment default)");
  app.add_option("--log2-points", cfg.log2_points, "resolution of limit-law paths");
  app.add_option("--workers", cfg.workers, "worker threads; results do not depend on it");
  app.add_option("--out", cfg.out_dir, "output directory");
  app.add_option("--format", cfg.format, "csv, json or both")->check(CLI::IsMember({"csv", "json", "both"}));

  for (const auto& cmd : kCommands) app.add_subcommand(cmd[0], cmd[1])->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    cfg.params = bsieve::ModelParams::make(bsieve::parse_law(law), alpha, c, kappa);
    const std::string name = app.get_subcommands().front()->get_name();
    const auto report = bsieve::run_named(name, cfg);
    if (!report) {
      std::cerr << "unknown experiment " << name << "\n";
      return 2;
    }
    bsieve::emit(*report, cfg.out_dir, cfg.format);
    for (const auto& w : report->warnings) std::cerr << "warning: " << w << "\n";
    for (const auto& ch : report->checks)
      std::printf("%s  %s  [%s]  measured=%s\n", ch.pass ? "PASS" : "FAIL", ch.name.c_str(),
                  ch.requirement.c_str(), ch.measured.dump().c_str());
    return report->ok() ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
