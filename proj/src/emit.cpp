#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "bsieve/harness.hpp"
#include "bsieve/renewal.hpp"
#include "bsieve/stats.hpp"

namespace bsieve {

double ks_two_sample(const SampleSet& a, const SampleSet& b) {
  a.require_valid();
  b.require_valid();
  return stats::ks_two_sample(a.values, b.values);
}

bool Report::ok() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

void Report::check(std::string name, std::string requirement, bool pass, Json measured) {
  checks.push_back({std::move(name), std::move(requirement), pass, std::move(measured)});
}

std::string to_csv(const Report& report) {
  std::string out = "experiment,scale,j,u,replica,value\n";
  char buf[160];
  for (const auto& r : report.rows) {
    std::snprintf(buf, sizeof buf, ",%.17g,%d,%.17g,%lld,%.17g\n", r.scale, r.j, r.u,
                  static_cast<long long>(r.replica), r.value);
    out += r.experiment;
    out += buf;
  }
  return out;
}

Json to_json(const Report& report) {
  char hash[24];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(report.config_hash));
  Json j;
  j["experiment"] = report.experiment;
  j["config_hash"] = hash;
  j["seed"] = report.seed;
  j["pass"] = report.ok();
  Json checks = Json::array();
  for (const auto& c : report.checks)
    checks.push_back({{"name", c.name}, {"requirement", c.requirement}, {"pass", c.pass}, {"measured", c.measured}});
  j["checks"] = checks;
  j["summary"] = report.summary;
  j["warnings"] = report.warnings;
  return j;
}

void emit(const Report& report, const std::string& dir, const std::string& format) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir + "': " + ec.message());
  auto write = [&](const std::string& ext, const std::string& body) {
    const fs::path p = fs::path(dir) / (report.experiment + ext);
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + p.string() + "' for writing");
    f << body;
    if (!f) throw std::runtime_error("write failed for '" + p.string() + "'");
  };
  if (format == "csv" || format == "both") {
    write(".csv", to_csv(report));
    if (!report.grids.empty()) {
      std::ostringstream os;
      write_grid_csv(os, report.grids);
      write("_grids.csv", os.str());
    }
  }
  if (format == "json" || format == "both") write(".json", to_json(report).dump(2) + "\n");
}

}  // namespace bsieve
