#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "bsieve/harness.hpp"

namespace bsieve {

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    if constexpr (std::is_floating_point_v<T>)
      s += fmt(v[i]);
    else
      s += std::to_string(v[i]);
  }
  return s;
}

}  // namespace

double j_cap(double log_n, double alpha, double beta) {
  const double a = alpha - beta;
  return std::pow(log_n, std::min(1.0 / 3.0, a / (a + 1.0)));
}

int ExperimentConfig::j_for(std::size_t i) const {
  if (!j_list.empty()) {
    if (j_list.size() != log_n_list.size()) throw std::invalid_argument("j list must match the log n list");
    return j_list[i];
  }
  return static_cast<int>(std::floor(std::pow(log_n_list.at(i), 0.3) + 1e-12));
}

std::vector<std::string> ExperimentConfig::validate(bool tree_theorem) const {
  std::vector<std::string> warn;
  if (replicas < 100) throw std::invalid_argument("replicas must be at least 100");
  if (u_list.empty()) throw std::invalid_argument("u list must be nonempty");
  for (double u : u_list)
    if (!(u > 0.0)) throw std::invalid_argument("every u must be positive");
  if (format != "csv" && format != "json" && format != "both")
    throw std::invalid_argument("format must be csv, json or both");
  const double alpha = params.alpha(), beta = 0.0;
  auto check_pair = [&](double scale, int j, bool hard, const char* what) {
    if (j < 1) throw std::invalid_argument("j must be >= 1");
    for (double u : u_list)
      if (std::floor(j * u + 1e-9) < 1)
        throw std::invalid_argument("floor(j u) < 1 for j = " + std::to_string(j) + ", u = " + fmt(u));
    const double cap = j_cap(scale, alpha, beta);
    const std::string where = std::string(what) + " = " + fmt(scale) + ", j = " + std::to_string(j);
    if (j > cap) {
      if (hard) throw std::invalid_argument("j exceeds the growth cap " + fmt(cap) + " at " + where);
      warn.push_back("j exceeds the growth cap " + fmt(cap) + " at " + where);
    } else if (j > 0.8 * cap) {
      warn.push_back("j within 20% of the growth cap " + fmt(cap) + " at " + where);
    }
  };
  if (tree_theorem) {
    if (log_n_list.empty()) throw std::invalid_argument("log n list must be nonempty");
    for (std::size_t i = 0; i < log_n_list.size(); ++i) {
      if (!(log_n_list[i] > 1.0)) throw std::invalid_argument("log n must exceed 1");
      check_pair(log_n_list[i], j_for(i), true, "log n");
    }
  } else {
    for (double t : t_list) check_pair(t, j, false, "t");
  }
  return warn;
}

std::string ExperimentConfig::canonical() const {
  std::ostringstream os;
  os << "case=" << to_string(params.law()) << '\n'
     << "alpha=" << fmt(params.alpha()) << '\n'
     << "c=" << fmt(params.c()) << '\n'
     << "kappa=" << (params.kappa() ? fmt(*params.kappa()) : "none") << '\n'
     << "log_n=" << join(log_n_list) << '\n'
     << "j_list=" << join(j_list) << '\n'
     << "u=" << join(u_list) << '\n'
     << "t=" << join(t_list) << '\n'
     << "j=" << j << '\n'
     << "replicas=" << replicas << '\n'
     << "limit_samples=" << limit_samples << '\n'
     << "grid_replicas=" << grid_replicas << '\n'
     << "mc_draws=" << mc_draws << '\n'
     << "inverse_draws=" << inverse_draws << '\n'
     << "j_max=" << j_max << '\n'
     << "n_balls=" << n_balls << '\n'
     << "seed=" << seed << '\n'
     << "threshold_rule=" << threshold_rule << '\n'
     << "step=" << fmt(step) << '\n'
     << "horizon=" << fmt(horizon) << '\n'
     << "log2_points=" << log2_points << '\n';
  return os.str();
}

std::uint64_t ExperimentConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char ch : canonical()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

double threshold_from_rule(const std::string& rule, double log_n) {
  const double base = -(log_n + 2.0 * std::log(log_n));
  if (rule == "default") return base;
  if (rule.rfind("offset:", 0) == 0) {
    std::size_t used = 0;
    const std::string arg = rule.substr(7);
    const double d = std::stod(arg, &used);
    if (used != arg.size() || !(d >= 0.0)) throw std::invalid_argument("bad threshold offset in '" + rule + "'");
    return base - d;
  }
  throw std::invalid_argument("unknown threshold rule '" + rule + "' (use default or offset:<d>)");
}

void SampleSet::require_valid() const {
  if (values.empty()) throw std::invalid_argument("sample set '" + label + "' is empty");
  for (double v : values)
    if (!std::isfinite(v)) throw std::invalid_argument("sample set '" + label + "' has a non-finite value");
}

}  // namespace bsieve
