#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace bsieve {

enum class GridKind { U, V, Vj, Generic };

std::string to_string(GridKind kind);

/// Nondecreasing function sampled at t = 0, step, 2 step, ...
struct GridFunction {
  double step = 0.0;
  std::vector<double> values;
  std::vector<double> std_error;             ///< pointwise MC standard error (empty if exact)
  std::vector<std::vector<double>> batches;  ///< independent batch estimates, for SE of derived grids
  GridKind kind = GridKind::Generic;
  int j = 0;

  double horizon() const { return step * static_cast<double>(values.size() - 1); }

  /// Linear interpolation; throws "grid coverage" outside [0, horizon].
  double at(double t) const;

  double se_at(std::size_t m) const { return std_error.empty() ? 0.0 : std_error[m]; }

  /// The V_0 = 1 convention on [0, horizon].
  static GridFunction constant_one(double step, std::size_t points);
};

}  // namespace bsieve
