#include "bsieve/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace bsieve {

std::string to_string(GridKind kind) {
  switch (kind) {
    case GridKind::U:
      return "U";
    case GridKind::V:
      return "V";
    case GridKind::Vj:
      return "Vj";
    case GridKind::Generic:
      return "generic";
  }
  return "generic";
}

double GridFunction::at(double t) const {
  if (values.empty()) throw std::out_of_range("grid coverage: empty grid");
  const double x = t / step;
  const double last = static_cast<double>(values.size() - 1);
  if (!(x >= 0.0) || x > last * (1.0 + 1e-12) + 1e-12)
    throw std::out_of_range("grid coverage: t = " + std::to_string(t) + " outside [0, " +
                            std::to_string(horizon()) + "]");
  if (x >= last) return values.back();
  const auto m = static_cast<std::size_t>(x);
  const double f = x - static_cast<double>(m);
  return values[m] + f * (values[m + 1] - values[m]);
}

GridFunction GridFunction::constant_one(double step, std::size_t points) {
  GridFunction g;
  g.step = step;
  g.values.assign(points, 1.0);
  g.kind = GridKind::Vj;
  g.j = 0;
  return g;
}

}  // namespace bsieve
