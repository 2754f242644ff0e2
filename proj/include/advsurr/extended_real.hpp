#pragma once

#include <cmath>
#include <limits>

namespace advsurr {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Mass-weighted term with the convention 0 * inf = 0.
[[nodiscard]] inline double weighted(double mass, double value) {
  return mass == 0.0 ? 0.0 : mass * value;
}

}  // namespace advsurr
