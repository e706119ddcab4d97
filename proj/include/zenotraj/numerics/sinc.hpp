#pragma once

#include <cmath>

namespace zenotraj::numerics {

// sin(x)/x; Taylor branch near 0 avoids the 0/0 and the cancellation.
inline double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

}  // namespace zenotraj::numerics
