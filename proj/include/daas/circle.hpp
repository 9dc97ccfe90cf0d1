#pragma once

#include <cmath>

namespace daas {

/// ((x + 1) mod 2) - 1 with floor semantics, always in [-1, 1).
inline double wrap(double x) {
  double r = std::fmod(x + 1.0, 2.0);
  if (r < 0.0) r += 2.0;
  if (r >= 2.0) r = 0.0;
  return r - 1.0;
}

/// Signed displacement from `from` to `to` along the shorter arc, in [-1, 1).
inline double circular_difference(double to, double from) { return wrap(to - from); }

}  // namespace daas
