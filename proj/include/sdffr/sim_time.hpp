#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <string>

namespace sdffr {

/// Simulation clock. Integer nanoseconds keep delay sums exact.
using SimTime = std::chrono::nanoseconds;

inline SimTime from_ms(double ms) {
  return SimTime(static_cast<std::int64_t>(std::llround(ms * 1e6)));
}

inline double to_ms(SimTime t) { return static_cast<double>(t.count()) / 1e6; }

/// Fixed six-decimal milliseconds, formatted from the integer count.
std::string format_ms(SimTime t);

}  // namespace sdffr
