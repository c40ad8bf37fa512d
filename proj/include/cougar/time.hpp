#pragma once

#include <chrono>
#include <cstdint>
#include <limits>

namespace cougar {

// Simulated time. Trace RTTs are integer microseconds; the clock ticks in
// nanoseconds so that halving a directional RTT is always exact.
using Duration = std::chrono::duration<std::int64_t, std::nano>;

struct SimClock {
  using rep = std::int64_t;
  using period = std::nano;
  using duration = Duration;
  using time_point = std::chrono::time_point<SimClock, Duration>;
  static constexpr bool is_steady = true;
};

using SimTime = SimClock::time_point;

inline constexpr SimTime kTimeZero{};
inline constexpr SimTime kNever{Duration{std::numeric_limits<std::int64_t>::max()}};

constexpr Duration from_us(std::int64_t us) { return Duration{us * 1000}; }

inline Duration from_ms(double ms) {
  return Duration{static_cast<std::int64_t>(ms * 1e6 + (ms >= 0 ? 0.5 : -0.5))};
}

constexpr double to_us(Duration d) { return static_cast<double>(d.count()) / 1e3; }
constexpr double to_ms(Duration d) { return static_cast<double>(d.count()) / 1e6; }

}  // namespace cougar
