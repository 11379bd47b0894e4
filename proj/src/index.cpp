#include "nimbus/index.hpp"

#include <cmath>
#include <cstdlib>

#include <fmt/format.h>

#include "nimbus/error.hpp"

namespace nimbus {

DetectionConfig::DetectionConfig(double critical_index, double daylight_max_zenith)
    : critical_index_(critical_index), daylight_max_zenith_(daylight_max_zenith) {
  if (!(critical_index > 0.0 && critical_index <= 1.0)) {
    throw ConfigError("index", fmt::format("critical index {} outside (0, 1]", critical_index));
  }
  if (!(daylight_max_zenith > 0.0 && daylight_max_zenith <= 90.0)) {
    throw ConfigError("index", fmt::format("daylight zenith limit {} outside (0, 90]", daylight_max_zenith));
  }
}

double clearness_index(double l_m, double l_c, double epsilon) {
  if (!std::isfinite(l_m) || l_m < 0.0) {
    throw DomainError("index", fmt::format("measured luminance {} must be finite and >= 0", l_m));
  }
  if (!(l_c > epsilon)) {
    throw NightError(fmt::format("clear-sky luminance {} at or below {}; index undefined", l_c, epsilon));
  }
  return l_m / l_c;
}

bool detect_onset(double index, const DetectionConfig& config) {
  return index < config.critical_index();
}

std::optional<double> minutes_to_nearest_event(Timestamp t, std::span<const RainEvent> events) {
  std::optional<double> best;
  for (const auto& ev : events) {
    double d = 0.0;
    if (t < ev.start) {
      d = -minutes_between(t, ev.start);
    } else if (t > ev.end) {
      d = minutes_between(ev.end, t);
    } else {
      return 0.0;
    }
    // Equidistant from an earlier end and a later start: report the positive side.
    if (!best || std::abs(d) < std::abs(*best) || (std::abs(d) == std::abs(*best) && d > *best)) {
      best = d;
    }
  }
  return best;
}

}  // namespace nimbus
