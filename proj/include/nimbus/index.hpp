#pragma once

#include <optional>
#include <span>

#include "nimbus/series.hpp"
#include "nimbus/timeutil.hpp"

namespace nimbus {

/// Detection threshold used on the rooftop dataset.
inline constexpr double default_critical_index = 0.08;
inline constexpr double default_daylight_max_zenith = 85.0;
inline constexpr double default_night_epsilon = 1e-6;

class DetectionConfig {
 public:
  explicit DetectionConfig(double critical_index = default_critical_index,
                           double daylight_max_zenith = default_daylight_max_zenith);

  double critical_index() const noexcept { return critical_index_; }
  /// Frames with the sun at or beyond this zenith are left out of the series.
  double daylight_max_zenith() const noexcept { return daylight_max_zenith_; }

 private:
  double critical_index_;
  double daylight_max_zenith_;
};

struct IndexSample {
  Timestamp timestamp;
  double index;
  /// Negative before the nearest event, positive after, zero inside.
  std::optional<double> minutes_to_nearest_rain;
};

/// Clearness luminance index L_m / L_c. Not clamped; may exceed one.
/// Throws NightError when l_c <= epsilon, DomainError when l_m < 0.
double clearness_index(double l_m, double l_c, double epsilon = default_night_epsilon);

/// True iff the index has fallen strictly below the critical index.
bool detect_onset(double index, const DetectionConfig& config);

/// Signed minutes from `t` to the closest boundary of any event; zero if
/// `t` lies inside one. Empty when there are no events.
std::optional<double> minutes_to_nearest_event(Timestamp t, std::span<const RainEvent> events);

}  // namespace nimbus
