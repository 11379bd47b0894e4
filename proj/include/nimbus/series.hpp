#pragma once

#include "nimbus/timeutil.hpp"

namespace nimbus {

/// One rain-gauge reading.
struct GaugeRecord {
  Timestamp timestamp;
  double rate_mm_per_hr;

  friend bool operator==(const GaugeRecord&, const GaugeRecord&) = default;
};

/// Contiguous period of positive gauge rate, boundaries inclusive.
struct RainEvent {
  Timestamp start;
  Timestamp end;
  double peak_rate_mm_per_hr;

  friend bool operator==(const RainEvent&, const RainEvent&) = default;
};

}  // namespace nimbus
