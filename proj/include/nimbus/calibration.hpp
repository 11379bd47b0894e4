#pragma once

#include <chrono>
#include <span>
#include <vector>

#include "nimbus/index.hpp"
#include "nimbus/series.hpp"

namespace nimbus {

inline constexpr std::chrono::minutes default_merge_gap{10};
inline constexpr std::chrono::minutes default_rain_window{15};

/// Groups positive-rate gauge records into events. Runs whose gap
/// (next start - previous end) is at most `merge_gap` are merged.
/// Throws InputError if timestamps are not strictly increasing or a rate
/// is negative.
std::vector<RainEvent> build_events(std::span<const GaugeRecord> gauge,
                                    std::chrono::minutes merge_gap = default_merge_gap);

struct LabeledSample {
  double index;
  bool within_window;
};

/// Marks each sample that falls in [start - window, end + window] of any
/// event (closed interval). Output order follows the input.
std::vector<LabeledSample> label_samples(std::span<const IndexSample> samples,
                                         std::span<const RainEvent> events,
                                         std::chrono::minutes window = default_rain_window);

/// Right-continuous empirical distribution function of a finite sample.
class EmpiricalCdf {
 public:
  /// Throws DomainError on an empty sample or non-finite values.
  explicit EmpiricalCdf(std::vector<double> values);

  /// Fraction of values <= x.
  double operator()(double x) const;
  /// Fraction of values < x (the left limit at x).
  double below(double x) const;

  std::size_t size() const noexcept { return sorted_.size(); }
  double min() const noexcept { return sorted_.front(); }
  double max() const noexcept { return sorted_.back(); }

 private:
  std::vector<double> sorted_;
};

inline EmpiricalCdf empirical_cdf(std::vector<double> values) {
  return EmpiricalCdf(std::move(values));
}

struct OcPoint {
  double threshold;
  double pct_within_below;
  double pct_outside_below;

  friend bool operator==(const OcPoint&, const OcPoint&) = default;
};

/// Evenly spaced thresholds from `start` to `end` inclusive, rounded to 1e-9
/// so that e.g. the eighth point of 0.01:0.01:0.2 is exactly 0.08.
/// Throws ConfigError for a non-positive step or end < start.
std::vector<double> threshold_grid(double start = 0.01, double end = 0.20, double step = 0.01);

/// Percentage of within-window and outside-window samples whose index is
/// strictly below each threshold. Throws CalibrationError if either class
/// is empty.
std::vector<OcPoint> oc_curve(std::span<const LabeledSample> labeled,
                              std::span<const double> thresholds);

/// Threshold of the point (x = pct_outside_below, y = pct_within_below)
/// farthest from the chord through the first and last points. Ties go to
/// the smaller threshold. Throws CalibrationError for fewer than 3 points
/// or an unsorted curve.
double select_elbow(std::span<const OcPoint> curve);

}  // namespace nimbus
