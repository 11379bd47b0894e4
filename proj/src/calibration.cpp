#include "nimbus/calibration.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "nimbus/error.hpp"

namespace nimbus {

std::vector<RainEvent> build_events(std::span<const GaugeRecord> gauge, std::chrono::minutes merge_gap) {
  if (merge_gap.count() < 0) throw ConfigError("calibration", "merge gap must be >= 0");

  std::vector<RainEvent> events;
  bool in_run = false;
  for (std::size_t i = 0; i < gauge.size(); ++i) {
    const auto& rec = gauge[i];
    if (i > 0 && !(gauge[i - 1].timestamp < rec.timestamp)) {
      throw InputError("calibration", fmt::format("gauge records not strictly increasing at record {}", i));
    }
    if (!std::isfinite(rec.rate_mm_per_hr) || rec.rate_mm_per_hr < 0.0) {
      throw InputError("calibration", fmt::format("gauge rate {} at record {} is negative", rec.rate_mm_per_hr, i));
    }
    if (rec.rate_mm_per_hr <= 0.0) {
      in_run = false;
      continue;
    }

    // Extend the current run, or merge a new run across a short dry gap.
    if (!events.empty() && (in_run || rec.timestamp - events.back().end <= merge_gap)) {
      auto& ev = events.back();
      ev.end = rec.timestamp;
      ev.peak_rate_mm_per_hr = std::max(ev.peak_rate_mm_per_hr, rec.rate_mm_per_hr);
    } else {
      events.push_back({rec.timestamp, rec.timestamp, rec.rate_mm_per_hr});
    }
    in_run = true;
  }
  return events;
}

std::vector<LabeledSample> label_samples(std::span<const IndexSample> samples,
                                         std::span<const RainEvent> events,
                                         std::chrono::minutes window) {
  if (window.count() < 0) throw ConfigError("calibration", "rain window must be >= 0");

  // Widened event intervals, sorted and merged so one forward sweep suffices.
  std::vector<std::pair<Timestamp, Timestamp>> spans;
  spans.reserve(events.size());
  for (const auto& ev : events) spans.emplace_back(ev.start - window, ev.end + window);
  std::sort(spans.begin(), spans.end());
  std::vector<std::pair<Timestamp, Timestamp>> merged;
  for (const auto& s : spans) {
    if (!merged.empty() && s.first <= merged.back().second) {
      merged.back().second = std::max(merged.back().second, s.second);
    } else {
      merged.push_back(s);
    }
  }

  std::vector<LabeledSample> out;
  out.reserve(samples.size());
  for (const auto& sample : samples) {
    const auto it = std::upper_bound(merged.begin(), merged.end(), sample.timestamp,
                                     [](Timestamp t, const auto& s) { return t < s.first; });
    const bool within = it != merged.begin() && sample.timestamp <= std::prev(it)->second;
    out.push_back({sample.index, within});
  }
  return out;
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> values) : sorted_(std::move(values)) {
  if (sorted_.empty()) throw DomainError("calibration", "empirical CDF of an empty sample");
  if (!std::all_of(sorted_.begin(), sorted_.end(), [](double v) { return std::isfinite(v); })) {
    throw DomainError("calibration", "empirical CDF sample contains non-finite values");
  }
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::operator()(double x) const {
  const auto n = std::upper_bound(sorted_.begin(), sorted_.end(), x) - sorted_.begin();
  return static_cast<double>(n) / static_cast<double>(sorted_.size());
}

double EmpiricalCdf::below(double x) const {
  const auto n = std::lower_bound(sorted_.begin(), sorted_.end(), x) - sorted_.begin();
  return static_cast<double>(n) / static_cast<double>(sorted_.size());
}

std::vector<double> threshold_grid(double start, double end, double step) {
  if (!(step > 0.0) || !std::isfinite(start) || !std::isfinite(end) || end < start) {
    throw ConfigError("calibration",
                      fmt::format("invalid threshold grid start={} end={} step={}", start, end, step));
  }
  const auto count = static_cast<std::size_t>(std::floor((end - start) / step + 1e-9)) + 1;
  std::vector<double> grid;
  grid.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    grid.push_back(std::round((start + static_cast<double>(k) * step) * 1e9) / 1e9);
  }
  return grid;
}

std::vector<OcPoint> oc_curve(std::span<const LabeledSample> labeled, std::span<const double> thresholds) {
  std::vector<double> within, outside;
  for (const auto& s : labeled) (s.within_window ? within : outside).push_back(s.index);
  if (within.empty() || outside.empty()) {
    throw CalibrationError("calibration",
                           fmt::format("OC curve needs both classes (within={}, outside={})",
                                       within.size(), outside.size()));
  }
  std::sort(within.begin(), within.end());
  std::sort(outside.begin(), outside.end());

  auto pct_below = [](const std::vector<double>& sorted, double tau) {
    const auto n = std::lower_bound(sorted.begin(), sorted.end(), tau) - sorted.begin();
    return 100.0 * static_cast<double>(n) / static_cast<double>(sorted.size());
  };

  std::vector<OcPoint> curve;
  curve.reserve(thresholds.size());
  for (double tau : thresholds) curve.push_back({tau, pct_below(within, tau), pct_below(outside, tau)});
  return curve;
}

double select_elbow(std::span<const OcPoint> curve) {
  if (curve.size() < 3) {
    throw CalibrationError("calibration",
                           fmt::format("elbow selection needs at least 3 points, got {}", curve.size()));
  }
  for (std::size_t i = 1; i < curve.size(); ++i) {
    if (!(curve[i - 1].threshold < curve[i].threshold)) {
      throw CalibrationError("calibration", "OC curve must be sorted by increasing threshold");
    }
  }

  const auto& a = curve.front();
  const auto& b = curve.back();
  const double dx = b.pct_outside_below - a.pct_outside_below;
  const double dy = b.pct_within_below - a.pct_within_below;
  const double chord = std::hypot(dx, dy);

  auto distance = [&](const OcPoint& p) {
    const double px = p.pct_outside_below - a.pct_outside_below;
    const double py = p.pct_within_below - a.pct_within_below;
    const double cross = std::abs(dx * py - dy * px);
    // Degenerate chord: fall back to distance from the first point.
    return chord > 0.0 ? cross / chord : std::hypot(px, py);
  };

  // Relative slack so rounding noise on collinear points cannot break the
  // smaller-threshold tie rule.
  const double scale = std::max({chord, std::abs(a.pct_outside_below), std::abs(a.pct_within_below), 1e-300});
  const double slack = 1e-9 * scale;

  std::size_t best = 0;
  double best_distance = distance(curve[0]);
  for (std::size_t i = 1; i < curve.size(); ++i) {
    const double d = distance(curve[i]);
    if (d > best_distance + slack) {
      best = i;
      best_distance = d;
    }
  }
  return curve[best].threshold;
}

}  // namespace nimbus
