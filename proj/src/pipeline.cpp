#include "nimbus/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "json.hpp"
#include "nimbus/error.hpp"
#include "nimbus/image_io.hpp"

namespace nimbus {

std::vector<LuminanceObservation> measure_images(std::span<const ImageRef> images, const CropSpec& crop,
                                                 const LuminanceWeights& weights) {
  std::vector<LuminanceObservation> out;
  out.reserve(images.size());
  for (const auto& ref : images) {
    const auto image = read_image(ref.path, ref.timestamp);
    const int side = crop.resolve(image.width(), image.height());
    out.push_back({ref.timestamp, mean_luminance(crop_center(image, side), weights)});
  }
  return out;
}

std::vector<IrradianceLuminancePair> pair_with_ghi(std::span<const LuminanceObservation> observations,
                                                   const GeoLocation& location) {
  std::vector<IrradianceLuminancePair> pairs;
  pairs.reserve(observations.size());
  for (const auto& obs : observations) {
    const auto ctx = solar_context(location, obs.timestamp);
    pairs.push_back({clear_sky_ghi(ctx.zenith_deg, ctx.eccentricity).value(), obs.l_m});
  }
  return pairs;
}

std::vector<TimeInterval> parse_interval_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw InputError("luminance", fmt::format("cannot open {}", file.string()));
  std::vector<TimeInterval> intervals;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != "start,end") {
        throw InputError("luminance", fmt::format("{}:1: expected header 'start,end'", file.string()));
      }
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw InputError("luminance", fmt::format("{}:{}: expected 2 fields", file.string(), line_no));
    }
    try {
      const auto start = parse_iso8601(std::string_view(line).substr(0, comma));
      const auto end = parse_iso8601(std::string_view(line).substr(comma + 1));
      if (end < start) throw InputError("luminance", "interval end precedes start");
      intervals.emplace_back(start, end);
    } catch (const Error& e) {
      throw InputError("luminance", fmt::format("{}:{}: {}", file.string(), line_no, e.what()));
    }
  }
  return intervals;
}

LuminanceCalibration fit_from_intervals(std::span<const LuminanceObservation> observations,
                                        const GeoLocation& location,
                                        std::span<const TimeInterval> clear_intervals) {
  std::vector<LuminanceObservation> selected;
  for (const auto& obs : observations) {
    const bool clear = std::any_of(clear_intervals.begin(), clear_intervals.end(), [&](const auto& iv) {
      return obs.timestamp >= iv.first && obs.timestamp <= iv.second;
    });
    if (clear) selected.push_back(obs);
  }
  auto pairs = pair_with_ghi(selected, location);
  std::erase_if(pairs, [](const auto& p) { return !(p.ghi > 0.0); });
  return fit_calibration(pairs);
}

IndexSeries compute_index_series(std::span<const LuminanceObservation> observations,
                                 const GeoLocation& location, const LuminanceCalibration& calibration,
                                 const DetectionConfig& config, double epsilon) {
  IndexSeries series;
  series.rows.reserve(observations.size());
  for (const auto& obs : observations) {
    const auto ctx = solar_context(location, obs.timestamp);
    if (ctx.zenith_deg >= config.daylight_max_zenith()) {
      ++series.excluded;
      continue;
    }
    const auto g_c = clear_sky_ghi(ctx.zenith_deg, ctx.eccentricity);
    const double l_c = clear_sky_luminance(g_c, calibration);
    if (!(l_c > epsilon)) {
      ++series.excluded;
      continue;
    }
    series.rows.push_back(
        {obs.timestamp, ctx.zenith_deg, obs.l_m, g_c.value(), l_c, clearness_index(obs.l_m, l_c, epsilon)});
  }
  return series;
}

std::string format_index_csv(std::span<const IndexRow> rows, std::chrono::minutes utc_offset) {
  std::string out = "timestamp,l_m,g_c,l_c,index\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{}\n", format_iso8601(r.timestamp, utc_offset), r.l_m,
                       r.g_c, r.l_c, r.index);
  }
  return out;
}

CalibrationRun run_calibration(const IndexSeries& series, std::span<const GaugeRecord> gauge,
                               const CalibrationSettings& settings) {
  CalibrationRun run;
  run.events = build_events(gauge, settings.merge_gap);

  std::vector<Timestamp> times;
  times.reserve(series.rows.size());
  for (const auto& r : series.rows) times.push_back(r.timestamp);
  const auto matches = align(times, gauge, settings.tolerance);

  for (std::size_t i = 0; i < series.rows.size(); ++i) {
    if (!matches[i].matched()) {
      ++run.n_unmatched;
      continue;
    }
    const auto& r = series.rows[i];
    run.samples.push_back({r.timestamp, r.index, minutes_to_nearest_event(r.timestamp, run.events)});
  }
  run.labeled = label_samples(run.samples, run.events, settings.window);
  for (const auto& s : run.labeled) (s.within_window ? run.n_within : run.n_outside) += 1;

  run.curve = oc_curve(run.labeled, settings.thresholds);
  run.selected_threshold = select_elbow(run.curve);
  return run;
}

std::string format_cdf_csv(std::span<const LabeledSample> labeled, double step) {
  if (!(step > 0.0)) throw ConfigError("calibration", "CDF step must be > 0");
  std::vector<double> within, outside;
  for (const auto& s : labeled) (s.within_window ? within : outside).push_back(s.index);
  const EmpiricalCdf cdf_within(std::move(within));
  const EmpiricalCdf cdf_outside(std::move(outside));

  const double top = std::max(cdf_within.max(), cdf_outside.max());
  const auto count = static_cast<std::size_t>(std::ceil(top / step - 1e-9)) + 1;
  std::string out = "x,cdf_within,cdf_outside\n";
  for (std::size_t k = 0; k < count; ++k) {
    const double x = std::round(static_cast<double>(k) * step * 1e9) / 1e9;
    out += fmt::format("{:.4f},{:.6f},{:.6f}\n", x, cdf_within(x), cdf_outside(x));
  }
  return out;
}

std::string format_oc_csv(std::span<const OcPoint> curve) {
  std::string out = "threshold,pct_within_below,pct_outside_below\n";
  for (const auto& p : curve) {
    out += fmt::format("{:.4f},{:.4f},{:.4f}\n", p.threshold, p.pct_within_below, p.pct_outside_below);
  }
  return out;
}

std::string format_calibration_summary(const CalibrationRun& run) {
  const auto point = std::find_if(run.curve.begin(), run.curve.end(),
                                  [&](const OcPoint& p) { return p.threshold == run.selected_threshold; });
  nlohmann::ordered_json j;
  j["selected_threshold"] = run.selected_threshold;
  j["n_within"] = run.n_within;
  j["n_outside"] = run.n_outside;
  j["n_unmatched"] = run.n_unmatched;
  j["n_events"] = run.events.size();
  if (point != run.curve.end()) {
    j["pct_within_below"] = point->pct_within_below;
    j["pct_outside_below"] = point->pct_outside_below;
  }
  return j.dump(2) + "\n";
}

std::string format_vcurve_csv(std::span<const IndexSample> samples, std::chrono::minutes utc_offset) {
  std::string out = "timestamp,minutes_to_nearest_rain,index\n";
  for (const auto& s : samples) {
    const auto minutes = s.minutes_to_nearest_rain ? fmt::format("{:.2f}", *s.minutes_to_nearest_rain)
                                                   : std::string{};
    out += fmt::format("{},{},{}\n", format_iso8601(s.timestamp, utc_offset), minutes, s.index);
  }
  return out;
}

std::vector<DetectionRow> run_detection(const IndexSeries& series, const DetectionConfig& config) {
  std::vector<DetectionRow> rows;
  rows.reserve(series.rows.size());
  for (const auto& r : series.rows) rows.push_back({r.timestamp, r.index, detect_onset(r.index, config)});
  return rows;
}

std::string format_detection_csv(std::span<const DetectionRow> rows, std::chrono::minutes utc_offset) {
  std::string out = "timestamp,index,onset_flag\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{}\n", format_iso8601(r.timestamp, utc_offset), r.index, r.onset ? 1 : 0);
  }
  return out;
}

}  // namespace nimbus
