#pragma once

#include <chrono>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nimbus/calibration.hpp"
#include "nimbus/index.hpp"
#include "nimbus/ingest.hpp"
#include "nimbus/luminance.hpp"
#include "nimbus/solar.hpp"

namespace nimbus {

/// Measured luminance of every referenced image after the centre crop.
std::vector<LuminanceObservation> measure_images(std::span<const ImageRef> images,
                                                 const CropSpec& crop,
                                                 const LuminanceWeights& weights = {});

/// Clear-sky irradiance at each observation time.
std::vector<IrradianceLuminancePair> pair_with_ghi(std::span<const LuminanceObservation> observations,
                                                   const GeoLocation& location);

using TimeInterval = std::pair<Timestamp, Timestamp>;

/// `start,end` rows of ISO-8601 timestamps marking cloudless periods.
std::vector<TimeInterval> parse_interval_csv(const std::filesystem::path& file);

/// Fits the irradiance-luminance map on observations inside `clear_intervals`
/// with the sun above the horizon.
LuminanceCalibration fit_from_intervals(std::span<const LuminanceObservation> observations,
                                        const GeoLocation& location,
                                        std::span<const TimeInterval> clear_intervals);

struct IndexRow {
  Timestamp timestamp;
  double zenith_deg;
  double l_m;
  double g_c;
  double l_c;
  double index;
};

struct IndexSeries {
  std::vector<IndexRow> rows;
  /// Observations dropped for a low sun or vanishing clear-sky luminance.
  std::size_t excluded = 0;
};

/// Index for every daylight observation, in timestamp order.
IndexSeries compute_index_series(std::span<const LuminanceObservation> observations,
                                 const GeoLocation& location,
                                 const LuminanceCalibration& calibration,
                                 const DetectionConfig& config,
                                 double epsilon = default_night_epsilon);

std::string format_index_csv(std::span<const IndexRow> rows, std::chrono::minutes utc_offset);

struct CalibrationSettings {
  std::chrono::minutes window = default_rain_window;
  std::chrono::minutes merge_gap = default_merge_gap;
  std::chrono::seconds tolerance = default_align_tolerance;
  std::vector<double> thresholds = threshold_grid();
  double cdf_step = 0.01;
};

struct CalibrationRun {
  std::vector<RainEvent> events;
  /// Index samples with a gauge record inside the alignment tolerance.
  std::vector<IndexSample> samples;
  std::vector<LabeledSample> labeled;
  std::vector<OcPoint> curve;
  double selected_threshold = 0.0;
  std::size_t n_within = 0;
  std::size_t n_outside = 0;
  std::size_t n_unmatched = 0;
};

/// Event extraction, labelling, OC sweep and elbow selection in one pass.
CalibrationRun run_calibration(const IndexSeries& series, std::span<const GaugeRecord> gauge,
                               const CalibrationSettings& settings = {});

/// `x,cdf_within,cdf_outside` on a grid from 0 to the largest index.
std::string format_cdf_csv(std::span<const LabeledSample> labeled, double step);
std::string format_oc_csv(std::span<const OcPoint> curve);
std::string format_calibration_summary(const CalibrationRun& run);
/// `timestamp,minutes_to_nearest_rain,index` for plotting the V-shaped trend.
std::string format_vcurve_csv(std::span<const IndexSample> samples, std::chrono::minutes utc_offset);

struct DetectionRow {
  Timestamp timestamp;
  double index;
  bool onset;
};

std::vector<DetectionRow> run_detection(const IndexSeries& series, const DetectionConfig& config);
std::string format_detection_csv(std::span<const DetectionRow> rows, std::chrono::minutes utc_offset);

}  // namespace nimbus
