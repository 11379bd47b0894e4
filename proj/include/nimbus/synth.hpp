#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "nimbus/ingest.hpp"
#include "nimbus/luminance.hpp"
#include "nimbus/series.hpp"
#include "nimbus/solar.hpp"

namespace nimbus::synth {

enum class OutputMode { images, luminance };

/// Parameters of a one-day synthetic scenario. The index trace sits at
/// `clear_level`, descends linearly over `ramp_minutes` before each event,
/// holds `rain_level` during it and recovers symmetrically afterwards.
struct ScenarioConfig {
  std::chrono::year_month_day date{std::chrono::year{2015}, std::chrono::month{12},
                                   std::chrono::day{11}};
  GeoLocation location = GeoLocation::singapore();
  std::chrono::minutes tz_offset{480};

  int n_events = 3;
  int event_minutes = 30;
  double clear_level = 1.0;
  double rain_level = 0.02;
  double ramp_minutes = 240.0;
  double noise_sigma = 0.01;
  std::uint64_t seed = 1;

  int cadence_minutes = 2;        // imager interval
  int gauge_cadence_minutes = 1;
  int min_separation_minutes = 90;  // start to start
  double rain_rate_mm_per_hr = 12.0;
  /// Events (with their +/-15 min margin) are placed where the sun is
  /// higher than this zenith.
  double placement_max_zenith = 80.0;

  /// L_c = alpha * G_c; maps the zenith-0 clear-sky GHI to 0.7.
  double alpha = 0.7 / 1005.8726325113698;
  int tile_size = 64;
  OutputMode mode = OutputMode::images;

  /// Throws ConfigError when the invariants on levels, ramp or counts fail.
  void validate() const;
};

struct Frame {
  Timestamp timestamp;
  double target_index;  // before noise
  double index;         // after noise, clamped at 0
  double g_c;
  double l_c;
  double l_m;
};

struct Scenario {
  std::vector<RainEvent> events;
  std::vector<Frame> frames;
  std::vector<GaugeRecord> gauge;
  Timestamp start;
  Timestamp end;
};

/// Noiseless V-shaped index at `t` for the given events.
double target_index(Timestamp t, std::span<const RainEvent> events, const ScenarioConfig& cfg);

/// Deterministic for a given config (including seed).
Scenario generate(const ScenarioConfig& cfg);

/// Flat tile whose mean_luminance equals `l_m` to within 1/(255 * pixels).
/// Two adjacent gray levels are interleaved evenly.
SkyImage render_tile(Timestamp t, double l_m, int size);

/// Writes manifest.json, images/ or luminance.csv, gauge.csv and
/// truth_events.json into `dir` (created if missing).
void write_dataset(const Scenario& scenario, const ScenarioConfig& cfg,
                   const std::filesystem::path& dir);

std::string events_to_json(std::span<const RainEvent> events, std::chrono::minutes utc_offset);
std::vector<RainEvent> load_events_json(const std::filesystem::path& file);

}  // namespace nimbus::synth
