#include "nimbus/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "json.hpp"
#include "nimbus/atomic_file.hpp"
#include "nimbus/calibration.hpp"
#include "nimbus/error.hpp"
#include "nimbus/image_io.hpp"

namespace nimbus::synth {
namespace {

using namespace std::chrono;
namespace fs = std::filesystem;

std::string image_filename(Timestamp t, minutes utc_offset) {
  const auto local = t + utc_offset;
  const auto day_point = floor<days>(local);
  const year_month_day date{day_point};
  const hh_mm_ss tod{local - day_point};
  return fmt::format("{:04}-{:02}-{:02}-{:02}-{:02}-{:02}.png", int(date.year()), unsigned(date.month()),
                     unsigned(date.day()), tod.hours().count(), tod.minutes().count(), tod.seconds().count());
}

// Event start offsets (minutes after local midnight), sorted.
std::vector<int> place_events(const ScenarioConfig& cfg, Timestamp day_start, std::mt19937_64& rng) {
  if (cfg.n_events == 0) return {};

  int first = -1, last = -1;
  for (int m = 0; m < 24 * 60; ++m) {
    if (solar_zenith_angle(cfg.location, day_start + minutes{m}) < cfg.placement_max_zenith) {
      if (first < 0) first = m;
      last = m;
    }
  }
  const int margin = static_cast<int>(default_rain_window.count());
  const int step = cfg.gauge_cadence_minutes;
  const int lo = (first + margin + step - 1) / step;
  const int hi = (last - margin - cfg.event_minutes) / step;
  if (first < 0 || hi < lo) {
    throw ConfigError("synth", "not enough daylight to place rain events on this date");
  }

  std::uniform_int_distribution<int> pick(lo, hi);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    std::vector<int> starts;
    for (int i = 0; i < cfg.n_events; ++i) starts.push_back(pick(rng) * step);
    std::sort(starts.begin(), starts.end());
    bool separated = true;
    for (std::size_t i = 1; i < starts.size(); ++i) {
      separated = separated && starts[i] - starts[i - 1] >= cfg.min_separation_minutes;
    }
    if (separated) return starts;
  }
  throw ConfigError("synth", fmt::format("cannot place {} events {} min apart in daylight", cfg.n_events,
                                         cfg.min_separation_minutes));
}

}  // namespace

void ScenarioConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("synth", msg); };
  if (!date.ok()) fail("invalid scenario date");
  if (n_events < 0) fail("event count must be >= 0");
  if (event_minutes < 0) fail("event duration must be >= 0");
  if (!(rain_level >= 0.0 && rain_level < clear_level)) {
    fail(fmt::format("need 0 <= rain level ({}) < clear level ({})", rain_level, clear_level));
  }
  if (!(ramp_minutes >= 0.0)) fail("ramp minutes must be >= 0");
  if (!(noise_sigma >= 0.0)) fail("noise sigma must be >= 0");
  if (cadence_minutes < 1 || gauge_cadence_minutes < 1) fail("cadences must be >= 1 minute");
  if (event_minutes % gauge_cadence_minutes != 0) fail("event duration must be a multiple of the gauge cadence");
  if (min_separation_minutes <= event_minutes + static_cast<int>(default_merge_gap.count())) {
    fail("event separation must exceed duration plus the event merge gap");
  }
  if (!(rain_rate_mm_per_hr > 0.0)) fail("rain rate must be > 0");
  if (!(alpha > 0.0)) fail("calibration alpha must be > 0");
  if (tile_size < 1) fail("tile size must be >= 1");
}

double target_index(Timestamp t, std::span<const RainEvent> events, const ScenarioConfig& cfg) {
  double level = cfg.clear_level;
  for (const auto& ev : events) {
    double d = 0.0;
    if (t < ev.start) d = minutes_between(t, ev.start);
    if (t > ev.end) d = minutes_between(ev.end, t);
    double v = cfg.clear_level;
    if (d == 0.0) {
      v = cfg.rain_level;
    } else if (d < cfg.ramp_minutes) {
      v = cfg.rain_level + (cfg.clear_level - cfg.rain_level) * d / cfg.ramp_minutes;
    }
    level = std::min(level, v);
  }
  return level;
}

Scenario generate(const ScenarioConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);

  Scenario sc;
  sc.start = Timestamp{sys_days{cfg.date} - cfg.tz_offset};
  sc.end = sc.start + hours{24} - seconds{1};

  for (const int s : place_events(cfg, sc.start, rng)) {
    const auto start = sc.start + minutes{s};
    sc.events.push_back({start, start + minutes{cfg.event_minutes}, cfg.rain_rate_mm_per_hr});
  }

  std::normal_distribution<double> noise(0.0, 1.0);
  for (auto t = sc.start; t <= sc.end; t += minutes{cfg.cadence_minutes}) {
    const auto ctx = solar_context(cfg.location, t);
    const double g_c = clear_sky_ghi(ctx.zenith_deg, ctx.eccentricity).value();
    if (g_c <= 0.0) continue;
    Frame f{};
    f.timestamp = t;
    f.target_index = target_index(t, sc.events, cfg);
    f.index = std::max(0.0, f.target_index + cfg.noise_sigma * noise(rng));
    f.g_c = g_c;
    f.l_c = cfg.alpha * g_c;
    f.l_m = std::clamp(f.index * f.l_c, 0.0, 1.0);
    sc.frames.push_back(f);
  }

  for (auto t = sc.start; t <= sc.end; t += minutes{cfg.gauge_cadence_minutes}) {
    const bool raining = std::any_of(sc.events.begin(), sc.events.end(),
                                     [&](const RainEvent& ev) { return t >= ev.start && t <= ev.end; });
    sc.gauge.push_back({t, raining ? cfg.rain_rate_mm_per_hr : 0.0});
  }
  return sc;
}

SkyImage render_tile(Timestamp t, double l_m, int size) {
  const double level = std::clamp(l_m, 0.0, 1.0) * 255.0;
  const auto lo = static_cast<int>(std::floor(level));
  const std::size_t n = static_cast<std::size_t>(size) * static_cast<std::size_t>(size);
  const auto n_hi = lo >= 255 ? 0 : static_cast<std::size_t>(std::llround((level - lo) * static_cast<double>(n)));

  std::vector<Rgb> pixels(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Bresenham-style spread of the n_hi brighter pixels over the tile.
    const bool hi = ((i + 1) * n_hi) / n > (i * n_hi) / n;
    const auto v = static_cast<std::uint8_t>(std::min(255, lo + (hi ? 1 : 0)));
    pixels[i] = {v, v, v};
  }
  return SkyImage{t, size, size, std::move(pixels)};
}

std::string events_to_json(std::span<const RainEvent> events, minutes utc_offset) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& ev : events) {
    j.push_back({{"start", format_iso8601(ev.start, utc_offset)},
                 {"end", format_iso8601(ev.end, utc_offset)},
                 {"peak_rate", ev.peak_rate_mm_per_hr}});
  }
  return j.dump(2) + "\n";
}

std::vector<RainEvent> load_events_json(const fs::path& file) {
  std::vector<RainEvent> events;
  try {
    for (const auto& e : nlohmann::json::parse(read_file(file))) {
      events.push_back({parse_iso8601(e.at("start").get<std::string>()),
                        parse_iso8601(e.at("end").get<std::string>()), e.at("peak_rate").get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError("synth", fmt::format("{}: invalid events file: {}", file.string(), e.what()));
  }
  return events;
}

void write_dataset(const Scenario& scenario, const ScenarioConfig& cfg, const fs::path& dir) {
  fs::create_directories(dir);

  Manifest manifest;
  manifest.location = cfg.location;
  manifest.tz_offset = cfg.tz_offset;
  manifest.gauge = "gauge.csv";
  manifest.calibration = LuminanceCalibration{cfg.alpha};
  manifest.crop = CropSpec::fixed(cfg.tile_size);
  manifest.start = scenario.start;
  manifest.end = scenario.end;

  if (cfg.mode == OutputMode::images) {
    fs::create_directories(dir / "images");
    for (const auto& f : scenario.frames) {
      const auto name = image_filename(f.timestamp, cfg.tz_offset);
      write_png(dir / "images" / name, render_tile(f.timestamp, f.l_m, cfg.tile_size));
      manifest.images.push_back(fs::path("images") / name);
    }
  } else {
    std::vector<LuminanceObservation> rows;
    rows.reserve(scenario.frames.size());
    for (const auto& f : scenario.frames) rows.push_back({f.timestamp, f.l_m});
    write_file_atomic(dir / "luminance.csv", format_luminance_csv(rows, cfg.tz_offset));
    manifest.luminance = "luminance.csv";
  }

  write_file_atomic(dir / "gauge.csv", format_gauge_csv(scenario.gauge, cfg.tz_offset));
  write_file_atomic(dir / "truth_events.json", events_to_json(scenario.events, cfg.tz_offset));
  write_file_atomic(dir / "manifest.json", manifest_to_json(manifest));
}

}  // namespace nimbus::synth
