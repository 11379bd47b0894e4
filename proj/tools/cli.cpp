#include "cli.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "nimbus/atomic_file.hpp"
#include "nimbus/calibration.hpp"
#include "nimbus/error.hpp"
#include "nimbus/index.hpp"
#include "nimbus/ingest.hpp"
#include "nimbus/pipeline.hpp"
#include "nimbus/solar.hpp"
#include "nimbus/synth.hpp"

namespace nimbus::cli {
namespace {

namespace fs = std::filesystem;
using std::chrono::minutes;
using std::chrono::seconds;

// Options shared by the subcommands that read sky observations.
struct SourceOptions {
  std::optional<std::string> dataset;
  std::optional<std::string> images;
  std::optional<std::string> luminance;
  std::optional<std::string> calibration;
  std::optional<std::string> clear_intervals;
  std::optional<std::string> pattern;
  std::optional<double> lat;
  std::optional<double> lon;
  std::optional<int> tz_offset;
  std::optional<int> crop_side;
  std::optional<double> crop_fraction;
  double max_zenith = default_daylight_max_zenith;
};

struct Source {
  GeoLocation location = GeoLocation::singapore();
  minutes tz_offset{0};
  std::vector<ImageRef> image_refs;
  std::vector<LuminanceObservation> observations;
  LuminanceCalibration calibration{1.0};
  std::optional<fs::path> manifest_gauge;
  std::optional<Timestamp> start;
  std::optional<Timestamp> end;
};

// NIMBUS_<FLAG_NAME> environment fallback for every value option.
void add_env_names(CLI::App* sub) {
  for (auto* opt : sub->get_options()) {
    const auto& name = opt->get_single_name();
    if (opt->get_expected_min() == 0 || name == "help" || name == "out" || name == "out-dir") continue;
    std::string env = "NIMBUS_";
    for (char c : name) env += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    opt->envname(env);
  }
}

void add_source_options(CLI::App* sub, SourceOptions& o) {
  sub->add_option("--dataset", o.dataset, "Dataset directory containing manifest.json");
  auto* images = sub->add_option("--images", o.images, "Directory of timestamped sky images");
  auto* lum = sub->add_option("--luminance", o.luminance, "CSV of timestamp,l_m instead of images");
  images->excludes(lum);
  auto* cal = sub->add_option("--calibration", o.calibration, "Calibration JSON {alpha, beta}");
  auto* clear = sub->add_option("--clear-intervals", o.clear_intervals,
                                "CSV start,end of clear-sky periods to fit the calibration on");
  cal->excludes(clear);
  sub->add_option("--pattern", o.pattern, "strptime pattern of the filename timestamp prefix");
  sub->add_option("--lat", o.lat, "Latitude, degrees")->check(CLI::Range(-90.0, 90.0));
  sub->add_option("--lon", o.lon, "Longitude, degrees")->check(CLI::Range(-180.0, 180.0));
  sub->add_option("--tz-offset-min", o.tz_offset, "Local clock offset from UTC, minutes");
  auto* side = sub->add_option("--crop-side", o.crop_side, "Centre crop side, pixels (default 2000)")
                   ->check(CLI::PositiveNumber);
  auto* frac = sub->add_option("--crop-fraction", o.crop_fraction,
                               "Centre crop side as a fraction of the shorter dimension")
                   ->check(CLI::Range(0.0, 1.0));
  side->excludes(frac);
  sub->add_option("--max-zenith", o.max_zenith, "Drop frames with the sun at or beyond this zenith")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 90.0));
}

Source resolve_source(const SourceOptions& o) {
  Source src;
  Manifest manifest;
  fs::path base;
  if (o.dataset) {
    base = *o.dataset;
    manifest = load_manifest(base / "manifest.json");
  }

  src.location = GeoLocation{o.lat.value_or(manifest.location.latitude()),
                             o.lon.value_or(manifest.location.longitude())};
  src.tz_offset = o.tz_offset ? minutes{*o.tz_offset} : manifest.tz_offset;
  src.start = manifest.start;
  src.end = manifest.end;
  if (manifest.gauge) src.manifest_gauge = base / *manifest.gauge;
  const auto pattern = o.pattern.value_or(manifest.pattern);

  CropSpec crop = manifest.crop;
  if (o.crop_side) crop = CropSpec::fixed(*o.crop_side);
  if (o.crop_fraction) crop = CropSpec::relative(*o.crop_fraction);

  if (o.images) {
    auto scan = scan_images(*o.images, pattern, src.tz_offset);
    src.image_refs = std::move(scan.images);
  } else if (o.luminance) {
    src.observations = parse_luminance_csv(*o.luminance);
  } else if (o.dataset && !manifest.images.empty()) {
    for (const auto& rel : manifest.images) {
      const auto t = parse_filename_timestamp(rel.filename().string(), pattern, src.tz_offset);
      if (!t) throw InputError("ingest", fmt::format("manifest image {} has no timestamp", rel.string()));
      src.image_refs.push_back({*t, base / rel});
    }
  } else if (o.dataset && manifest.luminance) {
    src.observations = parse_luminance_csv(base / *manifest.luminance);
  } else {
    throw ConfigError("cli", "one of --dataset, --images or --luminance is required");
  }
  if (!src.image_refs.empty()) src.observations = measure_images(src.image_refs, crop);

  if (o.clear_intervals) {
    src.calibration = fit_from_intervals(src.observations, src.location, parse_interval_csv(*o.clear_intervals));
  } else if (o.calibration) {
    src.calibration = load_calibration(*o.calibration);
  } else if (manifest.calibration) {
    src.calibration = *manifest.calibration;
  } else {
    src.calibration = fallback_calibration(pair_with_ghi(src.observations, src.location));
  }
  return src;
}

void emit(const std::optional<std::string>& path, const std::string& content, std::ostream& out) {
  if (path) {
    write_file_atomic(*path, content);
  } else {
    out << content;
  }
}

// ---------------------------------------------------------------------------

struct GhiOptions {
  double lat = 1.34;
  double lon = 103.68;
  std::string date;
  int tz_offset = 0;
  int step_minutes = 2;
  std::optional<std::string> out;
};

int run_ghi(const GhiOptions& o, std::ostream& out) {
  const GeoLocation location{o.lat, o.lon};
  const auto date = parse_date(o.date);
  const minutes offset{o.tz_offset};
  const Timestamp start{std::chrono::sys_days{date} - offset};

  std::string csv = "timestamp,zenith_deg,e0,ghi_wm2\n";
  for (auto t = start; t < start + std::chrono::hours{24}; t += minutes{o.step_minutes}) {
    const auto ctx = solar_context(location, t);
    const double ghi = clear_sky_ghi(ctx.zenith_deg, ctx.eccentricity).value();
    csv += fmt::format("{},{},{},{}\n", format_iso8601(t, offset), ctx.zenith_deg,
                       ctx.eccentricity, ghi);
  }
  emit(o.out, csv, out);
  return 0;
}

struct IndexOptions {
  SourceOptions source;
  std::optional<std::string> save_calibration;
  std::optional<std::string> out;
};

int run_index(const IndexOptions& o, std::ostream& out) {
  const auto src = resolve_source(o.source);
  const DetectionConfig config{default_critical_index, o.source.max_zenith};
  const auto series = compute_index_series(src.observations, src.location, src.calibration, config);
  if (o.save_calibration) write_file_atomic(*o.save_calibration, calibration_to_json(src.calibration));
  emit(o.out, format_index_csv(series.rows, src.tz_offset), out);
  return 0;
}

struct CalibrateOptions {
  SourceOptions source;
  std::optional<std::string> gauge;
  int window_min = 15;
  int merge_gap_min = 10;
  int tolerance_s = 90;
  double grid_start = 0.01;
  double grid_end = 0.20;
  double grid_step = 0.01;
  double cdf_step = 0.01;
  std::string out_dir;
};

int run_calibrate(const CalibrateOptions& o, std::ostream& out) {
  CalibrationSettings settings;
  settings.window = minutes{o.window_min};
  settings.merge_gap = minutes{o.merge_gap_min};
  settings.tolerance = seconds{o.tolerance_s};
  settings.thresholds = threshold_grid(o.grid_start, o.grid_end, o.grid_step);
  settings.cdf_step = o.cdf_step;

  const auto src = resolve_source(o.source);
  fs::path gauge_path;
  if (o.gauge) {
    gauge_path = *o.gauge;
  } else if (src.manifest_gauge) {
    gauge_path = *src.manifest_gauge;
  } else {
    throw ConfigError("cli", "--gauge is required when the dataset manifest names no gauge file");
  }
  auto gauge = parse_gauge_csv(gauge_path);

  if (!src.image_refs.empty()) {
    // Validates ordering and that both series lie in the declared range.
    auto lo = std::min(src.image_refs.front().timestamp, gauge.empty() ? src.image_refs.front().timestamp
                                                                       : gauge.front().timestamp);
    auto hi = std::max(src.image_refs.back().timestamp, gauge.empty() ? src.image_refs.back().timestamp
                                                                      : gauge.back().timestamp);
    const Dataset dataset{src.location, src.tz_offset, src.image_refs, gauge, src.calibration,
                          src.start.value_or(lo), src.end.value_or(hi)};
    (void)dataset;
  }

  const DetectionConfig config{default_critical_index, o.source.max_zenith};
  const auto series = compute_index_series(src.observations, src.location, src.calibration, config);
  const auto run = run_calibration(series, gauge, settings);

  const auto cdf = format_cdf_csv(run.labeled, settings.cdf_step);
  const auto oc = format_oc_csv(run.curve);
  const auto summary = format_calibration_summary(run);
  const auto vcurve = format_vcurve_csv(run.samples, src.tz_offset);

  const fs::path dir{o.out_dir};
  fs::create_directories(dir);
  write_file_atomic(dir / "cdf.csv", cdf);
  write_file_atomic(dir / "oc.csv", oc);
  write_file_atomic(dir / "vcurve.csv", vcurve);
  write_file_atomic(dir / "summary.json", summary);
  out << summary;
  return 0;
}

struct DetectOptions {
  SourceOptions source;
  double threshold = default_critical_index;
  std::optional<std::string> out;
};

int run_detect(const DetectOptions& o, std::ostream& out, std::ostream& err) {
  const DetectionConfig config{o.threshold, o.source.max_zenith};
  const auto src = resolve_source(o.source);
  const auto series = compute_index_series(src.observations, src.location, src.calibration, config);
  const auto rows = run_detection(series, config);
  emit(o.out, format_detection_csv(rows, src.tz_offset), out);

  const auto flagged = std::count_if(rows.begin(), rows.end(), [](const auto& r) { return r.onset; });
  err << fmt::format("detect: samples={} onset={} excluded={} threshold={}\n", rows.size(), flagged,
                     series.excluded, config.critical_index());
  return 0;
}

struct SimulateOptions {
  synth::ScenarioConfig cfg;
  std::string date = "2015-12-11";
  double lat = 1.34;
  double lon = 103.68;
  int tz_offset = 480;
  std::string mode = "images";
  std::string out_dir;
};

int run_simulate(SimulateOptions o, std::ostream& out) {
  o.cfg.date = parse_date(o.date);
  o.cfg.location = GeoLocation{o.lat, o.lon};
  o.cfg.tz_offset = minutes{o.tz_offset};
  o.cfg.mode = o.mode == "luminance" ? synth::OutputMode::luminance : synth::OutputMode::images;
  const auto scenario = synth::generate(o.cfg);
  synth::write_dataset(scenario, o.cfg, o.out_dir);
  out << fmt::format("simulate: frames={} events={} dir={}\n", scenario.frames.size(), scenario.events.size(),
                     o.out_dir);
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rainfall onset detection from whole-sky images", "nimbus"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file with option defaults")->envname("NIMBUS_CONFIG");

  GhiOptions ghi;
  auto* ghi_cmd = app.add_subcommand("ghi", "Clear-sky irradiance over one day");
  ghi_cmd->add_option("--lat", ghi.lat, "Latitude, degrees")->capture_default_str()->check(CLI::Range(-90.0, 90.0));
  ghi_cmd->add_option("--lon", ghi.lon, "Longitude, degrees")->capture_default_str()->check(CLI::Range(-180.0, 180.0));
  ghi_cmd->add_option("--date", ghi.date, "Local date YYYY-MM-DD")->required();
  ghi_cmd->add_option("--tz-offset-min", ghi.tz_offset, "Local clock offset from UTC, minutes")->capture_default_str();
  ghi_cmd->add_option("--step-minutes", ghi.step_minutes, "Sampling interval")->capture_default_str()->check(CLI::PositiveNumber);
  ghi_cmd->add_option("--out", ghi.out, "Output CSV (default stdout)");
  add_env_names(ghi_cmd);

  IndexOptions index;
  auto* index_cmd = app.add_subcommand("index", "Measured and clear-sky luminance with the clearness index");
  add_source_options(index_cmd, index.source);
  index_cmd->add_option("--save-calibration", index.save_calibration, "Write the calibration used to this JSON file");
  index_cmd->add_option("--out", index.out, "Output CSV (default stdout)");
  add_env_names(index_cmd);

  CalibrateOptions calibrate;
  auto* cal_cmd = app.add_subcommand("calibrate", "Label, sweep the OC curve and pick the critical index");
  add_source_options(cal_cmd, calibrate.source);
  cal_cmd->add_option("--gauge", calibrate.gauge, "Gauge CSV timestamp,rain_mm_per_hr");
  cal_cmd->add_option("--window-min", calibrate.window_min, "Rain window half-width")->capture_default_str()->check(CLI::NonNegativeNumber);
  cal_cmd->add_option("--merge-gap-min", calibrate.merge_gap_min, "Merge rain runs closer than this")->capture_default_str()->check(CLI::NonNegativeNumber);
  cal_cmd->add_option("--tolerance-s", calibrate.tolerance_s, "Image/gauge alignment tolerance")->capture_default_str()->check(CLI::NonNegativeNumber);
  cal_cmd->add_option("--grid-start", calibrate.grid_start)->capture_default_str();
  cal_cmd->add_option("--grid-end", calibrate.grid_end)->capture_default_str();
  cal_cmd->add_option("--grid-step", calibrate.grid_step)->capture_default_str();
  cal_cmd->add_option("--cdf-step", calibrate.cdf_step, "Grid step of cdf.csv")->capture_default_str();
  cal_cmd->add_option("--out-dir", calibrate.out_dir, "Directory for cdf.csv, oc.csv, vcurve.csv, summary.json")->required();
  add_env_names(cal_cmd);

  DetectOptions detect;
  auto* detect_cmd = app.add_subcommand("detect", "Flag frames whose index falls below the critical index");
  add_source_options(detect_cmd, detect.source);
  detect_cmd->add_option("--threshold", detect.threshold, "Critical clearness index")->capture_default_str();
  detect_cmd->add_option("--out", detect.out, "Output CSV (default stdout)");
  add_env_names(detect_cmd);

  SimulateOptions sim;
  auto& sc = sim.cfg;
  auto* sim_cmd = app.add_subcommand("simulate", "Write a synthetic dataset with planted rain events");
  sim_cmd->add_option("--out", sim.out_dir, "Dataset directory")->required();
  sim_cmd->add_option("--date", sim.date, "Local date YYYY-MM-DD")->capture_default_str();
  sim_cmd->add_option("--lat", sim.lat)->capture_default_str()->check(CLI::Range(-90.0, 90.0));
  sim_cmd->add_option("--lon", sim.lon)->capture_default_str()->check(CLI::Range(-180.0, 180.0));
  sim_cmd->add_option("--tz-offset-min", sim.tz_offset)->capture_default_str();
  sim_cmd->add_option("--events", sc.n_events, "Number of rain events")->capture_default_str();
  sim_cmd->add_option("--event-min", sc.event_minutes, "Event duration")->capture_default_str();
  sim_cmd->add_option("--ramp-min", sc.ramp_minutes, "Linear descent/recovery around each event")->capture_default_str();
  sim_cmd->add_option("--clear-level", sc.clear_level)->capture_default_str();
  sim_cmd->add_option("--rain-level", sc.rain_level)->capture_default_str();
  sim_cmd->add_option("--noise", sc.noise_sigma, "Gaussian sigma added to the index")->capture_default_str();
  sim_cmd->add_option("--seed", sc.seed)->capture_default_str();
  sim_cmd->add_option("--cadence-min", sc.cadence_minutes, "Imager interval")->capture_default_str();
  sim_cmd->add_option("--tile", sc.tile_size, "Synthetic image side, pixels")->capture_default_str();
  sim_cmd->add_option("--alpha", sc.alpha, "Irradiance-to-luminance scale")->capture_default_str();
  sim_cmd->add_option("--mode", sim.mode, "images or luminance")
      ->capture_default_str()
      ->check(CLI::IsMember({"images", "luminance"}));
  add_env_names(sim_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "nimbus: error[usage]: " << e.what() << "\n";
    return static_cast<int>(ExitCode::usage);
  }

  try {
    if (*ghi_cmd) return run_ghi(ghi, out);
    if (*index_cmd) return run_index(index, out);
    if (*cal_cmd) return run_calibrate(calibrate, out);
    if (*detect_cmd) return run_detect(detect, out, err);
    if (*sim_cmd) return run_simulate(sim, out);
  } catch (const Error& e) {
    err << "nimbus: error[" << e.module() << "]: " << e.what() << "\n";
    return static_cast<int>(e.exit_code());
  } catch (const std::exception& e) {
    err << "nimbus: error[io]: " << e.what() << "\n";
    return static_cast<int>(ExitCode::data);
  }
  return static_cast<int>(ExitCode::usage);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"nimbus"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace nimbus::cli
