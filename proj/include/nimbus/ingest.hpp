#pragma once

#include <chrono>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nimbus/luminance.hpp"
#include "nimbus/series.hpp"
#include "nimbus/solar.hpp"

namespace nimbus {

inline constexpr const char* default_filename_pattern = "%Y-%m-%d-%H-%M-%S";
inline constexpr std::chrono::seconds default_align_tolerance{90};

struct ImageRef {
  Timestamp timestamp;
  std::filesystem::path path;
};

struct ScanResult {
  std::vector<ImageRef> images;
  /// Files that were not recognised as timestamped images, by name.
  std::vector<std::string> skipped;
};

/// Lists PNG/JPEG files whose names start with a timestamp in `pattern`
/// (strptime syntax), read as local time at `utc_offset`. Result is sorted
/// by timestamp. Throws InputError if nothing parses or two files share a
/// timestamp.
ScanResult scan_images(const std::filesystem::path& dir,
                       const std::string& pattern = default_filename_pattern,
                       std::chrono::minutes utc_offset = std::chrono::minutes{0});

/// Parses the filename prefix; empty if it does not match `pattern`.
std::optional<Timestamp> parse_filename_timestamp(const std::string& filename,
                                                  const std::string& pattern,
                                                  std::chrono::minutes utc_offset);

/// Reads `timestamp,rain_mm_per_hr` CSV. Rows are stably sorted, then must be
/// strictly increasing. Throws InputError with the offending line number.
std::vector<GaugeRecord> read_gauge_csv(std::istream& in, const std::string& source = "<stream>");
std::vector<GaugeRecord> parse_gauge_csv(const std::filesystem::path& file);

/// Inverse of read_gauge_csv. Rates are written in shortest round-trip form.
std::string format_gauge_csv(std::span<const GaugeRecord> records, std::chrono::minutes utc_offset);

/// Measured luminance read from a `timestamp,l_m` CSV (alternative to images).
struct LuminanceObservation {
  Timestamp timestamp;
  double l_m;
};

std::vector<LuminanceObservation> parse_luminance_csv(const std::filesystem::path& file);
std::string format_luminance_csv(std::span<const LuminanceObservation> rows,
                                 std::chrono::minutes utc_offset);

/// Nearest gauge record for one image.
struct Alignment {
  std::optional<std::size_t> gauge_index;
  std::chrono::seconds delta{0};  // image time - gauge time

  bool matched() const noexcept { return gauge_index.has_value(); }
};

/// Pairs each image time with the closest gauge record within `tolerance`.
/// Equidistant candidates resolve to the earlier record.
std::vector<Alignment> align(std::span<const Timestamp> images, std::span<const GaugeRecord> gauge,
                             std::chrono::seconds tolerance = default_align_tolerance);

/// Everything needed to rerun `index`, `calibrate` and `detect` on a dataset.
/// Paths are stored relative to the manifest directory.
struct Manifest {
  GeoLocation location = GeoLocation::singapore();
  std::chrono::minutes tz_offset{0};
  std::string pattern = default_filename_pattern;
  std::vector<std::filesystem::path> images;
  std::optional<std::filesystem::path> luminance;
  std::optional<std::filesystem::path> gauge;
  std::optional<LuminanceCalibration> calibration;
  CropSpec crop;
  std::optional<Timestamp> start;
  std::optional<Timestamp> end;
};

std::string manifest_to_json(const Manifest& manifest);
Manifest manifest_from_json(const std::string& text);
Manifest load_manifest(const std::filesystem::path& file);

/// Calibration coefficients file: {"alpha": ..., "beta": ...}.
std::string calibration_to_json(const LuminanceCalibration& calibration);
LuminanceCalibration load_calibration(const std::filesystem::path& file);

/// Time-aligned inputs of one run. Immutable after construction.
class Dataset {
 public:
  /// Throws InputError unless both series are strictly increasing and lie
  /// inside [start, end].
  Dataset(GeoLocation location, std::chrono::minutes tz_offset, std::vector<ImageRef> images,
          std::vector<GaugeRecord> gauge, std::optional<LuminanceCalibration> calibration,
          Timestamp start, Timestamp end);

  const GeoLocation& location() const noexcept { return location_; }
  std::chrono::minutes tz_offset() const noexcept { return tz_offset_; }
  std::span<const ImageRef> images() const noexcept { return images_; }
  std::span<const GaugeRecord> gauge() const noexcept { return gauge_; }
  const std::optional<LuminanceCalibration>& calibration() const noexcept { return calibration_; }
  Timestamp start() const noexcept { return start_; }
  Timestamp end() const noexcept { return end_; }

 private:
  GeoLocation location_;
  std::chrono::minutes tz_offset_;
  std::vector<ImageRef> images_;
  std::vector<GaugeRecord> gauge_;
  std::optional<LuminanceCalibration> calibration_;
  Timestamp start_;
  Timestamp end_;
};

}  // namespace nimbus
