#include "nimbus/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"
#include "nimbus/atomic_file.hpp"
#include "nimbus/error.hpp"

namespace nimbus {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

bool is_image_file(const fs::path& p) {
  const auto ext = lower(p.extension().string());
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    fields.push_back(trim(line.substr(pos, comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return fields;
}

std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  const auto* first = s.data();
  if (!s.empty() && s.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || first == s.data() + s.size()) return std::nullopt;
  return v;
}

// Reads a two-column CSV with the given header; calls `row` for each data line.
template <typename RowFn>
void read_two_column_csv(std::istream& in, const std::string& source, std::string_view col0,
                         std::string_view col1, RowFn&& row) {
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto content = trim(line);
    if (content.empty()) continue;
    const auto fields = split_csv(content);
    if (!header_seen) {
      if (fields.size() != 2 || fields[0] != col0 || fields[1] != col1) {
        throw InputError("ingest", fmt::format("{}:{}: expected header '{},{}'", source, line_no, col0, col1));
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 2) {
      throw InputError("ingest", fmt::format("{}:{}: expected 2 fields, got {}", source, line_no, fields.size()));
    }
    Timestamp t;
    try {
      t = parse_iso8601(fields[0]);
    } catch (const Error& e) {
      throw InputError("ingest", fmt::format("{}:{}: {}", source, line_no, e.what()));
    }
    const auto value = parse_double(fields[1]);
    if (!value || !std::isfinite(*value)) {
      throw InputError("ingest", fmt::format("{}:{}: invalid number '{}'", source, line_no, fields[1]));
    }
    row(t, *value, line_no);
  }
  if (!header_seen) throw InputError("ingest", fmt::format("{}: empty file", source));
}

std::ifstream open_input(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw InputError("ingest", fmt::format("cannot open {}", file.string()));
  return in;
}

template <typename T>
void require_strictly_increasing(const std::vector<T>& rows, const std::string& source) {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (!(rows[i - 1].timestamp < rows[i].timestamp)) {
      throw InputError("ingest", fmt::format("{}: duplicate timestamp {}", source,
                                             format_iso8601(rows[i].timestamp, std::chrono::minutes{0})));
    }
  }
}

}  // namespace

std::optional<Timestamp> parse_filename_timestamp(const std::string& filename, const std::string& pattern,
                                                  std::chrono::minutes utc_offset) {
  using namespace std::chrono;
  std::tm tm{};
  tm.tm_mday = 1;
  std::istringstream in(filename);
  in >> std::get_time(&tm, pattern.c_str());
  if (in.fail()) return std::nullopt;

  const year_month_day date{year{tm.tm_year + 1900}, month{static_cast<unsigned>(tm.tm_mon + 1)},
                            day{static_cast<unsigned>(tm.tm_mday)}};
  if (!date.ok() || tm.tm_hour > 23 || tm.tm_min > 59 || tm.tm_sec > 59) return std::nullopt;
  const auto local = sys_days{date} + hours{tm.tm_hour} + minutes{tm.tm_min} + seconds{tm.tm_sec};
  return Timestamp{local - utc_offset};
}

ScanResult scan_images(const fs::path& dir, const std::string& pattern, std::chrono::minutes utc_offset) {
  std::error_code ec;
  fs::directory_iterator it(dir, ec);
  if (ec) throw InputError("ingest", fmt::format("cannot read directory {}: {}", dir.string(), ec.message()));

  ScanResult result;
  for (const auto& entry : it) {
    if (!entry.is_regular_file()) continue;
    const auto name = entry.path().filename().string();
    const auto t = is_image_file(entry.path()) ? parse_filename_timestamp(name, pattern, utc_offset)
                                               : std::nullopt;
    if (t) {
      result.images.push_back({*t, entry.path()});
    } else {
      result.skipped.push_back(name);
    }
  }
  std::sort(result.skipped.begin(), result.skipped.end());
  std::sort(result.images.begin(), result.images.end(), [](const ImageRef& a, const ImageRef& b) {
    return a.timestamp != b.timestamp ? a.timestamp < b.timestamp : a.path < b.path;
  });

  if (result.images.empty()) {
    throw InputError("ingest", fmt::format("no timestamped images in {}", dir.string()));
  }
  for (std::size_t i = 1; i < result.images.size(); ++i) {
    if (result.images[i - 1].timestamp == result.images[i].timestamp) {
      throw InputError("ingest", fmt::format("images {} and {} share a timestamp",
                                             result.images[i - 1].path.filename().string(),
                                             result.images[i].path.filename().string()));
    }
  }
  return result;
}

std::vector<GaugeRecord> read_gauge_csv(std::istream& in, const std::string& source) {
  std::vector<GaugeRecord> records;
  read_two_column_csv(in, source, "timestamp", "rain_mm_per_hr",
                      [&](Timestamp t, double rate, std::size_t line_no) {
                        if (rate < 0.0) {
                          throw InputError("ingest", fmt::format("{}:{}: negative rain rate {}", source,
                                                                 line_no, rate));
                        }
                        records.push_back({t, rate});
                      });
  std::stable_sort(records.begin(), records.end(),
                   [](const GaugeRecord& a, const GaugeRecord& b) { return a.timestamp < b.timestamp; });
  require_strictly_increasing(records, source);
  return records;
}

std::vector<GaugeRecord> parse_gauge_csv(const fs::path& file) {
  auto in = open_input(file);
  return read_gauge_csv(in, file.string());
}

std::string format_gauge_csv(std::span<const GaugeRecord> records, std::chrono::minutes utc_offset) {
  std::string out = "timestamp,rain_mm_per_hr\n";
  for (const auto& r : records) {
    out += fmt::format("{},{}\n", format_iso8601(r.timestamp, utc_offset), r.rate_mm_per_hr);
  }
  return out;
}

std::vector<LuminanceObservation> parse_luminance_csv(const fs::path& file) {
  auto in = open_input(file);
  const auto source = file.string();
  std::vector<LuminanceObservation> rows;
  read_two_column_csv(in, source, "timestamp", "l_m", [&](Timestamp t, double l_m, std::size_t line_no) {
    if (l_m < 0.0 || l_m > 1.0) {
      throw InputError("ingest", fmt::format("{}:{}: luminance {} outside [0, 1]", source, line_no, l_m));
    }
    rows.push_back({t, l_m});
  });
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
  require_strictly_increasing(rows, source);
  return rows;
}

std::string format_luminance_csv(std::span<const LuminanceObservation> rows, std::chrono::minutes utc_offset) {
  std::string out = "timestamp,l_m\n";
  for (const auto& r : rows) out += fmt::format("{},{}\n", format_iso8601(r.timestamp, utc_offset), r.l_m);
  return out;
}

std::vector<Alignment> align(std::span<const Timestamp> images, std::span<const GaugeRecord> gauge,
                             std::chrono::seconds tolerance) {
  std::vector<Alignment> out;
  out.reserve(images.size());
  for (const auto t : images) {
    const auto it = std::lower_bound(gauge.begin(), gauge.end(), t,
                                     [](const GaugeRecord& g, Timestamp v) { return g.timestamp < v; });
    std::optional<std::size_t> best;
    std::chrono::seconds best_gap{0};
    // Earlier candidate first so that an equal gap keeps it.
    if (it != gauge.begin()) {
      best = static_cast<std::size_t>(std::prev(it) - gauge.begin());
      best_gap = t - std::prev(it)->timestamp;
    }
    if (it != gauge.end() && (!best || it->timestamp - t < best_gap)) {
      best = static_cast<std::size_t>(it - gauge.begin());
      best_gap = it->timestamp - t;
    }
    if (best && best_gap <= tolerance) {
      out.push_back({best, t - gauge[*best].timestamp});
    } else {
      out.push_back({});
    }
  }
  return out;
}

std::string manifest_to_json(const Manifest& m) {
  json j;
  j["location"] = {{"latitude", m.location.latitude()}, {"longitude", m.location.longitude()}};
  j["tz_offset_min"] = m.tz_offset.count();
  j["pattern"] = m.pattern;
  j["images"] = json::array();
  for (const auto& p : m.images) j["images"].push_back(p.generic_string());
  if (m.luminance) j["luminance"] = m.luminance->generic_string();
  if (m.gauge) j["gauge"] = m.gauge->generic_string();
  if (m.calibration) j["calibration"] = {{"alpha", m.calibration->alpha()}, {"beta", m.calibration->beta()}};
  if (m.crop.side) j["crop"] = {{"side", *m.crop.side}};
  if (m.crop.fraction) j["crop"] = {{"fraction", *m.crop.fraction}};
  if (m.start) j["start"] = format_iso8601(*m.start, m.tz_offset);
  if (m.end) j["end"] = format_iso8601(*m.end, m.tz_offset);
  return j.dump(2) + "\n";
}

Manifest manifest_from_json(const std::string& text) {
  Manifest m;
  try {
    const auto j = json::parse(text);
    if (j.contains("location")) {
      m.location = GeoLocation{j["location"].at("latitude").get<double>(),
                               j["location"].at("longitude").get<double>()};
    }
    m.tz_offset = std::chrono::minutes{j.value("tz_offset_min", 0)};
    m.pattern = j.value("pattern", std::string{default_filename_pattern});
    for (const auto& p : j.value("images", json::array())) m.images.emplace_back(p.get<std::string>());
    if (j.contains("luminance")) m.luminance = j["luminance"].get<std::string>();
    if (j.contains("gauge")) m.gauge = j["gauge"].get<std::string>();
    if (j.contains("calibration")) {
      m.calibration = LuminanceCalibration{j["calibration"].at("alpha").get<double>(),
                                           j["calibration"].value("beta", 0.0)};
    }
    if (j.contains("crop")) {
      const auto& c = j["crop"];
      if (c.contains("side")) m.crop.side = c["side"].get<int>();
      if (c.contains("fraction")) m.crop.fraction = c["fraction"].get<double>();
    }
    if (j.contains("start")) m.start = parse_iso8601(j["start"].get<std::string>());
    if (j.contains("end")) m.end = parse_iso8601(j["end"].get<std::string>());
  } catch (const json::exception& e) {
    throw InputError("ingest", fmt::format("invalid manifest: {}", e.what()));
  }
  return m;
}

Manifest load_manifest(const fs::path& file) {
  try {
    return manifest_from_json(read_file(file));
  } catch (const InputError& e) {
    throw InputError("ingest", fmt::format("{}: {}", file.string(), e.what()));
  }
}

std::string calibration_to_json(const LuminanceCalibration& calibration) {
  const json j = {{"alpha", calibration.alpha()}, {"beta", calibration.beta()}};
  return j.dump(2) + "\n";
}

LuminanceCalibration load_calibration(const fs::path& file) {
  try {
    const auto j = json::parse(read_file(file));
    return LuminanceCalibration{j.at("alpha").get<double>(), j.value("beta", 0.0)};
  } catch (const json::exception& e) {
    throw InputError("ingest", fmt::format("{}: invalid calibration file: {}", file.string(), e.what()));
  }
}

Dataset::Dataset(GeoLocation location, std::chrono::minutes tz_offset, std::vector<ImageRef> images,
                 std::vector<GaugeRecord> gauge, std::optional<LuminanceCalibration> calibration,
                 Timestamp start, Timestamp end)
    : location_(location),
      tz_offset_(tz_offset),
      images_(std::move(images)),
      gauge_(std::move(gauge)),
      calibration_(calibration),
      start_(start),
      end_(end) {
  if (end_ < start_) throw InputError("ingest", "dataset end precedes start");
  auto check = [&](const auto& series, const char* what) {
    for (std::size_t i = 0; i < series.size(); ++i) {
      if (i > 0 && !(series[i - 1].timestamp < series[i].timestamp)) {
        throw InputError("ingest", fmt::format("{} timestamps not strictly increasing at {}", what, i));
      }
      if (series[i].timestamp < start_ || series[i].timestamp > end_) {
        throw InputError("ingest", fmt::format("{} timestamp {} outside dataset range", what,
                                               format_iso8601(series[i].timestamp, tz_offset_)));
      }
    }
  };
  check(images_, "image");
  check(gauge_, "gauge");
}

}  // namespace nimbus
