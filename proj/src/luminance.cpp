#include "nimbus/luminance.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "nimbus/error.hpp"

namespace nimbus {

SkyImage::SkyImage(Timestamp timestamp, int width, int height, std::vector<Rgb> pixels)
    : timestamp_(timestamp), width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width < 1 || height < 1) {
    throw DimensionError(fmt::format("image size {}x{} must be at least 1x1", width, height));
  }
  if (pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw DimensionError(fmt::format("pixel count {} does not match {}x{}", pixels_.size(), width, height));
  }
}

SkyImage::SkyImage(Timestamp timestamp, int width, int height, Rgb fill)
    : SkyImage(timestamp, width, height,
               std::vector<Rgb>(static_cast<std::size_t>(std::max(width, 0)) *
                                    static_cast<std::size_t>(std::max(height, 0)),
                                fill)) {}

int CropSpec::resolve(int width, int height) const {
  if (side && fraction) {
    throw ConfigError("luminance", "crop side and crop fraction are mutually exclusive");
  }
  if (fraction) {
    if (!(*fraction > 0.0 && *fraction <= 1.0)) {
      throw ConfigError("luminance", fmt::format("crop fraction {} outside (0, 1]", *fraction));
    }
    return std::max(1, static_cast<int>(std::floor(*fraction * std::min(width, height))));
  }
  return side.value_or(default_side);
}

SkyImage crop_center(const SkyImage& image, int side) {
  if (side < 1) throw DimensionError(fmt::format("crop side {} must be >= 1", side));
  const int shorter = std::min(image.width(), image.height());
  if (side > shorter) {
    throw DimensionError(fmt::format("crop side {} exceeds image dimension {} ({}x{})", side,
                                     shorter, image.width(), image.height()));
  }
  // Floor division leaves the odd pixel of the margin on the bottom/right.
  const int x0 = (image.width() - side) / 2;
  const int y0 = (image.height() - side) / 2;

  std::vector<Rgb> out;
  out.reserve(static_cast<std::size_t>(side) * static_cast<std::size_t>(side));
  const auto pixels = image.pixels();
  for (int y = y0; y < y0 + side; ++y) {
    const auto row = pixels.subspan(static_cast<std::size_t>(y) * image.width() + x0, side);
    out.insert(out.end(), row.begin(), row.end());
  }
  return SkyImage{image.timestamp(), side, side, std::move(out)};
}

double mean_luminance(const SkyImage& image, const LuminanceWeights& weights) {
  const auto pixels = image.pixels();
  if (pixels.empty()) throw DomainError("luminance", "mean luminance of an empty image");

  // Integer channel sums keep the result independent of pixel order.
  std::uint64_t r = 0, g = 0, b = 0;
  for (const auto& p : pixels) {
    r += p.r;
    g += p.g;
    b += p.b;
  }
  const double weighted = weights.red * static_cast<double>(r) +
                          weights.green * static_cast<double>(g) +
                          weights.blue * static_cast<double>(b);
  return weighted / (255.0 * static_cast<double>(pixels.size()));
}

LuminanceCalibration::LuminanceCalibration(double alpha, double beta) : alpha_(alpha), beta_(beta) {
  if (!std::isfinite(alpha) || alpha <= 0.0) {
    throw CalibrationError("luminance", fmt::format("calibration scale {} must be > 0", alpha));
  }
  if (!std::isfinite(beta)) {
    throw CalibrationError("luminance", "calibration offset must be finite");
  }
}

LuminanceCalibration fit_calibration(std::span<const IrradianceLuminancePair> pairs, FitMode mode) {
  if (pairs.size() < 2) {
    throw CalibrationError("luminance",
                           fmt::format("need at least 2 clear-sky pairs, got {}", pairs.size()));
  }
  for (const auto& p : pairs) {
    if (!(p.ghi > 0.0) || !std::isfinite(p.ghi) || !std::isfinite(p.luminance)) {
      throw CalibrationError("luminance", fmt::format("clear-sky pair has invalid irradiance {}", p.ghi));
    }
  }
  const auto [lo, hi] = std::minmax_element(pairs.begin(), pairs.end(),
                                            [](const auto& a, const auto& b) { return a.ghi < b.ghi; });
  if (lo->ghi == hi->ghi) {
    throw CalibrationError("luminance", "all clear-sky pairs share the same irradiance");
  }

  const double n = static_cast<double>(pairs.size());
  if (mode == FitMode::through_origin) {
    double sxy = 0.0, sxx = 0.0;
    for (const auto& p : pairs) {
      sxy += p.ghi * p.luminance;
      sxx += p.ghi * p.ghi;
    }
    return LuminanceCalibration{sxy / sxx};
  }

  double mx = 0.0, my = 0.0;
  for (const auto& p : pairs) {
    mx += p.ghi;
    my += p.luminance;
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (const auto& p : pairs) {
    sxy += (p.ghi - mx) * (p.luminance - my);
    sxx += (p.ghi - mx) * (p.ghi - mx);
  }
  const double slope = sxy / sxx;
  return LuminanceCalibration{slope, my - slope * mx};
}

LuminanceCalibration fallback_calibration(std::span<const IrradianceLuminancePair> pairs) {
  double max_ghi = 0.0, max_lm = 0.0;
  for (const auto& p : pairs) {
    max_ghi = std::max(max_ghi, p.ghi);
    max_lm = std::max(max_lm, p.luminance);
  }
  if (max_ghi <= 0.0 || max_lm <= 0.0) {
    throw CalibrationError("luminance", "no daylight observations to derive a fallback calibration");
  }
  return LuminanceCalibration{max_lm / max_ghi};
}

double clear_sky_luminance(Irradiance ghi, const LuminanceCalibration& calibration) {
  return std::max(0.0, calibration.alpha() * ghi.value() + calibration.beta());
}

}  // namespace nimbus
