#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "nimbus/solar.hpp"
#include "nimbus/timeutil.hpp"

namespace nimbus {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Timestamped 8-bit RGB frame, row-major.
class SkyImage {
 public:
  SkyImage(Timestamp timestamp, int width, int height, std::vector<Rgb> pixels);
  /// Uniform frame filled with `fill`.
  SkyImage(Timestamp timestamp, int width, int height, Rgb fill = {});

  Timestamp timestamp() const noexcept { return timestamp_; }
  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::span<const Rgb> pixels() const noexcept { return pixels_; }

  const Rgb& at(int x, int y) const { return pixels_[index(x, y)]; }
  Rgb& at(int x, int y) { return pixels_[index(x, y)]; }

  friend bool operator==(const SkyImage&, const SkyImage&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  Timestamp timestamp_;
  int width_;
  int height_;
  std::vector<Rgb> pixels_;
};

/// Per-channel weights applied to gamma-encoded values. Rec. 709 by default.
struct LuminanceWeights {
  double red = 0.2126;
  double green = 0.7152;
  double blue = 0.0722;
};

/// How much of the frame centre to keep. Either a fixed square side in
/// pixels or a fraction of the shorter image dimension.
struct CropSpec {
  static constexpr int default_side = 2000;

  std::optional<int> side;
  std::optional<double> fraction;

  static CropSpec fixed(int side_px) { return {side_px, std::nullopt}; }
  static CropSpec relative(double frac) { return {std::nullopt, frac}; }

  /// Side length in pixels for a `width` x `height` frame.
  int resolve(int width, int height) const;
};

/// Centered `side` x `side` sub-image. When the margin is odd the extra
/// row/column is left on the bottom/right. Throws DimensionError.
SkyImage crop_center(const SkyImage& image, int side);

/// Mean weighted luminance normalised by 255, in [0, 1].
double mean_luminance(const SkyImage& image, const LuminanceWeights& weights = {});

/// Linear map from clear-sky irradiance to expected image luminance:
/// L_c = alpha * G_c + beta.
class LuminanceCalibration {
 public:
  explicit LuminanceCalibration(double alpha, double beta = 0.0);

  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }

 private:
  double alpha_;
  double beta_;
};

struct IrradianceLuminancePair {
  double ghi;        // W/m^2
  double luminance;  // measured L_m
};

enum class FitMode { through_origin, affine };

/// Least-squares fit of L_m against G_c over clear-sky observations.
/// Throws CalibrationError for fewer than two pairs, non-positive G_c,
/// all-equal G_c, or a non-positive slope.
LuminanceCalibration fit_calibration(std::span<const IrradianceLuminancePair> pairs,
                                     FitMode mode = FitMode::through_origin);

/// alpha = max(L_m) / max(G_c), used when no clear-sky intervals are known.
LuminanceCalibration fallback_calibration(std::span<const IrradianceLuminancePair> pairs);

/// Expected luminance of a cloudless sky, clamped below at zero.
double clear_sky_luminance(Irradiance ghi, const LuminanceCalibration& calibration);

struct LuminanceSample {
  Timestamp timestamp;
  double l_m;
  double l_c;
};

}  // namespace nimbus
