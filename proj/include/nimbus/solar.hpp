#pragma once

#include "nimbus/timeutil.hpp"

namespace nimbus {

/// Observer position in degrees. Construction validates the ranges.
class GeoLocation {
 public:
  GeoLocation(double latitude_deg, double longitude_deg);

  double latitude() const noexcept { return latitude_; }
  double longitude() const noexcept { return longitude_; }

  /// Rooftop imager site used throughout the examples (1.34 N, 103.68 E).
  static GeoLocation singapore() { return {1.34, 103.68}; }

 private:
  double latitude_;
  double longitude_;
};

/// Non-negative irradiance in W/m^2.
class Irradiance {
 public:
  explicit Irradiance(double watts_per_m2);
  double value() const noexcept { return value_; }

 private:
  double value_;
};

/// Sun-related quantities derived for one place and instant.
struct SolarContext {
  int day_number;       // 1..366
  double day_angle;     // radians
  double eccentricity;  // E_0
  double zenith_deg;    // geometric zenith angle
};

/// Day angle 2 pi (d_n - 1) / 365 in radians. d_n must be in [1, 366].
double day_angle(int day_number);

/// Earth-orbit eccentricity correction factor E_0 for a day angle in radians.
double eccentricity_correction(double day_angle_rad);

/// Geometric solar zenith angle in degrees (no refraction).
///
/// Declination and equation of time come from the Spencer Fourier series
/// evaluated at the fractional year; the hour angle follows from UTC and
/// longitude. Agrees with NREL SPA to well under 0.5 degrees.
double solar_zenith_angle(const GeoLocation& location, Timestamp utc);

/// Clear-sky global horizontal irradiance for zenith angle (degrees) and E_0.
/// Returns zero once the sun is at or below the horizon.
Irradiance clear_sky_ghi(double zenith_deg, double eccentricity);

SolarContext solar_context(const GeoLocation& location, Timestamp utc);

}  // namespace nimbus
