#include "nimbus/solar.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "nimbus/constants.hpp"
#include "nimbus/error.hpp"

namespace nimbus {
namespace {

constexpr double deg_to_rad = std::numbers::pi / 180.0;

// Spencer (1971) Fourier series, angles in radians, EoT in minutes.
double declination(double g) {
  return 0.006918 - 0.399912 * std::cos(g) + 0.070257 * std::sin(g) -
         0.006758 * std::cos(2 * g) + 0.000907 * std::sin(2 * g) -
         0.002697 * std::cos(3 * g) + 0.00148 * std::sin(3 * g);
}

double equation_of_time_minutes(double g) {
  return 229.18 * (0.000075 + 0.001868 * std::cos(g) - 0.032077 * std::sin(g) -
                   0.014615 * std::cos(2 * g) - 0.040849 * std::sin(2 * g));
}

}  // namespace

GeoLocation::GeoLocation(double latitude_deg, double longitude_deg)
    : latitude_(latitude_deg), longitude_(longitude_deg) {
  if (!(latitude_deg >= -90.0 && latitude_deg <= 90.0)) {
    throw DomainError("solar", fmt::format("latitude {} outside [-90, 90]", latitude_deg));
  }
  if (!(longitude_deg >= -180.0 && longitude_deg <= 180.0)) {
    throw DomainError("solar", fmt::format("longitude {} outside [-180, 180]", longitude_deg));
  }
}

Irradiance::Irradiance(double watts_per_m2) : value_(watts_per_m2) {
  if (!std::isfinite(watts_per_m2) || watts_per_m2 < 0.0) {
    throw DomainError("solar", fmt::format("irradiance {} must be finite and >= 0", watts_per_m2));
  }
}

double day_angle(int day_number) {
  if (day_number < 1 || day_number > 366) {
    throw DomainError("solar", fmt::format("day number {} outside [1, 366]", day_number));
  }
  return 2.0 * std::numbers::pi * (day_number - 1) / model::days_per_year;
}

double eccentricity_correction(double g) {
  using namespace model;
  return eccentricity_c0 + eccentricity_c1 * std::cos(g) + eccentricity_s1 * std::sin(g) +
         eccentricity_c2 * std::cos(2.0 * g) + eccentricity_s2 * std::sin(2.0 * g);
}

double solar_zenith_angle(const GeoLocation& location, Timestamp utc) {
  using namespace std::chrono;
  const auto day_point = floor<days>(utc);
  const int doy = day_of_year(year_month_day{day_point});
  const double utc_hours = duration<double, std::ratio<3600>>(utc - day_point).count();

  // Fractional year, centred on noon of the UTC day.
  const double g = 2.0 * std::numbers::pi / model::days_per_year * (doy - 1 + (utc_hours - 12.0) / 24.0);
  const double decl = declination(g);
  const double true_solar_minutes =
      utc_hours * 60.0 + 4.0 * location.longitude() + equation_of_time_minutes(g);
  const double hour_angle = (true_solar_minutes / 4.0 - 180.0) * deg_to_rad;

  const double lat = location.latitude() * deg_to_rad;
  const double cos_zenith = std::sin(lat) * std::sin(decl) +
                            std::cos(lat) * std::cos(decl) * std::cos(hour_angle);
  return std::acos(std::clamp(cos_zenith, -1.0, 1.0)) / deg_to_rad;
}

Irradiance clear_sky_ghi(double zenith_deg, double eccentricity) {
  if (!(zenith_deg >= 0.0 && zenith_deg <= 180.0)) {
    throw DomainError("solar", fmt::format("zenith angle {} outside [0, 180]", zenith_deg));
  }
  if (!(eccentricity >= 0.9 && eccentricity <= 1.1)) {
    throw DomainError("solar", fmt::format("eccentricity factor {} outside [0.9, 1.1]", eccentricity));
  }
  // A negative cosine has no real fractional power; no clear-sky irradiance at night.
  if (zenith_deg >= 90.0) return Irradiance{0.0};

  using namespace model;
  const double cos_zenith = std::cos(zenith_deg * deg_to_rad);
  return Irradiance{ghi_scale * eccentricity * solar_constant *
                    std::pow(cos_zenith, ghi_cosine_exponent) *
                    std::exp(-ghi_elevation_attenuation * (90.0 - zenith_deg))};
}

SolarContext solar_context(const GeoLocation& location, Timestamp utc) {
  using namespace std::chrono;
  SolarContext ctx{};
  ctx.day_number = day_of_year(year_month_day{floor<days>(utc)});
  ctx.day_angle = day_angle(ctx.day_number);
  ctx.eccentricity = eccentricity_correction(ctx.day_angle);
  ctx.zenith_deg = solar_zenith_angle(location, utc);
  return ctx;
}

}  // namespace nimbus
