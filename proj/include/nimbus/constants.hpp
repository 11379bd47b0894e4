#pragma once

// Coefficients of the Singapore clear-sky GHI model and the eccentricity
// correction series. Every other unit refers to these by name.

namespace nimbus::model {

/// Solar irradiance constant I_sc, W/m^2.
inline constexpr double solar_constant = 1366.1;

inline constexpr double ghi_scale = 0.8277;
inline constexpr double ghi_cosine_exponent = 1.3644;
/// Per-degree attenuation in the exp(-k (90 - zenith)) term.
inline constexpr double ghi_elevation_attenuation = 0.0013;

/// Day angle uses a 365-day year regardless of leap years.
inline constexpr double days_per_year = 365.0;

// E_0 = c0 + c1 cos(g) + s1 sin(g) + c2 cos(2g) + s2 sin(2g)
inline constexpr double eccentricity_c0 = 1.00011;
inline constexpr double eccentricity_c1 = 0.034221;
inline constexpr double eccentricity_s1 = 0.001280;
inline constexpr double eccentricity_c2 = 0.000719;
inline constexpr double eccentricity_s2 = 0.000077;

}  // namespace nimbus::model
