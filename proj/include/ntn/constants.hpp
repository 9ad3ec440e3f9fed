#pragma once

namespace ntn {

inline constexpr double kSpeedOfLight = 299'792'458.0;          // m/s
inline constexpr double kEarthRadius = 6'371'000.0;             // m
inline constexpr double kEarthMu = 3.986004418e14;              // m^3/s^2
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

inline constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

}  // namespace ntn
