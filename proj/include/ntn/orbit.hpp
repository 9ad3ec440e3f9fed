#pragma once

// Circular-orbit pass geometry for a single LEO satellite over a fixed
// ground station (spherical, non-rotating Earth).
//
// A pass is parameterised by altitude and peak elevation; t = 0 is the
// instant of peak elevation (minimum slant range). The orbit plane is
// placed so that the satellite passes the ground station's zenith
// direction at the central angle that yields the requested peak elevation.

#include <cmath>
#include <cstddef>
#include <vector>

#include "ntn/constants.hpp"

namespace ntn {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator*(double s, const Vec3& a) { return {s * a.x, s * a.y, s * a.z}; }
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b)
{
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

struct OrbitGeometry {
    double altitude_m = 600e3;
    double max_elevation_rad = kPi / 2.0;
    double earth_radius_m = kEarthRadius;
    double mu_m3s2 = kEarthMu;

    /// Throws DomainError unless altitude > 0, 0 < max elevation <= pi/2, Re > 0.
    void validate() const;

    double orbit_radius_m() const { return earth_radius_m + altitude_m; }
    double angular_rate_rad_s() const;
    double period_s() const;
    double orbital_speed_ms() const;
};

struct GroundStation {
    Vec3 position;

    /// Station on the equator of the model frame, at radius earth_radius_m.
    static GroundStation on_surface(const OrbitGeometry& geom);
};

struct SatelliteState {
    Vec3 position;
    Vec3 velocity;
};

struct RangeElevation {
    double range_m = 0.0;
    double elevation_rad = 0.0;
};

/// Geocentric position and velocity at time t (t = 0 at peak elevation).
/// Valid for |t| <= half an orbital period.
SatelliteState satellite_state(const OrbitGeometry& geom, const GroundStation& gs, double t_s);

RangeElevation slant_range_and_elevation(const OrbitGeometry& geom, const GroundStation& gs, double t_s);

/// d(range)/dt from the line-of-sight projection of the satellite velocity.
double radial_velocity(const OrbitGeometry& geom, const GroundStation& gs, double t_s);

/// -(radial_velocity / c) * carrier: positive while approaching.
double doppler_shift(const OrbitGeometry& geom, const GroundStation& gs, double t_s, double carrier_hz);

/// Sampled ground truth of one pass. All arrays share the same length.
struct PassProfile {
    std::vector<double> t_s;
    std::vector<double> slant_range_m;
    std::vector<double> elevation_rad;
    std::vector<double> delay_s;             // one-way, slant_range / c
    std::vector<double> radial_velocity_ms;  // d(range)/dt

    std::size_t size() const { return t_s.size(); }
    double start_s() const { return t_s.front(); }
    double end_s() const { return t_s.back(); }
    bool covers(double t0, double t1) const { return !t_s.empty() && t0 >= start_s() && t1 <= end_s(); }

    /// Throws DomainError on length mismatch, < 2 samples or non-increasing time.
    void validate() const;

    // Linear interpolation in time; t must lie inside the profile span.
    double delay_at(double t) const;
    double radial_velocity_at(double t) const;
    double doppler_at(double t, double carrier_hz) const
    {
        return -radial_velocity_at(t) / kSpeedOfLight * carrier_hz;
    }

    /// Index i of the segment [t_s[i], t_s[i+1]] holding t.
    std::size_t segment_of(double t) const;
};

/// Samples t_start + i*dt for i in [0, floor((t_end - t_start)/dt)].
/// Radial velocity by central differences of the sampled range (one-sided at the ends).
PassProfile generate_pass_profile(const OrbitGeometry& geom, const GroundStation& gs,
                                  double t_start_s, double t_end_s, double dt_s);

struct TimeWindow {
    double start_s = 0.0;
    double end_s = 0.0;
    double duration_s() const { return end_s - start_s; }
};

/// Times at which the elevation crosses min_elevation_rad, found by bisection.
TimeWindow visibility_window(const OrbitGeometry& geom, const GroundStation& gs, double min_elevation_rad);

/// Largest |d(one-way delay)/dt| over the profile samples.
double max_abs_delay_rate(const PassProfile& profile);

}  // namespace ntn
