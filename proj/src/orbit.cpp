#include "ntn/orbit.hpp"

#include <algorithm>
#include <string>

#include "ntn/errors.hpp"

namespace ntn {

namespace {

void check_station(const OrbitGeometry& geom, const GroundStation& gs)
{
    if (std::abs(norm(gs.position) - geom.earth_radius_m) > 1.0) {
        throw DomainError("ground station is not on the Earth surface (|r| != earth_radius_m within 1 m)");
    }
}

struct PassFrame {
    Vec3 zenith;      // unit vector towards the ground station
    Vec3 peak_dir;    // unit vector towards the satellite at t = 0
    Vec3 along_track; // unit velocity direction at t = 0
};

PassFrame pass_frame(const OrbitGeometry& geom, const GroundStation& gs)
{
    const Vec3 g = (1.0 / norm(gs.position)) * gs.position;
    const Vec3 helper = std::abs(g.z) < 0.9 ? Vec3{0.0, 0.0, 1.0} : Vec3{1.0, 0.0, 0.0};
    Vec3 e1 = cross(helper, g);
    e1 = (1.0 / norm(e1)) * e1;
    const Vec3 e2 = cross(g, e1);

    // Earth-central angle between station and sub-satellite point at peak elevation.
    const double el = geom.max_elevation_rad;
    const double ratio = std::clamp(geom.earth_radius_m * std::cos(el) / geom.orbit_radius_m(), -1.0, 1.0);
    const double lambda = std::max(0.0, std::acos(ratio) - el);

    return {g, std::cos(lambda) * g + std::sin(lambda) * e2, e1};
}

double interp(const std::vector<double>& t, const std::vector<double>& y, std::size_t i, double tq)
{
    const double w = (tq - t[i]) / (t[i + 1] - t[i]);
    return y[i] + w * (y[i + 1] - y[i]);
}

}  // namespace

void OrbitGeometry::validate() const
{
    if (!(altitude_m > 0.0)) {
        throw DomainError("altitude_m must be > 0");
    }
    if (!(max_elevation_rad > 0.0 && max_elevation_rad <= kPi / 2.0)) {
        throw DomainError("max_elevation_rad must lie in (0, pi/2]");
    }
    if (!(earth_radius_m > 0.0)) {
        throw DomainError("earth_radius_m must be > 0");
    }
    if (!(mu_m3s2 > 0.0)) {
        throw DomainError("mu_m3s2 must be > 0");
    }
}

double OrbitGeometry::angular_rate_rad_s() const
{
    const double r = orbit_radius_m();
    return std::sqrt(mu_m3s2 / (r * r * r));
}

double OrbitGeometry::period_s() const { return kTwoPi / angular_rate_rad_s(); }

double OrbitGeometry::orbital_speed_ms() const { return std::sqrt(mu_m3s2 / orbit_radius_m()); }

GroundStation GroundStation::on_surface(const OrbitGeometry& geom) { return {{geom.earth_radius_m, 0.0, 0.0}}; }

SatelliteState satellite_state(const OrbitGeometry& geom, const GroundStation& gs, double t_s)
{
    geom.validate();
    check_station(geom, gs);
    if (!(std::abs(t_s) <= 0.5 * geom.period_s())) {
        throw DomainError("t outside +/- half an orbital period around the pass peak");
    }

    const PassFrame f = pass_frame(geom, gs);
    const double r = geom.orbit_radius_m();
    const double w = geom.angular_rate_rad_s();
    const double c = std::cos(w * t_s);
    const double s = std::sin(w * t_s);

    return {r * c * f.peak_dir + r * s * f.along_track, (r * w * -s) * f.peak_dir + (r * w * c) * f.along_track};
}

RangeElevation slant_range_and_elevation(const OrbitGeometry& geom, const GroundStation& gs, double t_s)
{
    const SatelliteState st = satellite_state(geom, gs, t_s);
    const Vec3 los = st.position - gs.position;
    const double range = norm(los);
    const double sin_el = std::clamp(dot(los, gs.position) / (range * norm(gs.position)), -1.0, 1.0);
    return {range, std::asin(sin_el)};
}

double radial_velocity(const OrbitGeometry& geom, const GroundStation& gs, double t_s)
{
    const SatelliteState st = satellite_state(geom, gs, t_s);
    const Vec3 los = st.position - gs.position;
    return dot(los, st.velocity) / norm(los);
}

double doppler_shift(const OrbitGeometry& geom, const GroundStation& gs, double t_s, double carrier_hz)
{
    if (!(carrier_hz > 0.0)) {
        throw DomainError("carrier_hz must be > 0");
    }
    return -(radial_velocity(geom, gs, t_s) / kSpeedOfLight) * carrier_hz;
}

void PassProfile::validate() const
{
    const std::size_t n = t_s.size();
    if (n < 2) {
        throw DomainError("pass profile needs at least two samples");
    }
    if (slant_range_m.size() != n || elevation_rad.size() != n || delay_s.size() != n ||
        radial_velocity_ms.size() != n) {
        throw DomainError("pass profile arrays differ in length");
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (!(t_s[i] > t_s[i - 1])) {
            throw DomainError("pass profile time samples must be strictly increasing");
        }
    }
}

std::size_t PassProfile::segment_of(double t) const
{
    if (!covers(t, t)) {
        throw DomainError("time " + std::to_string(t) + " s lies outside the pass profile");
    }
    const auto it = std::upper_bound(t_s.begin(), t_s.end(), t);
    const auto idx = static_cast<std::size_t>(std::distance(t_s.begin(), it));
    return std::min(idx == 0 ? 0 : idx - 1, t_s.size() - 2);
}

double PassProfile::delay_at(double t) const { return interp(t_s, delay_s, segment_of(t), t); }

double PassProfile::radial_velocity_at(double t) const { return interp(t_s, radial_velocity_ms, segment_of(t), t); }

PassProfile generate_pass_profile(const OrbitGeometry& geom, const GroundStation& gs, double t_start_s,
                                  double t_end_s, double dt_s)
{
    if (!(t_start_s < t_end_s)) {
        throw DomainError("empty pass window: t_start must be < t_end");
    }
    if (!(dt_s > 0.0)) {
        throw DomainError("dt must be > 0");
    }
    // Small slack keeps e.g. (300 - (-300)) / 1 from flooring to 599.
    const auto steps = static_cast<std::size_t>(std::floor((t_end_s - t_start_s) / dt_s + 1e-9));
    const std::size_t n = steps + 1;
    if (n < 2) {
        throw DomainError("pass window shorter than one time step");
    }

    PassProfile p;
    p.t_s.resize(n);
    p.slant_range_m.resize(n);
    p.elevation_rad.resize(n);
    p.delay_s.resize(n);
    p.radial_velocity_ms.resize(n);

    for (std::size_t i = 0; i < n; ++i) {
        const double t = t_start_s + static_cast<double>(i) * dt_s;
        const RangeElevation re = slant_range_and_elevation(geom, gs, t);
        p.t_s[i] = t;
        p.slant_range_m[i] = re.range_m;
        p.elevation_rad[i] = re.elevation_rad;
        p.delay_s[i] = re.range_m / kSpeedOfLight;
    }

    const auto& r = p.slant_range_m;
    const auto& t = p.t_s;
    p.radial_velocity_ms[0] = (r[1] - r[0]) / (t[1] - t[0]);
    p.radial_velocity_ms[n - 1] = (r[n - 1] - r[n - 2]) / (t[n - 1] - t[n - 2]);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        p.radial_velocity_ms[i] = (r[i + 1] - r[i - 1]) / (t[i + 1] - t[i - 1]);
    }
    return p;
}

TimeWindow visibility_window(const OrbitGeometry& geom, const GroundStation& gs, double min_elevation_rad)
{
    geom.validate();
    if (!(min_elevation_rad >= 0.0)) {
        throw DomainError("min_elevation_rad must be >= 0");
    }
    if (!(min_elevation_rad < geom.max_elevation_rad)) {
        throw DomainError("min_elevation_rad must be below the pass peak elevation");
    }

    // Elevation is strictly decreasing in |t| on [0, T/4]; at T/4 the satellite is below the horizon.
    const double quarter = 0.25 * geom.period_s();
    auto crossing = [&](double sign) {
        double inside = 0.0;
        double outside = sign * quarter;
        while (std::abs(outside - inside) > 1e-7) {
            const double mid = 0.5 * (inside + outside);
            if (slant_range_and_elevation(geom, gs, mid).elevation_rad >= min_elevation_rad) {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        return 0.5 * (inside + outside);
    };
    return {crossing(-1.0), crossing(1.0)};
}

double max_abs_delay_rate(const PassProfile& profile)
{
    double best = 0.0;
    for (double v : profile.radial_velocity_ms) {
        best = std::max(best, std::abs(v));
    }
    return best / kSpeedOfLight;
}

}  // namespace ntn
