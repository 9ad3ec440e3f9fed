#include <doctest.h>

#include <cmath>
#include <random>

#include "ntn/errors.hpp"
#include "ntn/orbit.hpp"

using namespace ntn;

namespace {

OrbitGeometry overhead_600km()
{
    OrbitGeometry g;
    g.altitude_m = 600e3;
    g.max_elevation_rad = kPi / 2.0;
    return g;
}

// Closed-form elevation for an overhead pass: central angle theta = w t.
double overhead_elevation(const OrbitGeometry& g, double t)
{
    const double r = g.orbit_radius_m();
    const double re = g.earth_radius_m;
    const double theta = g.angular_rate_rad_s() * t;
    const double range = std::sqrt(r * r + re * re - 2.0 * r * re * std::cos(theta));
    return std::asin((r * std::cos(theta) - re) / range);
}

}  // namespace

TEST_CASE("satellite_state: circular-orbit identities")
{
    const OrbitGeometry g = overhead_600km();
    const GroundStation gs = GroundStation::on_surface(g);

    const SatelliteState peak = satellite_state(g, gs, 0.0);
    CHECK(norm(peak.position) == doctest::Approx(6'971'000.0).epsilon(1e-9));
    CHECK(norm(peak.position - gs.position) == doctest::Approx(600e3).epsilon(1e-9));

    for (double t : {-900.0, -250.0, 0.0, 13.7, 400.0, 2000.0}) {
        const SatelliteState s = satellite_state(g, gs, t);
        CHECK(norm(s.position) == doctest::Approx(g.orbit_radius_m()).epsilon(1e-12));
        CHECK(norm(s.velocity) == doctest::Approx(g.orbital_speed_ms()).epsilon(1e-6));
        CHECK(std::abs(dot(s.position, s.velocity)) / (norm(s.position) * norm(s.velocity)) < 1e-9);
    }
}

TEST_CASE("satellite_state: preconditions")
{
    OrbitGeometry g = overhead_600km();
    const GroundStation gs = GroundStation::on_surface(g);
    CHECK_THROWS_AS(satellite_state(g, gs, 0.51 * g.period_s()), DomainError);
    CHECK_THROWS_AS(satellite_state(g, GroundStation{{g.earth_radius_m + 5.0, 0.0, 0.0}}, 0.0), DomainError);

    g.altitude_m = -1.0;
    CHECK_THROWS_AS(satellite_state(g, gs, 0.0), DomainError);
    g = overhead_600km();
    g.max_elevation_rad = 0.0;
    CHECK_THROWS_AS(satellite_state(g, gs, 0.0), DomainError);
    g.max_elevation_rad = 1.6;
    CHECK_THROWS_AS(satellite_state(g, gs, 0.0), DomainError);
}

TEST_CASE("slant_range_and_elevation")
{
    const OrbitGeometry g = overhead_600km();
    const GroundStation gs = GroundStation::on_surface(g);

    const RangeElevation peak = slant_range_and_elevation(g, gs, 0.0);
    CHECK(peak.range_m == doctest::Approx(600e3).epsilon(1e-9));
    CHECK(peak.elevation_rad == doctest::Approx(kPi / 2.0).epsilon(1e-9));

    for (double t : {10.0, 100.0, 333.3}) {
        const double a = slant_range_and_elevation(g, gs, t).range_m;
        const double b = slant_range_and_elevation(g, gs, -t).range_m;
        CHECK(std::abs(a - b) / a < 1e-6);
    }

    // Horizon: range = sqrt((Re+h)^2 - Re^2) ~ 2829.3 km.
    const TimeWindow horizon = visibility_window(g, gs, 0.0);
    const RangeElevation edge = slant_range_and_elevation(g, gs, horizon.end_s);
    CHECK(std::abs(edge.elevation_rad) < 1e-6);
    CHECK(edge.range_m == doctest::Approx(std::sqrt(6971e3 * 6971e3 - 6371e3 * 6371e3)).epsilon(1e-5));
    CHECK(edge.range_m == doctest::Approx(2'829'300.0).epsilon(1e-4));
}

TEST_CASE("peak elevation matches the requested pass geometry")
{
    for (double deg : {30.0, 45.0, 60.0, 75.0}) {
        OrbitGeometry g = overhead_600km();
        g.max_elevation_rad = deg_to_rad(deg);
        const GroundStation gs = GroundStation::on_surface(g);
        CHECK(slant_range_and_elevation(g, gs, 0.0).elevation_rad == doctest::Approx(g.max_elevation_rad).epsilon(1e-9));
        CHECK(slant_range_and_elevation(g, gs, 5.0).elevation_rad < g.max_elevation_rad);
        CHECK(slant_range_and_elevation(g, gs, -5.0).elevation_rad < g.max_elevation_rad);
    }
}

TEST_CASE("doppler_shift")
{
    const OrbitGeometry g = overhead_600km();
    const GroundStation gs = GroundStation::on_surface(g);

    CHECK(std::abs(doppler_shift(g, gs, 0.0, 20e9)) < 1.0);
    CHECK(doppler_shift(g, gs, -100.0, 20e9) > 0.0);
    CHECK(doppler_shift(g, gs, 100.0, 20e9) < 0.0);
    CHECK(doppler_shift(g, gs, 77.0, 40e9) == 2.0 * doppler_shift(g, gs, 77.0, 20e9));
    CHECK_THROWS_AS(doppler_shift(g, gs, 0.0, 0.0), DomainError);

    // Window edge at 10 deg: central-difference oracle on slant range, h = 1 ms.
    const double t = visibility_window(g, gs, deg_to_rad(10.0)).end_s;
    const double h = 1e-3;
    const double oracle = -20e9 *
                          (slant_range_and_elevation(g, gs, t + h).range_m - slant_range_and_elevation(g, gs, t - h).range_m) /
                          (2.0 * h * kSpeedOfLight);
    const double f = doppler_shift(g, gs, t, 20e9);
    CHECK(std::abs(f - oracle) <= 1e-3 * std::abs(oracle));
    // Closed form R Re w sin(lambda) / range at the edge, computed offline.
    CHECK(f == doctest::Approx(-454'040.53).epsilon(1e-6));
}

TEST_CASE("doppler oracle equivalence over random geometries")
{
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> alt(400e3, 1200e3);
    std::uniform_real_distribution<double> el(deg_to_rad(30.0), kPi / 2.0);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        OrbitGeometry g;
        g.altitude_m = alt(rng);
        g.max_elevation_rad = el(rng);
        const GroundStation gs = GroundStation::on_surface(g);
        const double t = u(rng) * visibility_window(g, gs, 0.0).end_s;
        const double h = 1e-3;
        const double oracle = -20e9 *
                              (slant_range_and_elevation(g, gs, t + h).range_m -
                               slant_range_and_elevation(g, gs, t - h).range_m) /
                              (2.0 * h * kSpeedOfLight);
        CHECK(std::abs(doppler_shift(g, gs, t, 20e9) - oracle) <= std::max(1e-3 * std::abs(oracle), 1.0));
    }
}

TEST_CASE("generate_pass_profile")
{
    const OrbitGeometry g = overhead_600km();
    const GroundStation gs = GroundStation::on_surface(g);

    const PassProfile p = generate_pass_profile(g, gs, -300.0, 300.0, 1.0);
    CHECK(p.size() == 601);
    CHECK(p.slant_range_m.size() == 601);
    CHECK(p.radial_velocity_ms.size() == 601);
    CHECK_NOTHROW(p.validate());
    for (std::size_t i = 0; i < p.size(); ++i) {
        CHECK(p.delay_s[i] == p.slant_range_m[i] / 299'792'458.0);
    }

    // Zero crossing of radial velocity at the range minimum (within one sample).
    std::size_t imin = 0;
    for (std::size_t i = 1; i < p.size(); ++i) {
        if (p.slant_range_m[i] < p.slant_range_m[imin]) {
            imin = i;
        }
    }
    std::size_t cross = 0;
    for (std::size_t i = 1; i < p.size(); ++i) {
        if (p.radial_velocity_ms[i - 1] < 0.0 && p.radial_velocity_ms[i] >= 0.0) {
            cross = i;
        }
    }
    CHECK(imin == 300);
    CHECK((cross == imin || cross == imin + 1 || cross + 1 == imin));

    CHECK(generate_pass_profile(g, gs, 0.0, 0.95, 0.1).size() == 10);
    CHECK_THROWS_AS(generate_pass_profile(g, gs, 1.0, 1.0, 0.1), DomainError);
    CHECK_THROWS_AS(generate_pass_profile(g, gs, 1.0, 0.0, 0.1), DomainError);
    CHECK_THROWS_AS(generate_pass_profile(g, gs, 0.0, 1.0, 0.0), DomainError);
    CHECK_THROWS_AS(generate_pass_profile(g, gs, 0.0, 0.5, 1.0), DomainError);
}

TEST_CASE("profile interpolation")
{
    const OrbitGeometry g = overhead_600km();
    const GroundStation gs = GroundStation::on_surface(g);
    const PassProfile p = generate_pass_profile(g, gs, -10.0, 10.0, 0.5);
    CHECK(p.delay_at(-10.0) == p.delay_s.front());
    CHECK(p.delay_at(10.0) == p.delay_s.back());
    CHECK(p.delay_at(0.25) == doctest::Approx(0.5 * (p.delay_s[20] + p.delay_s[21])).epsilon(1e-15));
    CHECK(p.doppler_at(3.0, 20e9) == doctest::Approx(-p.radial_velocity_ms[26] / kSpeedOfLight * 20e9));
    CHECK_THROWS_AS(p.delay_at(10.5), DomainError);
    CHECK_THROWS_AS(p.radial_velocity_at(-11.0), DomainError);

    PassProfile bad = p;
    bad.delay_s.pop_back();
    CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("visibility_window")
{
    const OrbitGeometry g = overhead_600km();
    const GroundStation gs = GroundStation::on_surface(g);
    const double min_el = deg_to_rad(10.0);

    const TimeWindow w = visibility_window(g, gs, min_el);
    CHECK(w.start_s < 0.0);
    CHECK(w.end_s > 0.0);
    CHECK(std::abs(w.start_s + w.end_s) < 2e-3);
    CHECK(slant_range_and_elevation(g, gs, w.start_s).elevation_rad == doctest::Approx(min_el).epsilon(1e-6));
    CHECK(slant_range_and_elevation(g, gs, w.end_s).elevation_rad == doctest::Approx(min_el).epsilon(1e-6));

    // Independent oracle: dense 1 ms scan of the closed-form overhead elevation.
    double last_visible = 0.0;
    for (double t = 0.0; overhead_elevation(g, t) >= min_el; t += 1e-3) {
        last_visible = t;
    }
    CHECK(std::abs(w.duration_s() - 2.0 * last_visible) < 10e-3);
    // 2 * lambda / w with lambda = acos(Re cos e / R) - e, computed offline.
    CHECK(w.duration_s() == doctest::Approx(509.59936).epsilon(1e-6));

    // Degenerate: window shrinks as min elevation approaches the peak.
    OrbitGeometry low = g;
    low.max_elevation_rad = deg_to_rad(40.0);
    const double d1 = visibility_window(low, gs, deg_to_rad(30.0)).duration_s();
    const double d2 = visibility_window(low, gs, deg_to_rad(39.9)).duration_s();
    const double d3 = visibility_window(low, gs, deg_to_rad(39.9999)).duration_s();
    CHECK(d2 < d1);
    CHECK(d3 < d2);
    CHECK(d3 < 1.0);

    CHECK_THROWS_AS(visibility_window(low, gs, deg_to_rad(40.0)), DomainError);
    CHECK_THROWS_AS(visibility_window(low, gs, -0.1), DomainError);
}

TEST_CASE("profile shape over a range of passes")
{
    for (double alt : {400e3, 600e3, 1200e3}) {
        for (double peak_deg : {30.0, 60.0, 90.0}) {
            OrbitGeometry g;
            g.altitude_m = alt;
            g.max_elevation_rad = deg_to_rad(peak_deg);
            const GroundStation gs = GroundStation::on_surface(g);
            const TimeWindow w = visibility_window(g, gs, deg_to_rad(10.0));
            const PassProfile p = generate_pass_profile(g, gs, w.start_s, w.end_s, 0.5);
            int local_minima = 0;
            for (std::size_t i = 1; i + 1 < p.size(); ++i) {
                if (p.slant_range_m[i] < p.slant_range_m[i - 1] && p.slant_range_m[i] < p.slant_range_m[i + 1]) {
                    ++local_minima;
                }
            }
            CHECK(local_minima == 1);
            for (std::size_t i = 1; i < p.size(); ++i) {
                CHECK(p.radial_velocity_ms[i] >= p.radial_velocity_ms[i - 1]);
            }
        }
    }
}

TEST_CASE("max_abs_delay_rate")
{
    const OrbitGeometry g = overhead_600km();
    const GroundStation gs = GroundStation::on_surface(g);
    const TimeWindow w = visibility_window(g, gs, deg_to_rad(10.0));
    const PassProfile p = generate_pass_profile(g, gs, w.start_s, w.end_s, 0.01);
    // Closed-form edge radial velocity / c, computed offline.
    CHECK(max_abs_delay_rate(p) == doctest::Approx(2.2702e-5).epsilon(1e-4));
}
