#include <doctest.h>

#include <cmath>
#include <random>

#include "ntn/errors.hpp"
#include "ntn/ue_comp.hpp"

using namespace ntn;

namespace {

DetectionResult detection_with_total(double hz)
{
    DetectionResult d;
    d.branch_cfo_hz = 0.0;
    d.fine_cfo_hz = hz;
    d.total_cfo_hz = hz;
    return d;
}

CompensationState ready_state(double ssb, double dl, double ul, double k_ms = 6.0, double d_ms = 4.0)
{
    CompensationState s = on_ssb({}, detection_with_total(ssb), 0.0);
    return on_sib19(s, Sib19{k_ms * 1e-3, dl, ul, 0.0}, d_ms * 1e-3, 0.0);
}

}  // namespace

TEST_CASE("picosecond conversions")
{
    CHECK(to_picoseconds(1e-3).count() == 1'000'000'000);
    CHECK(to_picoseconds(2.5e-12).count() == 3);
    CHECK(to_seconds(Picoseconds{4'000'000'000}) == doctest::Approx(4e-3).epsilon(1e-15));
}

TEST_CASE("on_ssb")
{
    CompensationState s = on_ssb({}, detection_with_total(12345.0), 1.0);
    CHECK(s.dl_doppler_ssb_hz == 12345.0);
    CHECK(s.last_ssb_at_s == 1.0);
    CHECK_FALSE(s.ready());

    s = on_ssb(s, detection_with_total(-777.0), 1.02);
    CHECK(s.dl_doppler_ssb_hz == -777.0);
    CHECK(s.last_ssb_at_s == 1.02);
}

TEST_CASE("on_sib19")
{
    const CompensationState base = on_ssb({}, detection_with_total(0.0), 0.0);

    SUBCASE("k_offset 6 ms, d 4 ms -> buffer 2 ms")
    {
        const auto s = on_sib19(base, Sib19{6e-3, 0.0, 0.0, 0.0}, 4e-3, 0.0);
        CHECK(s.buffer_delay == Picoseconds{2'000'000'000});
        CHECK(s.buffer_delay_s() == doctest::Approx(2e-3));
        CHECK(s.ready());
    }
    SUBCASE("d == k_offset -> zero buffer")
    {
        const auto s = on_sib19(base, Sib19{6e-3, 0.0, 0.0, 0.0}, 6e-3, 0.0);
        CHECK(s.buffer_delay.count() == 0);
    }
    SUBCASE("d > k_offset is infeasible")
    {
        CHECK_THROWS_AS(on_sib19(base, Sib19{6e-3, 0.0, 0.0, 0.0}, 7e-3, 0.0), CompensationInfeasibleError);
    }
    SUBCASE("bad inputs")
    {
        CHECK_THROWS_AS(on_sib19(base, Sib19{6e-3, 0.0, 0.0, 0.0}, -1e-3, 0.0), DomainError);
        CHECK_THROWS_AS(on_sib19(base, Sib19{0.0, 0.0, 0.0, 0.0}, 0.0, 0.0), DomainError);
        CHECK_THROWS_AS(on_sib19(base, Sib19{6e-3, NAN, 0.0, 0.0}, 1e-3, 0.0), DomainError);
    }
    SUBCASE("alignment identity is exact for arbitrary delays")
    {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(0.0, 25.77e-3);
        for (int i = 0; i < 1000; ++i) {
            const double d = u(rng);
            const auto s = on_sib19(base, Sib19{26e-3, 0.0, 0.0, 0.0}, d, 0.0);
            CHECK(s.buffer_delay + to_picoseconds(d) == s.k_offset);
        }
    }
}

TEST_CASE("uplink_doppler")
{
    CHECK(uplink_doppler(ready_state(0.0, 0.0, 0.0)) == 0.0);
    CHECK(uplink_doppler(ready_state(10e3, 8e3, 12e3)) == -10e3);
    CHECK(uplink_doppler(ready_state(5e3, 5e3, 9e3)) == -9e3);

    // Linear in each term.
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-6e5, 6e5);
    for (int i = 0; i < 100; ++i) {
        const double a = u(rng), b = u(rng), c = u(rng);
        CHECK(uplink_doppler(ready_state(a, b, c)) == doctest::Approx(a - b - c).epsilon(1e-12));
    }

    CHECK_THROWS_AS(uplink_doppler(CompensationState{}), StateNotReadyError);
    CHECK_THROWS_AS(uplink_doppler(on_ssb({}, detection_with_total(1.0), 0.0)), StateNotReadyError);
    CompensationState no_ssb;
    no_ssb.last_sib19_at_s = 0.0;
    CHECK_THROWS_AS(uplink_doppler(no_ssb), StateNotReadyError);
}

TEST_CASE("precompensate_uplink")
{
    IqBuffer x{std::vector<cf64>(64), 11e6};
    for (std::size_t n = 0; n < x.size(); ++n) {
        x.samples[n] = {std::cos(0.1 * n), std::sin(0.3 * n)};
    }

    SUBCASE("zero buffer, zero Doppler -> identity")
    {
        const auto y = precompensate_uplink(x, ready_state(0.0, 0.0, 0.0, 6.0, 6.0));
        REQUIRE(y.size() == x.size());
        for (std::size_t n = 0; n < x.size(); ++n) {
            CHECK(std::abs(y.samples[n] - x.samples[n]) < 1e-9);
        }
    }
    SUBCASE("2 ms at 11 Msps -> 22000 samples")
    {
        const auto s = ready_state(0.0, 0.0, 0.0, 6.0, 4.0);
        CHECK(buffer_delay_samples(s, 11e6) == 22000);
        const auto y = precompensate_uplink(x, s);
        REQUIRE(y.size() == 22000 + x.size());
        for (std::size_t n = 0; n < 22000; ++n) {
            REQUIRE(y.samples[n] == cf64{});
        }
        for (std::size_t n = 0; n < x.size(); ++n) {
            CHECK(std::abs(y.samples[22000 + n] - x.samples[n]) < 1e-9);
        }
    }
    SUBCASE("frequency shift by +f_UL")
    {
        const auto s = ready_state(1000.0, 0.0, 0.0, 6.0, 6.0);
        const auto y = precompensate_uplink(x, s);
        const auto ref = apply_cfo(x, 1000.0);
        for (std::size_t n = 0; n < x.size(); ++n) {
            CHECK(std::abs(y.samples[n] - ref.samples[n]) < 1e-9);
        }
    }
    SUBCASE("timed form moves t0 instead of padding")
    {
        const auto s = ready_state(1000.0, 0.0, 0.0, 6.0, 4.0);
        const TimedIq y = precompensate_uplink(TimedIq{x, 0.5}, s);
        CHECK(y.t0_s == doctest::Approx(0.5 + 2e-3).epsilon(1e-15));
        REQUIRE(y.iq.size() == x.size());
        // Same samples as the padded form, minus the padding.
        const auto padded = precompensate_uplink(x, s);
        for (std::size_t n = 0; n < x.size(); ++n) {
            CHECK(std::abs(y.iq.samples[n] - padded.samples[22000 + n]) < 1e-9);
        }
    }
    SUBCASE("not ready")
    {
        CHECK_THROWS_AS(precompensate_uplink(x, CompensationState{}), StateNotReadyError);
    }
}
