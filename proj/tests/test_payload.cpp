#include <doctest.h>

#include <cmath>

#include "ntn/errors.hpp"
#include "ntn/payload.hpp"

using namespace ntn;

namespace {

PassProfile still_profile(double t0, double t1)
{
    PassProfile p;
    for (double t : {t0, t1}) {
        p.t_s.push_back(t);
        p.slant_range_m.push_back(0.0);
        p.elevation_rad.push_back(0.0);
        p.delay_s.push_back(0.0);
        p.radial_velocity_ms.push_back(0.0);
    }
    return p;
}

IqBuffer ramp(std::size_t n, double fs)
{
    IqBuffer x{std::vector<cf64>(n), fs};
    for (std::size_t i = 0; i < n; ++i) {
        x.samples[i] = {std::cos(0.05 * i) + 0.1, std::sin(0.11 * i)};
    }
    return x;
}

double normalized_correlation(const IqBuffer& a, const IqBuffer& b)
{
    cf64 acc{};
    for (std::size_t n = 0; n < a.size(); ++n) {
        acc += a.samples[n] * std::conj(b.samples[n]);
    }
    return std::abs(acc) / std::sqrt(energy(a.samples) * energy(b.samples));
}

bool has_code(const std::vector<PlanViolation>& v, const std::string& code)
{
    for (const auto& x : v) {
        if (x.code == code) {
            return true;
        }
    }
    return false;
}

}  // namespace

TEST_CASE("frequency plan")
{
    const FrequencyPlan plan;
    CHECK(validate_plan(plan).empty());
    CHECK(plan.occupancy_hz() == 11e6);
    CHECK(plan.occupancy_hz() == plan.sample_rate_hz);
    CHECK(plan.dl_offset_hz() == -3e6);
    CHECK(plan.ul_offset_hz() == 3e6);

    SUBCASE("10 Msps cannot hold 11 MHz")
    {
        FrequencyPlan p;
        p.sample_rate_hz = 10e6;
        const auto v = validate_plan(p);
        REQUIRE(v.size() == 1);
        CHECK(v[0].code == "occupancy");
        CHECK(v[0].limit == 10e6);
        CHECK(v[0].actual == 11e6);
    }
    SUBCASE("21 GHz is outside the LNB input band")
    {
        FrequencyPlan p;
        p.ka_down_center_hz = 21e9;
        const auto v = validate_plan(p);
        REQUIRE(v.size() == 1);
        CHECK(v[0].code == "lnb_range");
        CHECK(v[0].field == "ka_down_center_hz");
        CHECK(validate_plan(p, false).empty());
    }
    SUBCASE("28 GHz is outside the BUC output band")
    {
        FrequencyPlan p;
        p.ka_up_center_hz = 28e9;
        CHECK(has_code(validate_plan(p), "buc_range"));
    }
    SUBCASE("band edges are inclusive")
    {
        FrequencyPlan p;
        p.ka_down_center_hz = kLnbInMaxHz;
        p.ka_up_center_hz = kBucOutMinHz;
        CHECK(validate_plan(p).empty());
        p.ka_down_center_hz = 19.1e9;
        CHECK(has_code(validate_plan(p), "lnb_range"));
    }
    SUBCASE("non-positive fields")
    {
        FrequencyPlan p;
        p.dl_slot_hz = 0.0;
        p.guard_hz = -1.0;
        const auto v = validate_plan(p);
        CHECK(has_code(v, "non_positive"));
    }
    SUBCASE("explicit slot offsets")
    {
        FrequencyPlan p;
        p.dl_slot_offset_hz = -2.5e6;
        p.ul_slot_offset_hz = 3.5e6;
        CHECK(p.dl_offset_hz() == -2.5e6);
        CHECK(p.ul_offset_hz() == 3.5e6);
    }
}

TEST_CASE("payload mode names")
{
    CHECK(std::string(to_string(PayloadMode::Transparent)) == "transparent");
    CHECK(parse_payload_mode("regenerative") == PayloadMode::Regenerative);
    CHECK_THROWS_AS(parse_payload_mode("bent-pipe"), DomainError);
}

TEST_CASE("compose_gain_chain")
{
    CHECK(compose_gain_chain({{"BUC", 55.0}}) == 55.0);
    CHECK(compose_gain_chain({{"BUC", 55.0}, {"attenuator", -30.0}, {"LNB", 65.0}}) == 90.0);
    CHECK(compose_gain_chain({}) == 0.0);
}

TEST_CASE("transparent relay")
{
    const FrequencyPlan plan;
    const IqBuffer x = ramp(500, 11e6);
    const PassProfile still = still_profile(0.0, 1.0);

    SUBCASE("passthrough")
    {
        const IqBuffer y = relay(x, PayloadMode::Transparent, plan, still, 29.48826e9, 0.0, {});
        REQUIRE(y.size() == x.size());
        for (std::size_t n = 0; n < x.size(); ++n) {
            CHECK(std::abs(y.samples[n] - x.samples[n]) < 1e-9);
        }
    }
    SUBCASE("+20 dB is 100x power")
    {
        const IqBuffer y = relay(x, PayloadMode::Transparent, plan, still, 29.48826e9, 0.0, {{"amp", 20.0}});
        CHECK(mean_power(y.samples) / mean_power(x.samples) == doctest::Approx(100.0).epsilon(1e-6));
    }
    SUBCASE("linear in the input")
    {
        IqBuffer x2 = x;
        for (auto& s : x2.samples) {
            s *= cf64(0.3, -1.7);
        }
        const IqBuffer y1 = relay(x, PayloadMode::Transparent, plan, still, 29.48826e9, 0.0, {{"a", 7.0}});
        const IqBuffer y2 = relay(x2, PayloadMode::Transparent, plan, still, 29.48826e9, 0.0, {{"a", 7.0}});
        for (std::size_t n = 0; n < x.size(); ++n) {
            CHECK(std::abs(y2.samples[n] - y1.samples[n] * cf64(0.3, -1.7)) < 1e-9);
        }
    }
    SUBCASE("invalid plan is rejected")
    {
        FrequencyPlan bad;
        bad.sample_rate_hz = 10e6;
        CHECK_THROWS_AS(relay(x, PayloadMode::Transparent, bad, still, 0.0, 0.0, {}), DomainError);
    }
}

TEST_CASE("regenerative relay")
{
    const FrequencyPlan plan;
    SsbConfig frame;
    frame.nid2 = 2;
    const double fs = frame.sample_rate_hz();
    const PassProfile still = still_profile(0.0, 1.0);

    const IqBuffer sym = modulate_ssb_symbol(frame);
    IqBuffer clean{std::vector<cf64>(2 * frame.fft_size), fs};
    std::copy(sym.samples.begin(), sym.samples.end(), clean.samples.begin() + 77);

    IqBuffer first;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const IqBuffer noisy = add_awgn(clean, 5.0, seed, mean_power(sym.samples));
        CHECK(normalized_correlation(noisy, clean) < 0.9);
        const IqBuffer out = relay(noisy, PayloadMode::Regenerative, plan, still, 0.0, 0.0, {}, frame);
        CHECK(normalized_correlation(out, clean) >= 0.999);
        if (seed == 0) {
            first = out;
        } else {
            CHECK(out.samples == first.samples);
        }
    }

    SUBCASE("noise only fails the relay")
    {
        const IqBuffer silence{std::vector<cf64>(2 * frame.fft_size), fs};
        const IqBuffer noise = add_awgn(silence, 0.0, 4, 1.0);
        CHECK_THROWS_AS(relay(noise, PayloadMode::Regenerative, plan, still, 0.0, 0.0, {}, frame), RelayFailureError);
    }
}
