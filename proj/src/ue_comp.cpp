#include "ntn/ue_comp.hpp"

#include <cmath>
#include <string>

#include "ntn/errors.hpp"

namespace ntn {

Picoseconds to_picoseconds(double seconds)
{
    if (!std::isfinite(seconds) || std::abs(seconds) > 1e6) {
        throw DomainError("delay out of representable range: " + std::to_string(seconds) + " s");
    }
    return Picoseconds{std::llround(seconds * 1e12)};
}

double to_seconds(Picoseconds p) { return static_cast<double>(p.count()) * 1e-12; }

void Sib19::validate() const
{
    if (!(k_offset_s > 0.0) || !std::isfinite(k_offset_s)) {
        throw DomainError("SIB19 k_offset must be > 0");
    }
    if (!std::isfinite(dl_doppler_hz) || !std::isfinite(ul_doppler_hz) || !std::isfinite(issued_at_s)) {
        throw DomainError("SIB19 fields must be finite");
    }
}

CompensationState on_ssb(CompensationState state, const DetectionResult& det, double now_s)
{
    state.dl_doppler_ssb_hz = det.total_cfo_hz;
    state.last_ssb_at_s = now_s;
    return state;
}

CompensationState on_sib19(CompensationState state, const Sib19& sib, double current_delay_d_s, double now_s)
{
    sib.validate();
    if (!(current_delay_d_s >= 0.0)) {
        throw DomainError("round-trip delay d must be >= 0");
    }
    const Picoseconds k_offset = to_picoseconds(sib.k_offset_s);
    const Picoseconds d = to_picoseconds(current_delay_d_s);
    if (d > k_offset) {
        throw CompensationInfeasibleError("round-trip delay " + std::to_string(current_delay_d_s * 1e3) +
                                          " ms exceeds k_offset " + std::to_string(sib.k_offset_s * 1e3) + " ms");
    }
    state.k_offset = k_offset;
    state.buffer_delay = k_offset - d;
    state.dl_doppler_sib19_hz = sib.dl_doppler_hz;
    state.ul_doppler_sib19_hz = sib.ul_doppler_hz;
    state.last_sib19_at_s = now_s;
    if (state.last_ssb_at_s) {
        state.ul_doppler_hz = uplink_doppler(state);
    }
    return state;
}

double uplink_doppler(const CompensationState& state)
{
    if (!state.last_ssb_at_s) {
        throw StateNotReadyError("uplink Doppler needs at least one SSB detection");
    }
    if (!state.last_sib19_at_s) {
        throw StateNotReadyError("uplink Doppler needs at least one SIB19");
    }
    return state.dl_doppler_ssb_hz - state.dl_doppler_sib19_hz - state.ul_doppler_sib19_hz;
}

std::size_t buffer_delay_samples(const CompensationState& state, double sample_rate_hz)
{
    if (!(sample_rate_hz > 0.0)) {
        throw DomainError("sample rate must be > 0");
    }
    return static_cast<std::size_t>(std::llround(state.buffer_delay_s() * sample_rate_hz));
}

IqBuffer precompensate_uplink(const IqBuffer& buf, const CompensationState& state)
{
    const double f_ul = uplink_doppler(state);
    const std::size_t pad = buffer_delay_samples(state, buf.sample_rate_hz);
    IqBuffer delayed{std::vector<cf64>(pad + buf.size()), buf.sample_rate_hz};
    std::copy(buf.samples.begin(), buf.samples.end(), delayed.samples.begin() + static_cast<std::ptrdiff_t>(pad));
    return apply_cfo(delayed, f_ul);
}

TimedIq precompensate_uplink(const TimedIq& tx, const CompensationState& state)
{
    const double f_ul = uplink_doppler(state);
    const double fs = tx.iq.sample_rate_hz;
    const std::size_t pad = buffer_delay_samples(state, fs);
    // Phase origin at the padded buffer's first sample, as in the IqBuffer form.
    const double phase0 = kTwoPi * f_ul * static_cast<double>(pad) / fs;
    return {apply_cfo(tx.iq, f_ul, phase0), tx.t0_s + static_cast<double>(pad) / fs};
}

}  // namespace ntn
