#pragma once

// UE-side compensation state.
//
// Delay: the UE holds its uplink back by buffer = k_offset - d, so that
// every uplink lands k_offset after the downlink frame it answers, for any
// position in the pass. The buffer is recomputed on each SIB19.
//
// Frequency: f_UL = f_DL^SSB - f_DL^SIB19 - f_UL^SIB19. The SSB term is the
// measured DL offset (satellite Doppler plus the UE oscillator error), the
// SIB19 terms are the network-declared satellite Doppler on each link.
// Subtracting the declared DL Doppler leaves the oscillator error, which is
// then removed from the uplink together with the declared UL Doppler.

#include <chrono>
#include <cstdint>
#include <optional>

#include "ntn/ue_sync.hpp"
#include "ntn/waveform.hpp"

namespace ntn {

/// Delays are kept as integer picoseconds so that the alignment identity
/// buffer + d == k_offset holds exactly rather than to rounding.
using Picoseconds = std::chrono::duration<std::int64_t, std::pico>;

Picoseconds to_picoseconds(double seconds);
double to_seconds(Picoseconds p);

struct Sib19 {
    double k_offset_s = 0.0;
    double dl_doppler_hz = 0.0;
    double ul_doppler_hz = 0.0;
    double issued_at_s = 0.0;

    /// Throws DomainError unless k_offset_s > 0 and all fields are finite.
    void validate() const;
};

struct CompensationState {
    Picoseconds buffer_delay{0};
    Picoseconds k_offset{0};
    double dl_doppler_ssb_hz = 0.0;
    double dl_doppler_sib19_hz = 0.0;
    double ul_doppler_sib19_hz = 0.0;
    double ul_doppler_hz = 0.0;  // f_UL as of the last SIB19 (uplink_doppler() is always current)
    std::optional<double> last_ssb_at_s;
    std::optional<double> last_sib19_at_s;

    double buffer_delay_s() const { return to_seconds(buffer_delay); }
    double k_offset_s() const { return to_seconds(k_offset); }
    bool ready() const { return last_ssb_at_s.has_value() && last_sib19_at_s.has_value(); }
};

/// dl_doppler_ssb <- det.total_cfo_hz; last_ssb_at <- now. Nothing else.
CompensationState on_ssb(CompensationState state, const DetectionResult& det, double now_s);

/// k_offset <- sib.k_offset, buffer <- k_offset - d, SIB19 Doppler terms
/// cached. Throws CompensationInfeasibleError when d > k_offset (state is
/// left untouched), DomainError for negative d or an invalid SIB19.
CompensationState on_sib19(CompensationState state, const Sib19& sib, double current_delay_d_s, double now_s);

/// f_DL^SSB - f_DL^SIB19 - f_UL^SIB19. Throws StateNotReadyError before
/// the first SSB or SIB19.
double uplink_doppler(const CompensationState& state);

/// Number of whole samples the uplink is held back at rate fs.
std::size_t buffer_delay_samples(const CompensationState& state, double sample_rate_hz);

/// Zero-pads round(buffer * fs) samples in front, then shifts by
/// +uplink_doppler(state).
IqBuffer precompensate_uplink(const IqBuffer& buf, const CompensationState& state);

/// Same compensation for a buffer anchored in time: the start time moves
/// by round(buffer * fs) / fs instead of carrying the zero padding.
TimedIq precompensate_uplink(const TimedIq& tx, const CompensationState& state);

}  // namespace ntn
