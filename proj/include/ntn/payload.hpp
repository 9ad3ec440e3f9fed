#pragma once

// Emulated satellite payload: frequency plan, gain chain, and the relay
// itself (bent pipe or regenerate-and-forward).
//
// Frequency translation between L band and Ka band is bookkeeping only; at
// complex baseband it leaves the samples untouched. Doppler is computed at
// whatever physical carrier the caller passes in.

#include <optional>
#include <string>
#include <vector>

#include "ntn/orbit.hpp"
#include "ntn/waveform.hpp"

namespace ntn {

struct FrequencyPlan {
    double l_band_center_hz = 1.48826e9;
    double ka_up_center_hz = 29.48826e9;
    double ka_down_center_hz = 19.73826e9;
    double dl_slot_hz = 5e6;
    double ul_slot_hz = 5e6;
    double guard_hz = 1e6;
    double sample_rate_hz = 11e6;
    // Slot centres relative to the plan centre; symmetric split by default.
    std::optional<double> dl_slot_offset_hz;
    std::optional<double> ul_slot_offset_hz;

    double occupancy_hz() const { return dl_slot_hz + guard_hz + ul_slot_hz; }
    /// -((dl + ul)/4 + guard/2) unless overridden.
    double dl_offset_hz() const;
    /// +((dl + ul)/4 + guard/2) unless overridden.
    double ul_offset_hz() const;
};

struct PlanViolation {
    std::string code;   // "occupancy", "non_positive", "buc_range", "lnb_range"
    std::string field;
    double limit = 0.0;
    double actual = 0.0;
};

inline constexpr double kBucOutMinHz = 29.0e9;
inline constexpr double kBucOutMaxHz = 31.0e9;
inline constexpr double kLnbInMinHz = 19.2e9;
inline constexpr double kLnbInMaxHz = 20.2e9;

/// Empty result means the plan is valid. Never throws.
std::vector<PlanViolation> validate_plan(const FrequencyPlan& plan, bool range_check = true);

enum class PayloadMode { Transparent, Regenerative };

const char* to_string(PayloadMode mode);
/// "transparent" | "regenerative"; DomainError otherwise.
PayloadMode parse_payload_mode(const std::string& text);

struct GainStage {
    std::string name;
    double gain_db = 0.0;
};

double compose_gain_chain(const std::vector<GainStage>& stages);

/// Regenerative front end: PSS detection ({0} bank, default threshold) and
/// a clean copy of the detected symbol at the detected position, in a zero
/// buffer of the input's length. Throws RelayFailureError.
IqBuffer regenerate_frame(const IqBuffer& buf, const SsbConfig& frame);

/// Relay `tx` and observe the result on the receive grid rx_t0 + n/fs.
/// Regenerative mode rebuilds tx first. Impairments per propagate(), then
/// the chain gain as a linear amplitude factor 10^(G/20).
IqBuffer relay(const TimedIq& tx, PayloadMode mode, const FrequencyPlan& plan, const PassProfile& profile,
               double carrier_hz, double rx_t0_s, std::size_t rx_len, const std::vector<GainStage>& chain,
               const SsbConfig& frame = {});

/// Relay on the buffer's own time grid starting at t0.
IqBuffer relay(const IqBuffer& buf, PayloadMode mode, const FrequencyPlan& plan, const PassProfile& profile,
               double carrier_hz, double t0_s, const std::vector<GainStage>& chain, const SsbConfig& frame = {});

}  // namespace ntn
