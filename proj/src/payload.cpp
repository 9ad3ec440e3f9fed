#include "ntn/payload.hpp"

#include <cmath>

#include "ntn/errors.hpp"
#include "ntn/ue_sync.hpp"

namespace ntn {

double FrequencyPlan::dl_offset_hz() const
{
    return dl_slot_offset_hz.value_or(-(0.25 * (dl_slot_hz + ul_slot_hz) + 0.5 * guard_hz));
}

double FrequencyPlan::ul_offset_hz() const
{
    return ul_slot_offset_hz.value_or(0.25 * (dl_slot_hz + ul_slot_hz) + 0.5 * guard_hz);
}

std::vector<PlanViolation> validate_plan(const FrequencyPlan& plan, bool range_check)
{
    std::vector<PlanViolation> out;
    const std::pair<const char*, double> positive[] = {
        {"l_band_center_hz", plan.l_band_center_hz}, {"ka_up_center_hz", plan.ka_up_center_hz},
        {"ka_down_center_hz", plan.ka_down_center_hz}, {"dl_slot_hz", plan.dl_slot_hz},
        {"ul_slot_hz", plan.ul_slot_hz}, {"guard_hz", plan.guard_hz},
        {"sample_rate_hz", plan.sample_rate_hz},
    };
    for (const auto& [field, value] : positive) {
        if (!(value > 0.0) || !std::isfinite(value)) {
            out.push_back({"non_positive", field, 0.0, value});
        }
    }
    if (plan.occupancy_hz() > plan.sample_rate_hz) {
        out.push_back({"occupancy", "sample_rate_hz", plan.sample_rate_hz, plan.occupancy_hz()});
    }
    if (range_check) {
        if (plan.ka_up_center_hz < kBucOutMinHz) {
            out.push_back({"buc_range", "ka_up_center_hz", kBucOutMinHz, plan.ka_up_center_hz});
        } else if (plan.ka_up_center_hz > kBucOutMaxHz) {
            out.push_back({"buc_range", "ka_up_center_hz", kBucOutMaxHz, plan.ka_up_center_hz});
        }
        if (plan.ka_down_center_hz < kLnbInMinHz) {
            out.push_back({"lnb_range", "ka_down_center_hz", kLnbInMinHz, plan.ka_down_center_hz});
        } else if (plan.ka_down_center_hz > kLnbInMaxHz) {
            out.push_back({"lnb_range", "ka_down_center_hz", kLnbInMaxHz, plan.ka_down_center_hz});
        }
    }
    return out;
}

const char* to_string(PayloadMode mode)
{
    return mode == PayloadMode::Transparent ? "transparent" : "regenerative";
}

PayloadMode parse_payload_mode(const std::string& text)
{
    if (text == "transparent") {
        return PayloadMode::Transparent;
    }
    if (text == "regenerative") {
        return PayloadMode::Regenerative;
    }
    throw DomainError("payload mode must be 'transparent' or 'regenerative', got '" + text + "'");
}

double compose_gain_chain(const std::vector<GainStage>& stages)
{
    double total = 0.0;
    for (const auto& s : stages) {
        if (!std::isfinite(s.gain_db)) {
            throw DomainError("gain stage '" + s.name + "' is not finite");
        }
        total += s.gain_db;
    }
    return total;
}

IqBuffer regenerate_frame(const IqBuffer& buf, const SsbConfig& frame)
{
    DetectionResult det;
    try {
        det = detect_pss(buf, frame, build_hypothesis_bank(0.0, frame.scs_hz));
    } catch (const NotDetectedError& e) {
        throw RelayFailureError(std::string("regenerative payload lost the frame: ") + e.what());
    }
    SsbConfig c = frame;
    c.nid2 = det.nid2;
    const IqBuffer symbol = modulate_ssb_symbol(c);
    IqBuffer out{std::vector<cf64>(buf.size()), buf.sample_rate_hz};
    std::copy(symbol.samples.begin(), symbol.samples.end(),
              out.samples.begin() + static_cast<std::ptrdiff_t>(det.timing_offset_samples));
    return out;
}

IqBuffer relay(const TimedIq& tx, PayloadMode mode, const FrequencyPlan& plan, const PassProfile& profile,
               double carrier_hz, double rx_t0_s, std::size_t rx_len, const std::vector<GainStage>& chain,
               const SsbConfig& frame)
{
    const auto violations = validate_plan(plan);
    if (!violations.empty()) {
        throw DomainError("relay: invalid frequency plan (" + violations.front().code + " on " +
                          violations.front().field + ")");
    }
    const double amplitude = std::pow(10.0, compose_gain_chain(chain) / 20.0);

    IqBuffer out = mode == PayloadMode::Regenerative
                       ? propagate({regenerate_frame(tx.iq, frame), tx.t0_s}, profile, carrier_hz, rx_t0_s, rx_len)
                       : propagate(tx, profile, carrier_hz, rx_t0_s, rx_len);
    if (amplitude != 1.0) {
        for (auto& s : out.samples) {
            s *= amplitude;
        }
    }
    return out;
}

IqBuffer relay(const IqBuffer& buf, PayloadMode mode, const FrequencyPlan& plan, const PassProfile& profile,
               double carrier_hz, double t0_s, const std::vector<GainStage>& chain, const SsbConfig& frame)
{
    return relay(TimedIq{buf, t0_s}, mode, plan, profile, carrier_hz, t0_s, buf.size(), chain, frame);
}

}  // namespace ntn
