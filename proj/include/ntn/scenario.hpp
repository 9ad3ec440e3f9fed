#pragma once

// Scenario configuration. Files are YAML with unit-suffixed keys; every
// section and key is optional and unknown keys are rejected.
//
//   id: leo600
//   orbit:   {altitude_m, max_elevation_deg | max_elevation_rad,
//             min_elevation_deg | min_elevation_rad}
//   ssb:     {scs_hz, fft_size, periodicity_ms, nid2}
//   sib19:   {cadence_ms, k_offset_ms, truthful,
//             dl_doppler_error_hz, ul_doppler_error_hz, k_offset_error_ms}
//   ue:      {lo_offset_hz, delay_error_us}
//   uplink:  {fft_size, cp_samples}
//   plan:    {l_band_center_hz, ka_up_center_hz, ka_down_center_hz, dl_slot_hz,
//             ul_slot_hz, guard_hz, sample_rate_hz, dl_slot_offset_hz, ul_slot_offset_hz}
//   payload: {mode: transparent | regenerative, chain: [{name, gain_db}, ...]}
//   snr_db, seeds: [u64...], duration_s, profile_dt_s, detection_threshold
//   acquire: {cfo_grid_hz: [...], snr_grid_db: [...], trials, bank_range_hz}

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ntn/orbit.hpp"
#include "ntn/payload.hpp"
#include "ntn/ue_sync.hpp"
#include "ntn/waveform.hpp"

namespace ntn {

struct Sib19Config {
    double cadence_ms = 160.0;
    std::optional<double> k_offset_ms;  // absent: smallest whole ms >= max round trip of the pass
    bool truthful = true;
    double dl_doppler_error_hz = 0.0;
    double ul_doppler_error_hz = 0.0;
    double k_offset_error_ms = 0.0;
};

struct UeConfig {
    double lo_offset_hz = 0.0;   // UE oscillator error: DL appears shifted by -lo, UL leaves shifted by +lo
    double delay_error_us = 0.0; // error in the UE's own estimate of d
};

// The channel's linear interpolator biases the gNB CFO estimate by roughly
// f0 * mean(w^2) / 2 per unit of delay rate, with f0 the UE pre-shift and
// w the tone frequencies in rad/sample. At 11 Msps, 2048 bins keep the
// stride-2 reference within +/-0.68 MHz and that bias near 0.35 Hz at the
// pass edges (about 1.1 Hz with 1024 bins).
struct UplinkConfig {
    std::size_t fft_size = 2048;  // at plan.sample_rate_hz
    std::size_t cp_samples = 144;
};

struct AcquireConfig {
    std::vector<double> cfo_grid_hz{0.0, 15e3, 30e3};
    std::vector<double> snr_grid_db{0.0, 20.0};
    std::size_t trials = 50;
    std::optional<double> bank_range_hz;  // absent: 2.5 * scs
};

struct ScenarioConfig {
    std::string id = "default";
    OrbitGeometry orbit;
    double min_elevation_rad = deg_to_rad(10.0);
    SsbConfig ssb;
    Sib19Config sib19;
    UeConfig ue;
    UplinkConfig uplink;
    FrequencyPlan plan;
    PayloadMode payload_mode = PayloadMode::Transparent;
    std::vector<GainStage> chain;
    std::optional<double> snr_db;  // absent: noiseless
    std::vector<std::uint64_t> seeds{1};
    std::optional<double> duration_s;  // absent: whole visibility window
    double profile_dt_s = 0.01;
    double detection_threshold = kDefaultDetectionThreshold;
    AcquireConfig acquire;

    /// Throws DomainError on any invalid sub-configuration.
    void validate() const;

    /// seeds[i] when listed, otherwise derived from seeds[0] and i.
    std::uint64_t seed_for(std::size_t trial) const;

    double bank_range_hz() const { return acquire.bank_range_hz.value_or(2.5 * ssb.scs_hz); }
};

/// SplitMix64 finaliser; used to derive independent seed streams.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream);

/// With check = false only syntax and key names are checked; callers that
/// want to report a bad sub-config (e.g. the frequency plan) use that form.
ScenarioConfig parse_scenario(const std::string& yaml_text, bool check = true);

/// Throws IoError when the file cannot be read, DomainError on bad content.
ScenarioConfig load_scenario(const std::filesystem::path& path, bool check = true);

}  // namespace ntn
