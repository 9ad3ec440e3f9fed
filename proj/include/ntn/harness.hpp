#pragma once

// Scenario runners: detector Monte Carlo and the end-to-end pass.
//
// End-to-end loop, one iteration per SSB period (gNB time T_k):
//   gNB SSB -> payload (DL Doppler at ka_up) -> UE capture (-LO) -> detect
//   -> on_ssb -> [on_sib19 every cadence] -> UL reference through
//   precompensate_uplink (+LO) -> payload (UL Doppler at ka_down)
//   -> gNB: residual CFO and arrival time against T_k + k_offset.
// The UE's DL frame timing is ideal (capture aligned on the true arrival);
// only frequency is acquired.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ntn/metrics.hpp"
#include "ntn/scenario.hpp"
#include "ntn/ue_comp.hpp"

namespace ntn {

struct TrialSpec {
    double cfo_hz = 0.0;
    double snr_db = 0.0;
    std::uint64_t seed = 0;
};

/// One detector trial: a PSS at a seed-drawn position in a 2*N capture,
/// seed-drawn carrier phase, CFO as given, AWGN at snr_db relative to the
/// symbol's per-sample power. Success means detected with the right nid2
/// and timing within one sample.
bool run_detection_trial(const SsbConfig& ssb, const TrialSpec& trial, const CfoHypothesisBank& bank,
                         double threshold);

struct AcquisitionRow {
    double cfo_hz = 0.0;
    double snr_db = 0.0;
    std::size_t trials = 0;
    double p_detect_full_bank = 0.0;
    double p_detect_zero_bank = 0.0;
};

/// Rows in (cfo, snr) grid order. Trial i of every point uses
/// cfg.seed_for(i), and both banks see the same capture.
std::vector<AcquisitionRow> run_acquisition_sweep(const ScenarioConfig& cfg, const std::vector<double>& cfo_grid_hz,
                                                  const std::vector<double>& snr_grid_db, std::size_t trials_per_point);

struct AlignmentEvent {
    std::size_t row = 0;
    Picoseconds k_offset{0};
    Picoseconds buffer_delay{0};
    Picoseconds d{0};
};

struct EndToEndTrace {
    Metrics metrics;
    std::vector<AlignmentEvent> sib19_events;
    double k_offset_s = 0.0;            // true (network) value
    double ul_sample_rate_hz = 0.0;
    double max_round_trip_rate = 0.0;   // max |d'(t)|, dimensionless
    double drift_bound_samples = 0.0;   // max |d'| * cadence * fs_ul
    IqBuffer first_dl_capture;          // UE capture of the first frame, as fed to the detector
    double dl_carrier_hz = 0.0;
};

class ScenarioFailure : public std::runtime_error {
public:
    ScenarioFailure(const std::string& what, Metrics partial)
        : std::runtime_error(what), partial_(std::move(partial))
    {
    }
    const Metrics& partial() const { return partial_; }

private:
    Metrics partial_;
};

/// Smallest whole millisecond >= the largest round trip inside the window.
double auto_k_offset_s(const ScenarioConfig& cfg);

EndToEndTrace run_end_to_end_detailed(const ScenarioConfig& cfg);

/// Throws ScenarioFailure (with the rows so far) if the DL is never acquired.
Metrics run_end_to_end(const ScenarioConfig& cfg);

/// UL reference: PSS of nid2 on every second bin of an fft_size DFT
/// (two identical halves), preceded by cp_samples of cyclic prefix.
IqBuffer uplink_reference(const UplinkConfig& ul, int nid2, double sample_rate_hz);

}  // namespace ntn
