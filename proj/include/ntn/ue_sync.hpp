#pragma once

// Downlink acquisition under large carrier frequency offset.
//
// A bank of correlators, each using the local PSS shifted to one CFO
// hypothesis, is run over every lag of the capture (a joint time/frequency
// search). The branch/identity/lag with the largest normalised peak wins;
// a half-symbol phase estimator then measures the residual inside the
// winning branch.

#include <cstddef>
#include <span>
#include <vector>

#include "ntn/waveform.hpp"

namespace ntn {

/// Threshold on the normalised correlation metric. Over 1000 noise-only 2N
/// captures the largest metric of an 11-branch search was 0.072; at 0 dB SNR
/// with |CFO| = scs/2 on the {0} bank the smallest true peak was 0.127.
inline constexpr double kDefaultDetectionThreshold = 0.10;

struct CfoHypothesisBank {
    std::vector<double> candidates_hz;  // ascending
    double scs_hz = 15e3;

    std::size_t size() const { return candidates_hz.size(); }
};

/// Uniform grid, step scs/2, covering [center - f_max, center + f_max];
/// 2*ceil(f_max/(scs/2)) + 1 candidates, always including `center`.
CfoHypothesisBank build_hypothesis_bank(double f_max_hz, double scs_hz, double center_hz = 0.0);

struct DetectionResult {
    std::size_t timing_offset_samples = 0;
    double branch_cfo_hz = 0.0;
    double fine_cfo_hz = 0.0;
    double total_cfo_hz = 0.0;  // branch + fine
    int nid2 = 0;
    double peak_metric = 0.0;   // |c|^2 / (E_ref * E_window), in [0, 1]
};

/// Full (branch x nid2 x lag) search. Ties go to the lower frequency, then
/// the lower nid2, then the earlier lag. Throws NotDetectedError when the
/// best metric is below `threshold`.
DetectionResult detect_pss(const IqBuffer& buf, const SsbConfig& cfg, const CfoHypothesisBank& bank,
                           double threshold = kDefaultDetectionThreshold);

/// Residual CFO after removing `branch_cfo_hz`, from the phase between the
/// correlations of the two symbol halves with `reference`. Two derotate-and-
/// re-estimate passes remove the bias of the first estimate. Unambiguous
/// range is +/- fs / reference.size() (= +/- scs for a PSS symbol); larger
/// residuals alias.
double estimate_fine_cfo(const IqBuffer& buf, std::span<const cf64> reference, std::size_t timing,
                         double branch_cfo_hz);

/// Same, against the PSS symbol of cfg.nid2.
double estimate_fine_cfo(const IqBuffer& buf, const SsbConfig& cfg, std::size_t timing, double branch_cfo_hz);

/// Sub-sample peak position from a parabola through |c| at the peak and its
/// neighbours. Returns `peak` unchanged at the edges.
double refine_peak(std::span<const cf64> corr, std::size_t peak);

}  // namespace ntn
