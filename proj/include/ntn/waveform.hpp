#pragma once

// Complex-baseband signal primitives: NR PSS synthesis, CFO, time-varying
// delay/Doppler from a pass profile, and AWGN.

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ntn/orbit.hpp"

namespace ntn {

using cf64 = std::complex<double>;

struct IqBuffer {
    std::vector<cf64> samples;
    double sample_rate_hz = 1.0;

    std::size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }
    double duration_s() const { return static_cast<double>(samples.size()) / sample_rate_hz; }

    /// Throws DomainError on non-positive rate or non-finite samples.
    void validate() const;
};

/// A buffer anchored in scenario time: sample n sits at t0_s + n / sample_rate_hz.
struct TimedIq {
    IqBuffer iq;
    double t0_s = 0.0;
};

struct SsbConfig {
    double scs_hz = 15e3;
    std::size_t fft_size = 256;
    double periodicity_ms = 20.0;
    int nid2 = 0;

    double sample_rate_hz() const { return scs_hz * static_cast<double>(fft_size); }
    void validate() const;
};

inline constexpr std::size_t kPssLength = 127;
using PssSequence = std::array<double, kPssLength>;

/// NR PSS: x(i+7) = (x(i+4) + x(i)) mod 2, x(0..6) = 0,1,1,0,1,1,1,
/// d(n) = 1 - 2 x((n + 43 nid2) mod 127).
PssSequence generate_pss(int nid2);

/// Unitary inverse DFT of `values` placed on bins (n - len/2) * bin_stride, i.e.
/// centred on DC. No cyclic prefix. Time-domain energy equals sum(values^2).
IqBuffer modulate_subcarriers(std::span<const double> values, std::size_t fft_size, double sample_rate_hz,
                              std::size_t bin_stride = 1);

/// One PSS OFDM symbol (fft_size samples at scs * fft_size).
IqBuffer modulate_ssb_symbol(const SsbConfig& cfg);

/// Sample n multiplied by exp(j(2 pi cfo n / fs + phase0)).
IqBuffer apply_cfo(const IqBuffer& buf, double cfo_hz, double initial_phase_rad = 0.0);

/// Channel output sampled on the receive grid rx_t0 + n/fs, n < rx_len:
///   y(t) = x(t - D(t)) * exp(j 2 pi \int_{rx_t0}^{t} f_d)
/// with D(t) the profile one-way delay (linear in time), x read from `tx` with
/// linear interpolation (zero outside tx), and f_d = -v_r/c * carrier piecewise
/// linear. carrier_hz = 0 applies the delay only.
IqBuffer propagate(const TimedIq& tx, const PassProfile& profile, double carrier_hz, double rx_t0_s,
                   std::size_t rx_len);

/// propagate() on the buffer's own time grid starting at t0.
IqBuffer apply_dynamic_impairments(const IqBuffer& buf, const PassProfile& profile, double carrier_hz, double t0_s);

/// Complex Gaussian noise, per-sample variance = mean power of buf / 10^(snr/10).
IqBuffer add_awgn(const IqBuffer& buf, double snr_db, std::uint64_t seed);

/// As above with an explicit reference signal power (e.g. the power of the
/// embedded symbol rather than of the whole capture).
IqBuffer add_awgn(const IqBuffer& buf, double snr_db, std::uint64_t seed, double signal_power);

double mean_power(std::span<const cf64> x);
double energy(std::span<const cf64> x);

/// c[l] = sum_n y[lag_begin + l + n] * conj(ref[n]) for l < lag_count.
/// Wide searches go through the FFT (equal to the direct sum to rounding).
std::vector<cf64> cross_correlate(std::span<const cf64> y, std::span<const cf64> ref, std::size_t lag_begin,
                                  std::size_t lag_count);

}  // namespace ntn
