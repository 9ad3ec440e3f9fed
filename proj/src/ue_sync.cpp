#include "ntn/ue_sync.hpp"

#include <array>
#include <cmath>
#include <string>

#include "ntn/constants.hpp"
#include "ntn/errors.hpp"

namespace ntn {

CfoHypothesisBank build_hypothesis_bank(double f_max_hz, double scs_hz, double center_hz)
{
    if (!(f_max_hz >= 0.0) || !(scs_hz > 0.0)) {
        throw DomainError("build_hypothesis_bank: need f_max >= 0 and scs > 0");
    }
    const double step = 0.5 * scs_hz;
    const auto half = static_cast<long>(std::ceil(f_max_hz / step));
    CfoHypothesisBank bank;
    bank.scs_hz = scs_hz;
    bank.candidates_hz.reserve(static_cast<std::size_t>(2 * half + 1));
    for (long i = -half; i <= half; ++i) {
        bank.candidates_hz.push_back(center_hz + static_cast<double>(i) * step);
    }
    return bank;
}

DetectionResult detect_pss(const IqBuffer& buf, const SsbConfig& cfg, const CfoHypothesisBank& bank,
                           double threshold)
{
    cfg.validate();
    const std::size_t n = cfg.fft_size;
    const double fs = cfg.sample_rate_hz();
    if (buf.size() <= n) {
        throw DomainError("detect_pss: capture must be longer than one PSS symbol");
    }
    if (std::abs(buf.sample_rate_hz - fs) > 1e-6 * fs) {
        throw DomainError("detect_pss: capture sample rate " + std::to_string(buf.sample_rate_hz) +
                          " differs from scs * fft_size = " + std::to_string(fs));
    }
    if (bank.candidates_hz.empty()) {
        throw DomainError("detect_pss: empty hypothesis bank");
    }

    std::array<IqBuffer, 3> refs;
    for (int id = 0; id < 3; ++id) {
        SsbConfig c = cfg;
        c.nid2 = id;
        refs[static_cast<std::size_t>(id)] = modulate_ssb_symbol(c);
    }
    const double ref_energy = energy(refs[0].samples);

    // Sliding window energy for every lag.
    const std::size_t lags = buf.size() - n + 1;
    std::vector<double> win_energy(lags);
    {
        double e = energy(std::span(buf.samples).first(n));
        win_energy[0] = e;
        for (std::size_t l = 1; l < lags; ++l) {
            e += std::norm(buf.samples[l + n - 1]) - std::norm(buf.samples[l - 1]);
            win_energy[l] = e;
        }
    }

    DetectionResult best;
    bool have = false;
    for (double f : bank.candidates_hz) {
        for (int id = 0; id < 3; ++id) {
            const IqBuffer shifted = apply_cfo(refs[static_cast<std::size_t>(id)], f);
            const std::vector<cf64> c = cross_correlate(buf.samples, shifted.samples, 0, lags);
            for (std::size_t l = 0; l < lags; ++l) {
                const double denom = ref_energy * win_energy[l];
                const double metric = denom > 0.0 ? std::norm(c[l]) / denom : 0.0;
                if (!have || metric > best.peak_metric) {
                    best.peak_metric = metric;
                    best.timing_offset_samples = l;
                    best.branch_cfo_hz = f;
                    best.nid2 = id;
                    have = true;
                }
            }
        }
    }
    // Rounding in the running energy sum can push a perfect match a hair above 1.
    best.peak_metric = std::min(best.peak_metric, 1.0);

    if (best.peak_metric < threshold) {
        throw NotDetectedError("no PSS peak above threshold " + std::to_string(threshold) + " (best " +
                               std::to_string(best.peak_metric) + ")");
    }

    best.fine_cfo_hz = estimate_fine_cfo(buf, refs[static_cast<std::size_t>(best.nid2)].samples,
                                         best.timing_offset_samples, best.branch_cfo_hz);
    best.total_cfo_hz = best.branch_cfo_hz + best.fine_cfo_hz;
    return best;
}

double estimate_fine_cfo(const IqBuffer& buf, std::span<const cf64> reference, std::size_t timing,
                         double branch_cfo_hz)
{
    const std::size_t n = reference.size();
    if (n < 2 || n % 2 != 0) {
        throw DomainError("estimate_fine_cfo: reference length must be even and >= 2");
    }
    if (timing + n > buf.size()) {
        throw DomainError("estimate_fine_cfo: symbol at timing " + std::to_string(timing) +
                          " is not fully inside the buffer");
    }
    const std::size_t half = n / 2;
    const double fs = buf.sample_rate_hz;

    // z = received symbol with the branch hypothesis removed, matched to the reference.
    std::vector<cf64> z(n);
    const double w0 = -kTwoPi * branch_cfo_hz / fs;
    for (std::size_t i = 0; i < n; ++i) {
        z[i] = buf.samples[timing + i] * std::polar(1.0, w0 * static_cast<double>(i)) * std::conj(reference[i]);
    }

    auto half_phase_estimate = [&](double derotate_hz) {
        const double w = -kTwoPi * derotate_hz / fs;
        cf64 c1{};
        cf64 c2{};
        for (std::size_t i = 0; i < half; ++i) {
            c1 += z[i] * std::polar(1.0, w * static_cast<double>(i));
            c2 += z[i + half] * std::polar(1.0, w * static_cast<double>(i + half));
        }
        return std::arg(std::conj(c1) * c2) * fs / (kTwoPi * static_cast<double>(half));
    };

    double f = half_phase_estimate(0.0);
    for (int pass = 0; pass < 2; ++pass) {
        f += half_phase_estimate(f);
    }
    return f;
}

double estimate_fine_cfo(const IqBuffer& buf, const SsbConfig& cfg, std::size_t timing, double branch_cfo_hz)
{
    const IqBuffer ref = modulate_ssb_symbol(cfg);
    return estimate_fine_cfo(buf, ref.samples, timing, branch_cfo_hz);
}

double refine_peak(std::span<const cf64> corr, std::size_t peak)
{
    if (peak == 0 || peak + 1 >= corr.size()) {
        return static_cast<double>(peak);
    }
    const double a = std::abs(corr[peak - 1]);
    const double b = std::abs(corr[peak]);
    const double c = std::abs(corr[peak + 1]);
    const double denom = a - 2.0 * b + c;
    if (denom >= 0.0) {
        return static_cast<double>(peak);
    }
    return static_cast<double>(peak) + 0.5 * (a - c) / denom;
}

}  // namespace ntn
