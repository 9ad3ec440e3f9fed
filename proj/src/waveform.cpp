#include "ntn/waveform.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <string>

#include "ntn/constants.hpp"
#include "ntn/errors.hpp"

namespace ntn {

namespace {

// FFTW's planner is not thread-safe; execution is. Plans and their work
// buffers are cached per thread, so only planning takes the lock.
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

class CachedDft {
public:
    CachedDft(std::size_t n, int sign) : n_(n)
    {
        buf_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan_ = fftw_plan_dft_1d(static_cast<int>(n), buf_, buf_, sign, FFTW_ESTIMATE);
    }
    ~CachedDft()
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plan_);
        fftw_free(buf_);
    }
    CachedDft(const CachedDft&) = delete;
    CachedDft& operator=(const CachedDft&) = delete;

    void run(std::vector<cf64>& v)
    {
        std::copy(v.begin(), v.end(), reinterpret_cast<cf64*>(buf_));
        fftw_execute(plan_);
        std::copy_n(reinterpret_cast<const cf64*>(buf_), n_, v.begin());
    }

private:
    std::size_t n_;
    fftw_complex* buf_ = nullptr;
    fftw_plan plan_ = nullptr;
};

void dft_in_place(std::vector<cf64>& v, int sign)
{
    thread_local std::map<std::pair<std::size_t, int>, std::unique_ptr<CachedDft>> cache;
    auto& slot = cache[{v.size(), sign}];
    if (!slot) {
        slot = std::make_unique<CachedDft>(v.size(), sign);
    }
    slot->run(v);
}

void inverse_dft_unitary(std::vector<cf64>& bins)
{
    dft_in_place(bins, FFTW_BACKWARD);
    const double scale = 1.0 / std::sqrt(static_cast<double>(bins.size()));
    for (auto& v : bins) {
        v *= scale;
    }
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Below this many lags the direct sum is cheaper than three transforms.
constexpr std::size_t kFftCorrelationMinLags = 48;

std::vector<cf64> cross_correlate_fft(std::span<const cf64> y, std::span<const cf64> ref, std::size_t lag_begin,
                                      std::size_t lag_count)
{
    const std::size_t m = ref.size();
    const std::size_t span = lag_count + m - 1;
    std::size_t len = 1;
    while (len < span) {
        len <<= 1;
    }
    std::vector<cf64> a(len);
    std::vector<cf64> b(len);
    std::copy_n(y.begin() + static_cast<std::ptrdiff_t>(lag_begin), span, a.begin());
    std::copy(ref.begin(), ref.end(), b.begin());
    dft_in_place(a, FFTW_FORWARD);
    dft_in_place(b, FFTW_FORWARD);
    for (std::size_t k = 0; k < len; ++k) {
        a[k] *= std::conj(b[k]);
    }
    dft_in_place(a, FFTW_BACKWARD);
    const double scale = 1.0 / static_cast<double>(len);
    std::vector<cf64> out(lag_count);
    for (std::size_t l = 0; l < lag_count; ++l) {
        out[l] = a[l] * scale;
    }
    return out;
}

}  // namespace

void IqBuffer::validate() const
{
    if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz)) {
        throw DomainError("sample_rate_hz must be > 0");
    }
    for (const auto& s : samples) {
        if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) {
            throw DomainError("IQ buffer holds non-finite samples");
        }
    }
}

void SsbConfig::validate() const
{
    if (scs_hz != 15e3 && scs_hz != 30e3) {
        throw DomainError("scs_hz must be 15000 or 30000");
    }
    if (fft_size < 256 || !is_power_of_two(fft_size)) {
        throw DomainError("fft_size must be a power of two >= 256");
    }
    if (!(periodicity_ms > 0.0)) {
        throw DomainError("periodicity_ms must be > 0");
    }
    if (nid2 < 0 || nid2 > 2) {
        throw DomainError("nid2 must be 0, 1 or 2");
    }
}

PssSequence generate_pss(int nid2)
{
    if (nid2 < 0 || nid2 > 2) {
        throw DomainError("nid2 must be 0, 1 or 2, got " + std::to_string(nid2));
    }
    std::array<int, kPssLength> x{};
    const std::array<int, 7> init = {0, 1, 1, 0, 1, 1, 1};
    for (std::size_t i = 0; i < init.size(); ++i) {
        x[i] = init[i];
    }
    for (std::size_t i = 0; i + 7 < kPssLength; ++i) {
        x[i + 7] = (x[i + 4] + x[i]) % 2;
    }
    PssSequence d{};
    for (std::size_t n = 0; n < kPssLength; ++n) {
        d[n] = 1.0 - 2.0 * x[(n + 43 * static_cast<std::size_t>(nid2)) % kPssLength];
    }
    return d;
}

IqBuffer modulate_subcarriers(std::span<const double> values, std::size_t fft_size, double sample_rate_hz,
                              std::size_t bin_stride)
{
    if (values.empty() || bin_stride == 0) {
        throw DomainError("modulate_subcarriers: empty input or zero stride");
    }
    const auto half = static_cast<long>(values.size() / 2);
    const auto n = static_cast<long>(fft_size);
    const long span_bins = (static_cast<long>(values.size()) - 1) * static_cast<long>(bin_stride) + 1;
    if (span_bins > n) {
        throw DomainError("modulate_subcarriers: subcarriers do not fit in the FFT");
    }

    std::vector<cf64> bins(fft_size, cf64{});
    for (std::size_t i = 0; i < values.size(); ++i) {
        const long k = (static_cast<long>(i) - half) * static_cast<long>(bin_stride);
        bins[static_cast<std::size_t>(((k % n) + n) % n)] = values[i];
    }
    inverse_dft_unitary(bins);
    return {std::move(bins), sample_rate_hz};
}

IqBuffer modulate_ssb_symbol(const SsbConfig& cfg)
{
    cfg.validate();
    const PssSequence d = generate_pss(cfg.nid2);
    return modulate_subcarriers(d, cfg.fft_size, cfg.sample_rate_hz());
}

IqBuffer apply_cfo(const IqBuffer& buf, double cfo_hz, double initial_phase_rad)
{
    IqBuffer out{std::vector<cf64>(buf.size()), buf.sample_rate_hz};
    const double w = kTwoPi * cfo_hz / buf.sample_rate_hz;
    for (std::size_t n = 0; n < buf.size(); ++n) {
        out.samples[n] = buf.samples[n] * std::polar(1.0, w * static_cast<double>(n) + initial_phase_rad);
    }
    return out;
}

IqBuffer propagate(const TimedIq& tx, const PassProfile& profile, double carrier_hz, double rx_t0_s,
                   std::size_t rx_len)
{
    const double fs = tx.iq.sample_rate_hz;
    if (!(fs > 0.0)) {
        throw DomainError("propagate: sample rate must be > 0");
    }
    IqBuffer out{std::vector<cf64>(rx_len), fs};
    if (rx_len == 0) {
        return out;
    }
    const double rx_t1 = rx_t0_s + static_cast<double>(rx_len - 1) / fs;
    if (!profile.covers(rx_t0_s, rx_t1)) {
        throw DomainError("propagate: receive window [" + std::to_string(rx_t0_s) + ", " + std::to_string(rx_t1) +
                          "] s extends past the pass profile");
    }

    const auto& ts = profile.t_s;
    const auto& ds = profile.delay_s;
    const auto& vs = profile.radial_velocity_ms;
    const double doppler_per_ms = -carrier_hz / kSpeedOfLight;  // Hz per (m/s)
    const auto& x = tx.iq.samples;
    const auto x_len = static_cast<long>(x.size());
    const double base = (rx_t0_s - tx.t0_s) * fs;

    std::size_t j = profile.segment_of(rx_t0_s);
    auto v_at = [&](std::size_t seg, double t) {
        const double w = (t - ts[seg]) / (ts[seg + 1] - ts[seg]);
        return vs[seg] + w * (vs[seg + 1] - vs[seg]);
    };

    double t_prev = rx_t0_s;
    double v_prev = v_at(j, t_prev);
    double velocity_integral = 0.0;  // \int_{rx_t0}^{t} v, metres

    for (std::size_t n = 0; n < rx_len; ++n) {
        const double t = rx_t0_s + static_cast<double>(n) / fs;
        // Walk across knots, integrating the piecewise-linear velocity exactly.
        while (j + 2 < ts.size() && t > ts[j + 1]) {
            const double v_knot = vs[j + 1];
            velocity_integral += 0.5 * (v_prev + v_knot) * (ts[j + 1] - t_prev);
            t_prev = ts[j + 1];
            v_prev = v_knot;
            ++j;
        }
        const double v_now = v_at(j, t);
        velocity_integral += 0.5 * (v_prev + v_now) * (t - t_prev);
        t_prev = t;
        v_prev = v_now;

        const double w = (t - ts[j]) / (ts[j + 1] - ts[j]);
        const double delay = ds[j] + w * (ds[j + 1] - ds[j]);

        const double pos = base + static_cast<double>(n) - delay * fs;
        const double fl = std::floor(pos);
        const auto i = static_cast<long>(fl);
        const double mu = pos - fl;
        cf64 s{};
        if (i >= 0 && i < x_len) {
            s += (1.0 - mu) * x[static_cast<std::size_t>(i)];
        }
        if (i + 1 >= 0 && i + 1 < x_len && mu != 0.0) {
            s += mu * x[static_cast<std::size_t>(i + 1)];
        }
        if (carrier_hz != 0.0) {
            s *= std::polar(1.0, kTwoPi * doppler_per_ms * velocity_integral);
        }
        out.samples[n] = s;
    }
    return out;
}

IqBuffer apply_dynamic_impairments(const IqBuffer& buf, const PassProfile& profile, double carrier_hz, double t0_s)
{
    return propagate({buf, t0_s}, profile, carrier_hz, t0_s, buf.size());
}

double energy(std::span<const cf64> x)
{
    double e = 0.0;
    for (const auto& v : x) {
        e += std::norm(v);
    }
    return e;
}

double mean_power(std::span<const cf64> x) { return x.empty() ? 0.0 : energy(x) / static_cast<double>(x.size()); }

IqBuffer add_awgn(const IqBuffer& buf, double snr_db, std::uint64_t seed)
{
    if (buf.empty()) {
        throw DomainError("add_awgn: empty buffer");
    }
    return add_awgn(buf, snr_db, seed, mean_power(buf.samples));
}

IqBuffer add_awgn(const IqBuffer& buf, double snr_db, std::uint64_t seed, double signal_power)
{
    if (buf.empty()) {
        throw DomainError("add_awgn: empty buffer");
    }
    if (!(signal_power > 0.0)) {
        throw DomainError("add_awgn: zero-power signal, SNR undefined");
    }
    const double variance = signal_power / std::pow(10.0, snr_db / 10.0);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5 * variance));

    IqBuffer out = buf;
    for (auto& s : out.samples) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        s += cf64{re, im};
    }
    return out;
}

std::vector<cf64> cross_correlate(std::span<const cf64> y, std::span<const cf64> ref, std::size_t lag_begin,
                                  std::size_t lag_count)
{
    if (lag_begin + lag_count + ref.size() > y.size() + 1 && lag_count > 0) {
        throw DomainError("cross_correlate: lag range runs past the end of the buffer");
    }
    if (lag_count >= kFftCorrelationMinLags && !ref.empty()) {
        return cross_correlate_fft(y, ref, lag_begin, lag_count);
    }
    std::vector<cf64> out(lag_count);
    const std::size_t m = ref.size();
    for (std::size_t l = 0; l < lag_count; ++l) {
        const cf64* a = y.data() + lag_begin + l;
        double re = 0.0;
        double im = 0.0;
        for (std::size_t n = 0; n < m; ++n) {
            const double ar = a[n].real();
            const double ai = a[n].imag();
            const double rr = ref[n].real();
            const double ri = ref[n].imag();
            re += ar * rr + ai * ri;
            im += ai * rr - ar * ri;
        }
        out[l] = {re, im};
    }
    return out;
}

}  // namespace ntn
