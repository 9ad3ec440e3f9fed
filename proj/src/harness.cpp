#include "ntn/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "ntn/constants.hpp"
#include "ntn/errors.hpp"
#include "ntn/payload.hpp"
#include "ntn/ue_sync.hpp"

namespace ntn {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Capture margins (samples each side of the expected SSB arrival).
constexpr std::size_t kAcquisitionMargin = 32;
constexpr std::size_t kTrackingMargin = 8;
// Extra UL search lags beyond the drift bound.
constexpr std::size_t kUplinkSlack = 16;
// Profile extends this far past the visibility window on both sides.
constexpr double kProfilePad_s = 2.0;

double ceil_ms(double seconds) { return std::ceil(seconds * 1e3 - 1e-9) / 1e3; }

// Arrival time t of a signal that left the gNB at T: t = T + D(t).
double arrival_time(const PassProfile& profile, double t_tx)
{
    double t = t_tx + profile.delay_at(t_tx);
    for (int i = 0; i < 4; ++i) {
        t = t_tx + profile.delay_at(t);
    }
    return t;
}

std::size_t argmax_abs(const std::vector<cf64>& c)
{
    std::size_t best = 0;
    double best_v = -1.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double v = std::norm(c[i]);
        if (v > best_v) {
            best_v = v;
            best = i;
        }
    }
    return best;
}

}  // namespace

bool run_detection_trial(const SsbConfig& ssb, const TrialSpec& trial, const CfoHypothesisBank& bank,
                         double threshold)
{
    const std::size_t n = ssb.fft_size;
    std::mt19937_64 rng(trial.seed);
    const auto offset = std::uniform_int_distribution<std::size_t>(0, n)(rng);
    const double phase = std::uniform_real_distribution<double>(0.0, kTwoPi)(rng);

    const IqBuffer symbol = modulate_ssb_symbol(ssb);
    IqBuffer capture{std::vector<cf64>(2 * n), symbol.sample_rate_hz};
    std::copy(symbol.samples.begin(), symbol.samples.end(),
              capture.samples.begin() + static_cast<std::ptrdiff_t>(offset));
    capture = apply_cfo(capture, trial.cfo_hz, phase);
    capture = add_awgn(capture, trial.snr_db, mix_seed(trial.seed, 1), mean_power(symbol.samples));

    try {
        const DetectionResult det = detect_pss(capture, ssb, bank, threshold);
        const auto timing = static_cast<long>(det.timing_offset_samples);
        return det.nid2 == ssb.nid2 && std::abs(timing - static_cast<long>(offset)) <= 1;
    } catch (const NotDetectedError&) {
        return false;
    }
}

std::vector<AcquisitionRow> run_acquisition_sweep(const ScenarioConfig& cfg, const std::vector<double>& cfo_grid_hz,
                                                  const std::vector<double>& snr_grid_db, std::size_t trials_per_point)
{
    if (trials_per_point < 1) {
        throw DomainError("trials_per_point must be >= 1");
    }
    cfg.ssb.validate();
    const CfoHypothesisBank full = build_hypothesis_bank(cfg.bank_range_hz(), cfg.ssb.scs_hz);
    const CfoHypothesisBank zero = build_hypothesis_bank(0.0, cfg.ssb.scs_hz);

    std::vector<AcquisitionRow> rows;
    for (double cfo : cfo_grid_hz) {
        for (double snr : snr_grid_db) {
            std::size_t hits_full = 0;
            std::size_t hits_zero = 0;
            for (std::size_t i = 0; i < trials_per_point; ++i) {
                const TrialSpec t{cfo, snr, cfg.seed_for(i)};
                hits_full += run_detection_trial(cfg.ssb, t, full, cfg.detection_threshold) ? 1 : 0;
                hits_zero += run_detection_trial(cfg.ssb, t, zero, cfg.detection_threshold) ? 1 : 0;
            }
            const auto n = static_cast<double>(trials_per_point);
            rows.push_back({cfo, snr, trials_per_point, static_cast<double>(hits_full) / n,
                            static_cast<double>(hits_zero) / n});
        }
    }
    return rows;
}

IqBuffer uplink_reference(const UplinkConfig& ul, int nid2, double sample_rate_hz)
{
    const PssSequence d = generate_pss(nid2);
    const IqBuffer body = modulate_subcarriers(d, ul.fft_size, sample_rate_hz, 2);
    IqBuffer out{std::vector<cf64>(ul.cp_samples + ul.fft_size), sample_rate_hz};
    std::copy(body.samples.end() - static_cast<std::ptrdiff_t>(ul.cp_samples), body.samples.end(),
              out.samples.begin());
    std::copy(body.samples.begin(), body.samples.end(), out.samples.begin() + static_cast<std::ptrdiff_t>(ul.cp_samples));
    return out;
}

double auto_k_offset_s(const ScenarioConfig& cfg)
{
    const GroundStation gs = GroundStation::on_surface(cfg.orbit);
    const TimeWindow w = visibility_window(cfg.orbit, gs, cfg.min_elevation_rad);
    // Range is largest at the window edges.
    const double r = std::max(slant_range_and_elevation(cfg.orbit, gs, w.start_s).range_m,
                              slant_range_and_elevation(cfg.orbit, gs, w.end_s).range_m);
    return ceil_ms(2.0 * r / kSpeedOfLight);
}

EndToEndTrace run_end_to_end_detailed(const ScenarioConfig& cfg)
{
    cfg.validate();
    const GroundStation gs = GroundStation::on_surface(cfg.orbit);
    const TimeWindow window = visibility_window(cfg.orbit, gs, cfg.min_elevation_rad);
    const PassProfile profile = generate_pass_profile(cfg.orbit, gs, window.start_s - kProfilePad_s,
                                                      window.end_s + kProfilePad_s, cfg.profile_dt_s);

    const double t_begin = window.start_s;
    const double t_stop = cfg.duration_s ? std::min(window.end_s, t_begin + *cfg.duration_s) : window.end_s;
    const double period_s = cfg.ssb.periodicity_ms * 1e-3;
    const auto sib19_every = static_cast<std::size_t>(std::llround(cfg.sib19.cadence_ms / cfg.ssb.periodicity_ms));

    const double k_offset_true = cfg.sib19.k_offset_ms ? *cfg.sib19.k_offset_ms * 1e-3 : auto_k_offset_s(cfg);
    const double k_offset_sib = k_offset_true + cfg.sib19.k_offset_error_ms * 1e-3;
    if (!(k_offset_sib > 0.0)) {
        throw DomainError("k_offset plus injected error must stay > 0");
    }

    // Downlink (gNB -> UE) and uplink carriers at the satellite.
    const double f_dl = cfg.plan.ka_up_center_hz;
    const double f_ul = cfg.plan.ka_down_center_hz;
    const double lo = cfg.ue.lo_offset_hz;
    const double amplitude = std::pow(10.0, compose_gain_chain(cfg.chain) / 20.0);

    // gNB SSB burst: the symbol with a quarter symbol of silence either side.
    const std::size_t n_dl = cfg.ssb.fft_size;
    const double fs_dl = cfg.ssb.sample_rate_hz();
    const std::size_t tx_pad = n_dl / 4;
    const IqBuffer ssb_symbol = modulate_ssb_symbol(cfg.ssb);
    IqBuffer ssb_burst{std::vector<cf64>(n_dl + 2 * tx_pad), fs_dl};
    std::copy(ssb_symbol.samples.begin(), ssb_symbol.samples.end(),
              ssb_burst.samples.begin() + static_cast<std::ptrdiff_t>(tx_pad));
    const double dl_power = mean_power(ssb_symbol.samples) * amplitude * amplitude;

    const double fs_ul = cfg.plan.sample_rate_hz;
    const std::size_t n_ul = cfg.uplink.fft_size;
    const std::size_t cp = cfg.uplink.cp_samples;
    const IqBuffer ul_ref = uplink_reference(cfg.uplink, cfg.ssb.nid2, fs_ul);
    const std::span<const cf64> ul_body = std::span(ul_ref.samples).subspan(cp);
    const double ul_power = mean_power(ul_ref.samples) * amplitude * amplitude;

    EndToEndTrace trace;
    trace.k_offset_s = k_offset_true;
    trace.ul_sample_rate_hz = fs_ul;
    trace.dl_carrier_hz = f_dl;
    trace.max_round_trip_rate = 2.0 * max_abs_delay_rate(profile);
    trace.drift_bound_samples = trace.max_round_trip_rate * cfg.sib19.cadence_ms * 1e-3 * fs_ul;

    const double injected_timing_s = std::abs(cfg.sib19.k_offset_error_ms) * 1e-3 + std::abs(cfg.ue.delay_error_us) * 1e-6;
    const auto ul_margin = static_cast<std::size_t>(std::ceil(trace.drift_bound_samples + injected_timing_s * fs_ul)) +
                           kUplinkSlack;
    const std::size_t ul_len = 2 * ul_margin + cp + n_ul;

    const CfoHypothesisBank acquisition_bank =
        build_hypothesis_bank(cfg.orbit.orbital_speed_ms() / kSpeedOfLight * f_dl + std::abs(lo) + cfg.ssb.scs_hz,
                              cfg.ssb.scs_hz);
    const std::uint64_t base_seed = cfg.seed_for(0);

    CompensationState state;
    bool locked = false;
    bool ever_detected = false;
    double last_total_cfo = 0.0;

    for (std::size_t k = 0;; ++k) {
        const double t_frame = t_begin + static_cast<double>(k) * period_s;
        if (t_frame >= t_stop) {
            break;
        }
        MetricsRow row;
        row.t_s = t_frame;
        row.branch_cfo_hz = kNan;
        row.total_cfo_hz = kNan;
        row.residual_ul_cfo_hz = kNan;
        row.ul_timing_error_samples = kNan;
        row.buffer_delay_s = kNan;

        // Downlink: capture aligned so the SSB starts at sample `pre`.
        const double t_arr = arrival_time(profile, t_frame);
        const std::size_t pre = locked ? kTrackingMargin : kAcquisitionMargin;
        const double cap_t0 = t_arr - static_cast<double>(pre) / fs_dl;
        const std::size_t cap_len = n_dl + 2 * pre;
        const TimedIq dl_tx{ssb_burst, t_frame - static_cast<double>(tx_pad) / fs_dl};

        IqBuffer capture = relay(dl_tx, cfg.payload_mode, cfg.plan, profile, f_dl, cap_t0, cap_len, cfg.chain, cfg.ssb);
        capture = apply_cfo(capture, -lo);
        if (cfg.snr_db) {
            capture = add_awgn(capture, *cfg.snr_db, mix_seed(base_seed, 2 * k), dl_power);
        }

        if (k == 0) {
            trace.first_dl_capture = capture;
        }

        const double t_dl_mid = t_arr + 0.5 * static_cast<double>(n_dl - 1) / fs_dl;
        row.true_cfo_hz = profile.doppler_at(t_dl_mid, f_dl) - lo;

        bool detected = false;
        try {
            const CfoHypothesisBank bank =
                locked ? build_hypothesis_bank(0.5 * cfg.ssb.scs_hz, cfg.ssb.scs_hz, last_total_cfo) : acquisition_bank;
            DetectionResult det = detect_pss(capture, cfg.ssb, bank, cfg.detection_threshold);

            // Refine against the reference as the channel delays it (known ephemeris),
            // which removes the bias that delay drift puts on the half-symbol estimate.
            SsbConfig found = cfg.ssb;
            found.nid2 = det.nid2;
            IqBuffer burst = ssb_burst;
            if (det.nid2 != cfg.ssb.nid2) {
                const IqBuffer sym = modulate_ssb_symbol(found);
                std::copy(sym.samples.begin(), sym.samples.end(), burst.samples.begin() + static_cast<std::ptrdiff_t>(tx_pad));
            }
            const IqBuffer matched = propagate({burst, dl_tx.t0_s}, profile, 0.0, cap_t0, cap_len);
            det.fine_cfo_hz = estimate_fine_cfo(capture, std::span(matched.samples).subspan(det.timing_offset_samples, n_dl),
                                                det.timing_offset_samples, det.branch_cfo_hz);
            det.total_cfo_hz = det.branch_cfo_hz + det.fine_cfo_hz;

            state = on_ssb(state, det, t_arr);
            row.detection = 1;
            row.branch_cfo_hz = det.branch_cfo_hz;
            row.total_cfo_hz = det.total_cfo_hz;
            last_total_cfo = det.total_cfo_hz;
            locked = true;
            detected = true;
            ever_detected = true;
        } catch (const NotDetectedError&) {
            locked = false;
        }

        // SIB19 is only decodable on a frame the UE is synchronised to.
        if (detected && k % sib19_every == 0) {
            const double t_ul_mid = t_frame + k_offset_true + (static_cast<double>(cp) + 0.5 * static_cast<double>(n_ul)) / fs_ul;
            Sib19 sib;
            sib.k_offset_s = k_offset_sib;
            sib.dl_doppler_hz = profile.doppler_at(t_dl_mid, f_dl) + cfg.sib19.dl_doppler_error_hz;
            // Receiver-referenced: the shift of a signal that must arrive at exactly f_ul,
            // a f_ul / (1 + a) with a = -v/c. The UE's pre-shift rides on the carrier and
            // is itself Doppler-scaled, so -v/c * f_ul would leave v/c * f_UL behind.
            const double a = -profile.radial_velocity_at(t_ul_mid) / kSpeedOfLight;
            sib.ul_doppler_hz = a * f_ul / (1.0 + a) + cfg.sib19.ul_doppler_error_hz;
            sib.issued_at_s = t_frame;
            // d along the actual signal path: DL leg of this frame plus the UL leg
            // arriving k_offset after it.
            const double d = (t_arr - t_frame) + profile.delay_at(t_frame + k_offset_sib) + cfg.ue.delay_error_us * 1e-6;
            state = on_sib19(state, sib, d, t_arr);
            trace.sib19_events.push_back({trace.metrics.rows.size(), state.k_offset, state.buffer_delay,
                                          to_picoseconds(d)});
        }

        if (state.last_sib19_at_s) {
            row.buffer_delay_s = state.buffer_delay_s();
        }

        if (state.ready()) {
            TimedIq ul_tx = precompensate_uplink(TimedIq{ul_ref, t_arr}, state);
            ul_tx.iq = apply_cfo(ul_tx.iq, lo);

            const double rx_t0 = t_frame + k_offset_true - static_cast<double>(ul_margin) / fs_ul;
            IqBuffer rx = relay(ul_tx, PayloadMode::Transparent, cfg.plan, profile, f_ul, rx_t0, ul_len, cfg.chain);
            if (cfg.snr_db) {
                rx = add_awgn(rx, *cfg.snr_db, mix_seed(base_seed, 2 * k + 1), ul_power);
            }
            const std::vector<cf64> corr = cross_correlate(rx.samples, ul_body, cp, 2 * ul_margin + 1);
            const std::size_t peak = argmax_abs(corr);
            row.ul_timing_error_samples = refine_peak(corr, peak) - static_cast<double>(ul_margin);
            row.residual_ul_cfo_hz = estimate_fine_cfo(rx, ul_body, cp + peak, 0.0);
        }

        trace.metrics.rows.push_back(row);
    }

    if (!ever_detected) {
        throw ScenarioFailure("downlink never acquired during the scenario", std::move(trace.metrics));
    }
    return trace;
}

Metrics run_end_to_end(const ScenarioConfig& cfg) { return run_end_to_end_detailed(cfg).metrics; }

}  // namespace ntn
