// ntn-sim: command-line front end for the LEO link simulator.
//
//   ntn-sim pass    --config c.yaml [--out p.csv] [--format csv|json] [--dt 1]
//   ntn-sim plan    --config c.yaml [--out v.json] [--format csv|json] [--no-range-check]
//   ntn-sim acquire --config c.yaml [--out a.csv] [--format csv|json] [--seed N] [--trials N]
//   ntn-sim e2e     --config c.yaml [--out m.csv] [--format csv|json] [--seed N] [--dump-iq iq.cf32]
//
// Without --out, results go to stdout. Exit status: 0 ok, 1 plan violations
// or scenario failure, 2 bad input.

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "ntn/errors.hpp"
#include "ntn/harness.hpp"
#include "ntn/iq_dump.hpp"
#include "ntn/metrics.hpp"
#include "ntn/scenario.hpp"

namespace {

struct CommonOptions {
    std::string config;
    std::string out;
    std::string format = "csv";
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool with_seed)
{
    cmd->add_option("--config", o.config, "Scenario YAML file (defaults apply when omitted)");
    cmd->add_option("--out", o.out, "Output file (stdout when omitted)");
    cmd->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    if (with_seed) {
        cmd->add_option("--seed", o.seed, "Override the scenario seeds with this single seed");
    }
}

ntn::ScenarioConfig load(const CommonOptions& o)
{
    ntn::ScenarioConfig cfg = o.config.empty() ? ntn::parse_scenario("") : ntn::load_scenario(o.config);
    if (o.seed) {
        cfg.seeds = {*o.seed};
    }
    return cfg;
}

void emit(const CommonOptions& o, const std::string& text)
{
    if (o.out.empty()) {
        std::cout << text;
    } else {
        ntn::write_file(o.out, text);
    }
}

int run_pass(const CommonOptions& o, std::optional<double> dt)
{
    const ntn::ScenarioConfig cfg = load(o);
    const ntn::GroundStation gs = ntn::GroundStation::on_surface(cfg.orbit);
    const ntn::TimeWindow w = ntn::visibility_window(cfg.orbit, gs, cfg.min_elevation_rad);
    const double end = cfg.duration_s ? std::min(w.end_s, w.start_s + *cfg.duration_s) : w.end_s;
    const ntn::PassProfile p = ntn::generate_pass_profile(cfg.orbit, gs, w.start_s, end, dt.value_or(cfg.profile_dt_s));
    std::ostringstream s;
    if (ntn::parse_export_format(o.format) == ntn::ExportFormat::Csv) {
        ntn::write_pass_profile_csv(s, p);
    } else {
        ntn::write_pass_profile_json(s, p);
    }
    emit(o, s.str());
    return 0;
}

int run_plan(const CommonOptions& o, bool range_check)
{
    ntn::FrequencyPlan plan;
    if (!o.config.empty()) {
        // Unchecked load: a bad plan is what this command reports, not an input error.
        plan = ntn::load_scenario(o.config, false).plan;
    }
    const auto violations = ntn::validate_plan(plan, range_check);
    std::ostringstream s;
    if (ntn::parse_export_format(o.format) == ntn::ExportFormat::Csv) {
        s << "code,field,limit,actual\n";
        for (const auto& v : violations) {
            s << v.code << ',' << v.field << ',' << ntn::format_double(v.limit) << ','
              << ntn::format_double(v.actual) << '\n';
        }
    } else {
        nlohmann::json j = {{"valid", violations.empty()},
                            {"occupancy_hz", plan.occupancy_hz()},
                            {"sample_rate_hz", plan.sample_rate_hz},
                            {"dl_offset_hz", plan.dl_offset_hz()},
                            {"ul_offset_hz", plan.ul_offset_hz()},
                            {"violations", nlohmann::json::array()}};
        for (const auto& v : violations) {
            j["violations"].push_back({{"code", v.code}, {"field", v.field}, {"limit", v.limit}, {"actual", v.actual}});
        }
        s << j.dump(1) << '\n';
    }
    emit(o, s.str());
    return violations.empty() ? 0 : 1;
}

int run_acquire(const CommonOptions& o, std::optional<std::size_t> trials)
{
    const ntn::ScenarioConfig cfg = load(o);
    const auto rows = ntn::run_acquisition_sweep(cfg, cfg.acquire.cfo_grid_hz, cfg.acquire.snr_grid_db,
                                                 trials.value_or(cfg.acquire.trials));
    std::ostringstream s;
    if (ntn::parse_export_format(o.format) == ntn::ExportFormat::Csv) {
        s << "cfo_hz,snr_db,trials,p_detect_full_bank,p_detect_zero_bank\n";
        for (const auto& r : rows) {
            s << ntn::format_double(r.cfo_hz) << ',' << ntn::format_double(r.snr_db) << ',' << r.trials << ','
              << ntn::format_double(r.p_detect_full_bank) << ',' << ntn::format_double(r.p_detect_zero_bank) << '\n';
        }
    } else {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& r : rows) {
            j.push_back({{"cfo_hz", r.cfo_hz},
                         {"snr_db", r.snr_db},
                         {"trials", r.trials},
                         {"p_detect_full_bank", r.p_detect_full_bank},
                         {"p_detect_zero_bank", r.p_detect_zero_bank}});
        }
        s << j.dump(1) << '\n';
    }
    emit(o, s.str());
    return 0;
}

int run_e2e(const CommonOptions& o, const std::string& dump_iq)
{
    const ntn::ScenarioConfig cfg = load(o);
    const auto format = ntn::parse_export_format(o.format);
    try {
        const ntn::EndToEndTrace trace = ntn::run_end_to_end_detailed(cfg);
        if (o.out.empty()) {
            format == ntn::ExportFormat::Csv ? ntn::write_metrics_csv(std::cout, trace.metrics)
                                             : ntn::write_metrics_json(std::cout, trace.metrics);
        } else {
            ntn::export_metrics(trace.metrics, format, o.out);
        }
        if (!dump_iq.empty()) {
            ntn::write_iq_dump(dump_iq, trace.first_dl_capture, trace.dl_carrier_hz, cfg.id);
        }
        return 0;
    } catch (const ntn::ScenarioFailure& e) {
        if (!o.out.empty()) {
            ntn::export_metrics(e.partial(), format, o.out);
        }
        std::cerr << "ntn-sim: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"LEO non-terrestrial 5G link simulator"};
    app.require_subcommand(1);

    CommonOptions pass_opts;
    std::optional<double> pass_dt;
    auto* pass = app.add_subcommand("pass", "Write the pass profile over the visibility window");
    add_common(pass, pass_opts, false);
    pass->add_option("--dt", pass_dt, "Profile time step in seconds (default: profile_dt_s)");

    CommonOptions plan_opts;
    bool no_range_check = false;
    auto* plan = app.add_subcommand("plan", "Validate the frequency plan");
    add_common(plan, plan_opts, false);
    plan->add_flag("--no-range-check", no_range_check, "Skip the BUC/LNB frequency range checks");

    CommonOptions acq_opts;
    std::optional<std::size_t> acq_trials;
    auto* acquire = app.add_subcommand("acquire", "Detection probability sweep over CFO and SNR");
    add_common(acquire, acq_opts, true);
    acquire->add_option("--trials", acq_trials, "Trials per grid point (default: acquire.trials)");

    CommonOptions e2e_opts;
    std::string dump_iq;
    auto* e2e = app.add_subcommand("e2e", "End-to-end pass simulation with per-SSB metrics");
    add_common(e2e, e2e_opts, true);
    e2e->add_option("--dump-iq", dump_iq, "Write the first UE downlink capture as cf32 (+ .json sidecar)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*pass) {
            return run_pass(pass_opts, pass_dt);
        }
        if (*plan) {
            return run_plan(plan_opts, !no_range_check);
        }
        if (*acquire) {
            return run_acquire(acq_opts, acq_trials);
        }
        return run_e2e(e2e_opts, dump_iq);
    } catch (const ntn::DomainError& e) {
        std::cerr << "ntn-sim: " << e.what() << '\n';
        return 2;
    } catch (const ntn::IoError& e) {
        std::cerr << "ntn-sim: " << e.what() << '\n';
        return 2;
    }
}
