#include "ntn/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "ntn/errors.hpp"

namespace ntn {

namespace {

void reject_unknown(const YAML::Node& node, const std::string& where, const std::set<std::string>& allowed)
{
    if (!node.IsMap()) {
        throw DomainError("config: '" + where + "' must be a mapping");
    }
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        if (!allowed.contains(key)) {
            throw DomainError("config: unknown key '" + key + "' in " + where);
        }
    }
}

template <typename T>
void read(const YAML::Node& node, const char* key, T& out, const std::string& where)
{
    if (const YAML::Node v = node[key]) {
        try {
            out = v.as<T>();
        } catch (const YAML::Exception&) {
            throw DomainError("config: bad value for " + where + "." + key);
        }
    }
}

template <typename T>
void read(const YAML::Node& node, const char* key, std::optional<T>& out, const std::string& where)
{
    if (node[key]) {
        T v{};
        read(node, key, v, where);
        out = v;
    }
}

void read_angle(const YAML::Node& node, const std::string& stem, double& out_rad, const std::string& where)
{
    const bool deg = static_cast<bool>(node[stem + "_deg"]);
    const bool rad = static_cast<bool>(node[stem + "_rad"]);
    if (deg && rad) {
        throw DomainError("config: give either " + stem + "_deg or " + stem + "_rad in " + where + ", not both");
    }
    if (deg) {
        double v = 0.0;
        read(node, (stem + "_deg").c_str(), v, where);
        out_rad = deg_to_rad(v);
    } else if (rad) {
        read(node, (stem + "_rad").c_str(), out_rad, where);
    }
}

void check_finite(double v, const char* name)
{
    if (!std::isfinite(v)) {
        throw DomainError(std::string("config: ") + name + " must be finite");
    }
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream)
{
    std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t ScenarioConfig::seed_for(std::size_t trial) const
{
    if (seeds.empty()) {
        throw DomainError("config: seeds must not be empty");
    }
    return trial < seeds.size() ? seeds[trial] : mix_seed(seeds.front(), trial);
}

void ScenarioConfig::validate() const
{
    orbit.validate();
    if (!(min_elevation_rad >= 0.0 && min_elevation_rad < orbit.max_elevation_rad)) {
        throw DomainError("config: min elevation must lie in [0, max elevation)");
    }
    ssb.validate();
    if (!(sib19.cadence_ms > 0.0)) {
        throw DomainError("config: sib19.cadence_ms must be > 0");
    }
    const double ratio = sib19.cadence_ms / ssb.periodicity_ms;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 || std::round(ratio) < 1.0) {
        throw DomainError("config: sib19.cadence_ms must be a whole multiple of ssb.periodicity_ms");
    }
    if (sib19.k_offset_ms && !(*sib19.k_offset_ms > 0.0)) {
        throw DomainError("config: sib19.k_offset_ms must be > 0");
    }
    check_finite(sib19.dl_doppler_error_hz, "sib19.dl_doppler_error_hz");
    check_finite(sib19.ul_doppler_error_hz, "sib19.ul_doppler_error_hz");
    check_finite(sib19.k_offset_error_ms, "sib19.k_offset_error_ms");
    if (sib19.truthful &&
        (sib19.dl_doppler_error_hz != 0.0 || sib19.ul_doppler_error_hz != 0.0 || sib19.k_offset_error_ms != 0.0)) {
        throw DomainError("config: sib19 error terms require truthful: false");
    }
    check_finite(ue.lo_offset_hz, "ue.lo_offset_hz");
    check_finite(ue.delay_error_us, "ue.delay_error_us");
    if (uplink.fft_size < 256 || uplink.fft_size % 2 != 0) {
        throw DomainError("config: uplink.fft_size must be even and >= 256 (PSS on every second bin)");
    }
    if (uplink.cp_samples >= uplink.fft_size) {
        throw DomainError("config: uplink.cp_samples must be shorter than the symbol");
    }
    const auto violations = validate_plan(plan);
    if (!violations.empty()) {
        const auto& v = violations.front();
        throw DomainError("config: frequency plan violation '" + v.code + "' on " + v.field);
    }
    for (const auto& s : chain) {
        check_finite(s.gain_db, "payload.chain gain_db");
    }
    if (snr_db) {
        check_finite(*snr_db, "snr_db");
    }
    if (seeds.empty()) {
        throw DomainError("config: seeds must not be empty");
    }
    if (duration_s && !(*duration_s > 0.0)) {
        throw DomainError("config: duration_s must be > 0");
    }
    if (!(profile_dt_s > 0.0 && profile_dt_s <= 1.0)) {
        throw DomainError("config: profile_dt_s must lie in (0, 1]");
    }
    if (!(detection_threshold >= 0.0 && detection_threshold <= 1.0)) {
        throw DomainError("config: detection_threshold must lie in [0, 1]");
    }
    if (acquire.trials < 1) {
        throw DomainError("config: acquire.trials must be >= 1");
    }
    if (acquire.bank_range_hz && !(*acquire.bank_range_hz >= 0.0)) {
        throw DomainError("config: acquire.bank_range_hz must be >= 0");
    }
}

ScenarioConfig parse_scenario(const std::string& yaml_text, bool check)
{
    YAML::Node root;
    try {
        root = YAML::Load(yaml_text);
    } catch (const YAML::Exception& e) {
        throw DomainError(std::string("config: YAML parse error: ") + e.what());
    }
    ScenarioConfig cfg;
    if (root.IsNull()) {
        if (check) {
            cfg.validate();
        }
        return cfg;
    }
    reject_unknown(root, "top level",
                   {"id", "orbit", "ssb", "sib19", "ue", "uplink", "plan", "payload", "snr_db", "seeds",
                    "duration_s", "profile_dt_s", "detection_threshold", "acquire"});

    read(root, "id", cfg.id, "top level");
    read(root, "snr_db", cfg.snr_db, "top level");
    read(root, "seeds", cfg.seeds, "top level");
    read(root, "duration_s", cfg.duration_s, "top level");
    read(root, "profile_dt_s", cfg.profile_dt_s, "top level");
    read(root, "detection_threshold", cfg.detection_threshold, "top level");

    if (const auto n = root["orbit"]) {
        reject_unknown(n, "orbit",
                       {"altitude_m", "max_elevation_deg", "max_elevation_rad", "min_elevation_deg",
                        "min_elevation_rad", "earth_radius_m", "mu_m3s2"});
        read(n, "altitude_m", cfg.orbit.altitude_m, "orbit");
        read(n, "earth_radius_m", cfg.orbit.earth_radius_m, "orbit");
        read(n, "mu_m3s2", cfg.orbit.mu_m3s2, "orbit");
        read_angle(n, "max_elevation", cfg.orbit.max_elevation_rad, "orbit");
        read_angle(n, "min_elevation", cfg.min_elevation_rad, "orbit");
    }
    if (const auto n = root["ssb"]) {
        reject_unknown(n, "ssb", {"scs_hz", "fft_size", "periodicity_ms", "nid2"});
        read(n, "scs_hz", cfg.ssb.scs_hz, "ssb");
        read(n, "fft_size", cfg.ssb.fft_size, "ssb");
        read(n, "periodicity_ms", cfg.ssb.periodicity_ms, "ssb");
        read(n, "nid2", cfg.ssb.nid2, "ssb");
    }
    if (const auto n = root["sib19"]) {
        reject_unknown(n, "sib19",
                       {"cadence_ms", "k_offset_ms", "truthful", "dl_doppler_error_hz", "ul_doppler_error_hz",
                        "k_offset_error_ms"});
        read(n, "cadence_ms", cfg.sib19.cadence_ms, "sib19");
        read(n, "k_offset_ms", cfg.sib19.k_offset_ms, "sib19");
        read(n, "truthful", cfg.sib19.truthful, "sib19");
        read(n, "dl_doppler_error_hz", cfg.sib19.dl_doppler_error_hz, "sib19");
        read(n, "ul_doppler_error_hz", cfg.sib19.ul_doppler_error_hz, "sib19");
        read(n, "k_offset_error_ms", cfg.sib19.k_offset_error_ms, "sib19");
    }
    if (const auto n = root["ue"]) {
        reject_unknown(n, "ue", {"lo_offset_hz", "delay_error_us"});
        read(n, "lo_offset_hz", cfg.ue.lo_offset_hz, "ue");
        read(n, "delay_error_us", cfg.ue.delay_error_us, "ue");
    }
    if (const auto n = root["uplink"]) {
        reject_unknown(n, "uplink", {"fft_size", "cp_samples"});
        read(n, "fft_size", cfg.uplink.fft_size, "uplink");
        read(n, "cp_samples", cfg.uplink.cp_samples, "uplink");
    }
    if (const auto n = root["plan"]) {
        reject_unknown(n, "plan",
                       {"l_band_center_hz", "ka_up_center_hz", "ka_down_center_hz", "dl_slot_hz", "ul_slot_hz",
                        "guard_hz", "sample_rate_hz", "dl_slot_offset_hz", "ul_slot_offset_hz"});
        read(n, "l_band_center_hz", cfg.plan.l_band_center_hz, "plan");
        read(n, "ka_up_center_hz", cfg.plan.ka_up_center_hz, "plan");
        read(n, "ka_down_center_hz", cfg.plan.ka_down_center_hz, "plan");
        read(n, "dl_slot_hz", cfg.plan.dl_slot_hz, "plan");
        read(n, "ul_slot_hz", cfg.plan.ul_slot_hz, "plan");
        read(n, "guard_hz", cfg.plan.guard_hz, "plan");
        read(n, "sample_rate_hz", cfg.plan.sample_rate_hz, "plan");
        read(n, "dl_slot_offset_hz", cfg.plan.dl_slot_offset_hz, "plan");
        read(n, "ul_slot_offset_hz", cfg.plan.ul_slot_offset_hz, "plan");
    }
    if (const auto n = root["payload"]) {
        reject_unknown(n, "payload", {"mode", "chain"});
        std::string mode = to_string(cfg.payload_mode);
        read(n, "mode", mode, "payload");
        cfg.payload_mode = parse_payload_mode(mode);
        if (const auto chain = n["chain"]) {
            if (!chain.IsSequence()) {
                throw DomainError("config: payload.chain must be a list");
            }
            for (const auto& stage : chain) {
                reject_unknown(stage, "payload.chain entry", {"name", "gain_db"});
                GainStage g;
                read(stage, "name", g.name, "payload.chain");
                read(stage, "gain_db", g.gain_db, "payload.chain");
                cfg.chain.push_back(g);
            }
        }
    }
    if (const auto n = root["acquire"]) {
        reject_unknown(n, "acquire", {"cfo_grid_hz", "snr_grid_db", "trials", "bank_range_hz"});
        read(n, "cfo_grid_hz", cfg.acquire.cfo_grid_hz, "acquire");
        read(n, "snr_grid_db", cfg.acquire.snr_grid_db, "acquire");
        read(n, "trials", cfg.acquire.trials, "acquire");
        read(n, "bank_range_hz", cfg.acquire.bank_range_hz, "acquire");
    }
    if (check) {
        cfg.validate();
    }
    return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path, bool check)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read config file " + path.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    try {
        return parse_scenario(text.str(), check);
    } catch (const DomainError& e) {
        throw DomainError(path.string() + ": " + e.what());
    }
}

}  // namespace ntn
