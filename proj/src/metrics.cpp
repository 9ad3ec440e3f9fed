#include "ntn/metrics.hpp"

#include <json.hpp>

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "ntn/errors.hpp"

namespace ntn {

namespace {

using nlohmann::json;

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

bool same(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_from(const json& j, const char* key)
{
    const json& v = j.at(key);
    return v.is_null() ? kNan : v.get<double>();
}

double parse_double(const std::string& s)
{
    if (s == "nan") {
        return kNan;
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw DomainError("not a number: '" + s + "'");
    }
    return v;
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read " + path.string());
    }
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

std::string format_double(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return {buf.data(), ptr};
}

bool same_values(const Metrics& a, const Metrics& b)
{
    if (a.rows.size() != b.rows.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        const auto& x = a.rows[i];
        const auto& y = b.rows[i];
        if (!same(x.t_s, y.t_s) || x.detection != y.detection || !same(x.branch_cfo_hz, y.branch_cfo_hz) ||
            !same(x.total_cfo_hz, y.total_cfo_hz) || !same(x.true_cfo_hz, y.true_cfo_hz) ||
            !same(x.residual_ul_cfo_hz, y.residual_ul_cfo_hz) ||
            !same(x.ul_timing_error_samples, y.ul_timing_error_samples) || !same(x.buffer_delay_s, y.buffer_delay_s)) {
            return false;
        }
    }
    return true;
}

ExportFormat parse_export_format(const std::string& text)
{
    if (text == "csv") {
        return ExportFormat::Csv;
    }
    if (text == "json") {
        return ExportFormat::Json;
    }
    throw DomainError("format must be 'csv' or 'json', got '" + text + "'");
}

void write_metrics_csv(std::ostream& out, const Metrics& m)
{
    out << kMetricsCsvHeader << '\n';
    for (const auto& r : m.rows) {
        out << format_double(r.t_s) << ',' << r.detection << ',' << format_double(r.branch_cfo_hz) << ','
            << format_double(r.total_cfo_hz) << ',' << format_double(r.true_cfo_hz) << ','
            << format_double(r.residual_ul_cfo_hz) << ',' << format_double(r.ul_timing_error_samples) << ','
            << format_double(r.buffer_delay_s) << '\n';
    }
}

void write_metrics_json(std::ostream& out, const Metrics& m)
{
    json rows = json::array();
    for (const auto& r : m.rows) {
        rows.push_back({{"t_s", r.t_s},
                        {"detection", r.detection},
                        {"branch_cfo_hz", number_or_null(r.branch_cfo_hz)},
                        {"total_cfo_hz", number_or_null(r.total_cfo_hz)},
                        {"true_cfo_hz", number_or_null(r.true_cfo_hz)},
                        {"residual_ul_cfo_hz", number_or_null(r.residual_ul_cfo_hz)},
                        {"ul_timing_error_samples", number_or_null(r.ul_timing_error_samples)},
                        {"buffer_delay_s", number_or_null(r.buffer_delay_s)}});
    }
    out << rows.dump(1) << '\n';
}

void write_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out << content;
    out.flush();
    if (!out) {
        throw IoError("write to " + path.string() + " failed");
    }
}

void export_metrics(const Metrics& m, ExportFormat format, const std::filesystem::path& path)
{
    std::ostringstream s;
    if (format == ExportFormat::Csv) {
        write_metrics_csv(s, m);
    } else {
        write_metrics_json(s, m);
    }
    write_file(path, s.str());
}

Metrics read_metrics_json(const std::filesystem::path& path)
{
    json rows;
    try {
        rows = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw DomainError(path.string() + ": " + e.what());
    }
    Metrics m;
    for (const auto& j : rows) {
        MetricsRow r;
        r.t_s = number_from(j, "t_s");
        r.detection = j.at("detection").get<int>();
        r.branch_cfo_hz = number_from(j, "branch_cfo_hz");
        r.total_cfo_hz = number_from(j, "total_cfo_hz");
        r.true_cfo_hz = number_from(j, "true_cfo_hz");
        r.residual_ul_cfo_hz = number_from(j, "residual_ul_cfo_hz");
        r.ul_timing_error_samples = number_from(j, "ul_timing_error_samples");
        r.buffer_delay_s = number_from(j, "buffer_delay_s");
        m.rows.push_back(r);
    }
    return m;
}

Metrics read_metrics_csv(const std::filesystem::path& path)
{
    std::istringstream in(read_file(path));
    std::string line;
    if (!std::getline(in, line) || line != kMetricsCsvHeader) {
        throw DomainError(path.string() + ": missing or unexpected CSV header");
    }
    Metrics m;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::array<std::string, 8> f;
        std::istringstream fields(line);
        for (auto& s : f) {
            if (!std::getline(fields, s, ',')) {
                throw DomainError(path.string() + ": short CSV row");
            }
        }
        MetricsRow r;
        r.t_s = parse_double(f[0]);
        r.detection = static_cast<int>(parse_double(f[1]));
        r.branch_cfo_hz = parse_double(f[2]);
        r.total_cfo_hz = parse_double(f[3]);
        r.true_cfo_hz = parse_double(f[4]);
        r.residual_ul_cfo_hz = parse_double(f[5]);
        r.ul_timing_error_samples = parse_double(f[6]);
        r.buffer_delay_s = parse_double(f[7]);
        m.rows.push_back(r);
    }
    return m;
}

void write_pass_profile_csv(std::ostream& out, const PassProfile& p)
{
    out << "t_s,slant_range_m,elevation_rad,delay_s,radial_velocity_ms\n";
    for (std::size_t i = 0; i < p.size(); ++i) {
        out << format_double(p.t_s[i]) << ',' << format_double(p.slant_range_m[i]) << ','
            << format_double(p.elevation_rad[i]) << ',' << format_double(p.delay_s[i]) << ','
            << format_double(p.radial_velocity_ms[i]) << '\n';
    }
}

void write_pass_profile_json(std::ostream& out, const PassProfile& p)
{
    const json j = {{"t_s", p.t_s},
                    {"slant_range_m", p.slant_range_m},
                    {"elevation_rad", p.elevation_rad},
                    {"delay_s", p.delay_s},
                    {"radial_velocity_ms", p.radial_velocity_ms}};
    out << j.dump(1) << '\n';
}

}  // namespace ntn
