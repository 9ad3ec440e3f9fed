#pragma once

// Per-iteration metrics of an end-to-end run, and their CSV / JSON forms.
//
// CSV header (fixed):
//   t_s,detection,branch_cfo_hz,total_cfo_hz,true_cfo_hz,residual_ul_cfo_hz,ul_timing_error_samples,buffer_delay_s
// Quantities that do not exist yet for a row (no detection, no uplink
// before the first SIB19) are NaN: "nan" in CSV, null in JSON. Numbers are
// printed in shortest round-trip form, so both formats are lossless.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ntn/orbit.hpp"

namespace ntn {

struct MetricsRow {
    double t_s = 0.0;
    int detection = 0;
    double branch_cfo_hz = 0.0;
    double total_cfo_hz = 0.0;
    double true_cfo_hz = 0.0;
    double residual_ul_cfo_hz = 0.0;
    double ul_timing_error_samples = 0.0;
    double buffer_delay_s = 0.0;

    bool operator==(const MetricsRow&) const = default;
};

struct Metrics {
    std::vector<MetricsRow> rows;
};

/// NaN-aware equality (NaN matches NaN), used for round-trip checks.
bool same_values(const Metrics& a, const Metrics& b);

enum class ExportFormat { Csv, Json };

/// "csv" | "json"; DomainError otherwise.
ExportFormat parse_export_format(const std::string& text);

inline constexpr const char* kMetricsCsvHeader =
    "t_s,detection,branch_cfo_hz,total_cfo_hz,true_cfo_hz,residual_ul_cfo_hz,ul_timing_error_samples,buffer_delay_s";

void write_metrics_csv(std::ostream& out, const Metrics& m);
void write_metrics_json(std::ostream& out, const Metrics& m);

/// Throws IoError naming the path when it cannot be written.
void export_metrics(const Metrics& m, ExportFormat format, const std::filesystem::path& path);

Metrics read_metrics_json(const std::filesystem::path& path);
Metrics read_metrics_csv(const std::filesystem::path& path);

/// Columns: t_s,slant_range_m,elevation_rad,delay_s,radial_velocity_ms
void write_pass_profile_csv(std::ostream& out, const PassProfile& p);
void write_pass_profile_json(std::ostream& out, const PassProfile& p);

/// Shortest representation that parses back to the same double; "nan" for NaN.
std::string format_double(double v);

/// Opens `path` for writing or throws IoError.
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace ntn
