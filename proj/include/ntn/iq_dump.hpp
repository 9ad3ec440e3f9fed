#pragma once

// Raw IQ dump: header-less interleaved 32-bit little-endian floats (I, Q).
// Sample rate and carrier travel in a JSON sidecar next to the data file
// (<path>.json).

#include <filesystem>
#include <string>

#include "ntn/waveform.hpp"

namespace ntn {

struct IqDumpMetadata {
    double sample_rate_hz = 0.0;
    double carrier_hz = 0.0;
    std::string scenario_id;
    std::size_t sample_count = 0;
};

std::filesystem::path iq_sidecar_path(const std::filesystem::path& data_path);

/// Writes data_path and its sidecar. Throws IoError with the path on failure.
void write_iq_dump(const std::filesystem::path& data_path, const IqBuffer& buf, double carrier_hz,
                   const std::string& scenario_id);

IqDumpMetadata read_iq_metadata(const std::filesystem::path& data_path);

/// Samples come back at float precision.
IqBuffer read_iq_dump(const std::filesystem::path& data_path);

}  // namespace ntn
