#include "ntn/iq_dump.hpp"

#include <bit>
#include <cstdint>
#include <fstream>

#include <json.hpp>

#include "ntn/errors.hpp"

namespace ntn {

namespace {

void put_le_float(std::ostream& os, float v)
{
    const auto bits = std::bit_cast<std::uint32_t>(v);
    const char bytes[4] = {static_cast<char>(bits & 0xFF), static_cast<char>((bits >> 8) & 0xFF),
                           static_cast<char>((bits >> 16) & 0xFF), static_cast<char>((bits >> 24) & 0xFF)};
    os.write(bytes, 4);
}

float get_le_float(const unsigned char* p)
{
    const std::uint32_t bits = static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
                               (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
    return std::bit_cast<float>(bits);
}

}  // namespace

std::filesystem::path iq_sidecar_path(const std::filesystem::path& data_path)
{
    auto p = data_path;
    p += ".json";
    return p;
}

void write_iq_dump(const std::filesystem::path& data_path, const IqBuffer& buf, double carrier_hz,
                   const std::string& scenario_id)
{
    std::ofstream data(data_path, std::ios::binary);
    if (!data) {
        throw IoError("cannot open IQ dump for writing: " + data_path.string());
    }
    for (const auto& s : buf.samples) {
        put_le_float(data, static_cast<float>(s.real()));
        put_le_float(data, static_cast<float>(s.imag()));
    }
    if (!data) {
        throw IoError("write failed: " + data_path.string());
    }

    const nlohmann::json meta = {
        {"format", "cf32_le"},
        {"sample_rate_hz", buf.sample_rate_hz},
        {"carrier_hz", carrier_hz},
        {"scenario_id", scenario_id},
        {"sample_count", buf.size()},
    };
    const auto side = iq_sidecar_path(data_path);
    std::ofstream os(side);
    if (!os) {
        throw IoError("cannot open IQ sidecar for writing: " + side.string());
    }
    os << meta.dump(2) << '\n';
}

IqDumpMetadata read_iq_metadata(const std::filesystem::path& data_path)
{
    const auto side = iq_sidecar_path(data_path);
    std::ifstream is(side);
    if (!is) {
        throw IoError("cannot open IQ sidecar: " + side.string());
    }
    try {
        const auto j = nlohmann::json::parse(is);
        return {j.at("sample_rate_hz").get<double>(), j.at("carrier_hz").get<double>(),
                j.at("scenario_id").get<std::string>(), j.at("sample_count").get<std::size_t>()};
    } catch (const nlohmann::json::exception& e) {
        throw IoError("malformed IQ sidecar " + side.string() + ": " + e.what());
    }
}

IqBuffer read_iq_dump(const std::filesystem::path& data_path)
{
    const IqDumpMetadata meta = read_iq_metadata(data_path);
    std::ifstream is(data_path, std::ios::binary);
    if (!is) {
        throw IoError("cannot open IQ dump: " + data_path.string());
    }
    std::vector<unsigned char> raw((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    if (raw.size() != meta.sample_count * 8) {
        throw IoError("IQ dump size does not match its sidecar: " + data_path.string());
    }
    IqBuffer buf{std::vector<cf64>(meta.sample_count), meta.sample_rate_hz};
    for (std::size_t n = 0; n < meta.sample_count; ++n) {
        buf.samples[n] = {get_le_float(&raw[8 * n]), get_le_float(&raw[8 * n + 4])};
    }
    return buf;
}

}  // namespace ntn
