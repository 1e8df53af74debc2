#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "wireinspect/profile.hpp"

namespace wireinspect {

/// Standard alphabet with '=' padding.
std::string base64_encode(std::span<const std::uint8_t> bytes);
/// Throws CorruptProfile on characters outside the alphabet or bad padding.
std::vector<std::uint8_t> base64_decode(std::string_view text);

/// Doubles as little-endian IEEE 754 binary64, base64 encoded. Lossless.
std::string encode_doubles(std::span<const double> values);
std::vector<double> decode_doubles(std::string_view text);

std::uint32_t crc32_of(std::string_view text);

nlohmann::json to_json(const ViewSpec& view);
/// Accepts a full view (as written by to_json) or a minimal one carrying only
/// view_id, roi and expected_wires; missing fields take ViewSpec::with_defaults.
/// Throws InvalidConfig on malformed input.
ViewSpec view_from_json(const nlohmann::json& j);

/// Reads {"harness_type": ..., "views": [...]}.
struct ViewsConfig {
  std::string harness_type;
  std::vector<ViewSpec> views;
};
ViewsConfig views_config_from_json(const nlohmann::json& j);
ViewsConfig load_views_config(const std::filesystem::path& path);

/// The profile document without its checksum field.
nlohmann::json profile_body(const TrainedProfile& p);

/// Full document; "checksum" is the CRC-32 (8 lower-case hex digits) of the
/// compact dump of profile_body.
std::string serialize_profile(const TrainedProfile& p);

/// Throws FormatVersionUnsupported for an unknown format_version and
/// CorruptProfile for a checksum mismatch or a malformed document.
TrainedProfile parse_profile(std::string_view text);

void save_profile(const TrainedProfile& p, const std::filesystem::path& path);
TrainedProfile load_profile(const std::filesystem::path& path);

/// <root>/<harness_type>/<profile_id>.harnessprofile.json
std::filesystem::path profile_path(const std::filesystem::path& root, const TrainedProfile& p);

nlohmann::json to_json(const InspectionResult& r);

}  // namespace wireinspect
