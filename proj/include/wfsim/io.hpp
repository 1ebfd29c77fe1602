#pragma once

#include <filesystem>
#include <string>

#include "wfsim/config.hpp"
#include "wfsim/profile.hpp"
#include "wfsim/sysid.hpp"

namespace wfsim::io {

// JSON documents. Parsers reject unknown keys and raise ParseError carrying
// the offending line; missing keys keep their defaults except where noted.
PlatformProfile parse_profile(const std::string& text);
std::string profile_to_json(const PlatformProfile& p);

StorageConfig parse_config(const std::string& text);  // validated
std::string config_to_json(const StorageConfig& c);

// remote_throughput_bps, loopback_throughput_bps, chunk_size_bytes,
// full_op_ns and zero_size_ns are required.
sysid::MeasurementSet parse_measurements(const std::string& text);
std::string measurements_to_json(const sysid::MeasurementSet& m);

// Throws ConfigError when the file cannot be read or written.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace wfsim::io
