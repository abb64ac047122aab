#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "model.hpp"

namespace igmd {

/// CRC-32 (IEEE, reflected 0xEDB88320), the integrity check for model files
/// and the data-file fingerprint echoed into reports.
std::uint32_t crc32(std::string_view bytes);

/// Canonical text serialization: version line, checksum line, then the full
/// model. Re-serializing a loaded model reproduces the bytes exactly.
std::string serialize_model(const Model& model);

/// Inverse of serialize_model. Rejects version mismatches, checksum damage,
/// and structural corruption with ErrorKind::Format.
Model parse_model(std::string_view bytes);

void save_model_file(const Model& model, const std::string& path);
Model load_model_file(const std::string& path);

/// Checksum of the canonical serialization (the value embedded in the file).
std::uint32_t model_checksum(const Model& model);

std::uint32_t file_checksum(const std::string& path);

}  // namespace igmd
