// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "llrecall/harness.hpp"

namespace llrecall {

/// Current on-disk index format. Files carry
///   line 1: "llrecall-index <version>"
///   line 2: "<payload bytes> <crc32 as 8 hex digits>"
///   then a JSON payload holding the config, documents, vocabulary, matrix
///   triplets and the model-specific factors.
inline constexpr int kIndexFormatVersion = 1;

/// Config as a JSON object text; the inverse validates fields and the id.
std::string config_to_json_text(const ClassifierConfig& config);
ClassifierConfig config_from_json_text(std::string_view text);

std::string serialize_classifier(const Classifier& classifier);
/// Throws FormatError on a bad header, version mismatch, truncation or
/// checksum failure.
Classifier deserialize_classifier(std::string_view bytes);

void persist_index(const Classifier& classifier, const std::filesystem::path& path);
Classifier load_index(const std::filesystem::path& path);

}  // namespace llrecall
