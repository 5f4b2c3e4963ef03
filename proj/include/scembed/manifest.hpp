#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "scembed/common.hpp"

namespace scembed {

// FNV-1a over the file bytes; used to detect input changes between runs.
std::uint64_t digest_file(const std::string& path);

// Plain-text run record: stage, config hash, seed, input digests, outputs.
// Content is fully determined by its arguments, so identical runs write
// identical manifests.
void write_manifest(const std::string& manifest_path, std::string_view stage,
                    std::uint64_t config_hash, std::uint64_t seed,
                    std::span<const std::string> inputs, std::span<const std::string> outputs);

}  // namespace scembed
