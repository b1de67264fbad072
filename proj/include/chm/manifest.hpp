// Copyright 2026 the canopyhm authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef CHM_MANIFEST_HPP_
#define CHM_MANIFEST_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace chm {

inline constexpr const char* kToolVersion = "0.1.0";

// Provenance record serialized next to every CLI output.
struct RunManifest {
    std::string subcommand;
    std::map<std::string, std::string> parameters;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::uint64_t seed = 0;
    std::string tool_version = kToolVersion;
    double duration_seconds = 0.0;
};

void write_manifest(const RunManifest& m, const std::string& path);

} // namespace chm

#endif // CHM_MANIFEST_HPP_
