// Copyright 2026 the canopyhm authors.
// SPDX-License-Identifier: Apache-2.0

#include "chm/manifest.hpp"

#include <fstream>

#include <json.hpp>

#include "chm/error.hpp"

namespace chm {

void write_manifest(const RunManifest& m, const std::string& path) {
    nlohmann::json j;
    j["subcommand"] = m.subcommand;
    j["parameters"] = m.parameters;
    j["inputs"] = m.inputs;
    j["outputs"] = m.outputs;
    j["seed"] = m.seed;
    j["tool_version"] = m.tool_version;
    j["duration_seconds"] = m.duration_seconds;
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << j.dump(1) << "\n";
    if (!out) throw IoError("failed writing " + path);
}

} // namespace chm
