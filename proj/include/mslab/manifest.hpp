#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace mslab {

inline constexpr const char* kLabVersion = "0.1.0";

// Self-describing record of one run: the materialized config, every output
// file with its content hash (the manifest itself excluded), wall-clock
// duration, and experiment-specific notes.
struct RunManifest {
    nlohmann::json config_echo;
    std::vector<std::pair<std::string, std::string>> artifacts; // path -> sha256
    double duration_seconds = 0.0;
    std::string version = kLabVersion;
    nlohmann::json notes = nlohmann::json::object();

    nlohmann::json to_json() const;
};

// Hashes every regular file under out_dir (sorted relative paths), fills
// the artifact list, and writes manifest.json last.
void write_manifest(RunManifest& manifest, const std::string& out_dir);

} // namespace mslab
