#include "mslab/manifest.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "mslab/errors.hpp"
#include "mslab/io.hpp"

namespace mslab {

nlohmann::json RunManifest::to_json() const {
    nlohmann::json files = nlohmann::json::array();
    for (const auto& [path, hash] : artifacts)
        files.push_back({{"path", path}, {"sha256", hash}});
    return {{"config", config_echo},
            {"artifacts", files},
            {"duration_seconds", duration_seconds},
            {"version", version},
            {"notes", notes}};
}

void write_manifest(RunManifest& manifest, const std::string& out_dir) {
    namespace fs = std::filesystem;
    manifest.artifacts.clear();
    std::vector<std::string> paths;
    for (const auto& entry : fs::recursive_directory_iterator(out_dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string rel = fs::relative(entry.path(), out_dir).generic_string();
        if (rel == "manifest.json") continue;
        paths.push_back(rel);
    }
    std::sort(paths.begin(), paths.end());
    for (const std::string& rel : paths)
        manifest.artifacts.emplace_back(rel, sha256_file((fs::path(out_dir) / rel).string()));

    const std::string path = (fs::path(out_dir) / "manifest.json").string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << manifest.to_json().dump(2) << '\n';
    out.flush();
    if (!out) throw IoError("write failed: " + path);
}

} // namespace mslab
