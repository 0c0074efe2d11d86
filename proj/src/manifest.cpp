#include "hcrp/manifest.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hcrp/errors.hpp"
#include "hcrp/rng.hpp"

namespace hcrp {

using nlohmann::json;

std::string file_digest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open input for digest: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(buf.str())));
    return hex;
}

void RunManifest::add_input(const std::filesystem::path& path) {
    input_digests[path.string()] = file_digest(path);
}

void RunManifest::save(const std::filesystem::path& path) const {
    json doc;
    doc["command"] = command;
    doc["config"] = config;
    doc["seed"] = seed;
    doc["inputs"] = input_digests;
    doc["artifacts"] = artifacts;
    doc["wall_clock_seconds"] = wall_clock_seconds;
    doc["outcome"] = outcome;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write manifest: " + path.string());
    out << doc.dump(2) << "\n";
}

RunManifest RunManifest::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open manifest: " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw DataError(path.string() + ": JSON parse failure: " + e.what());
    }
    RunManifest m;
    m.command = doc.at("command").get<std::string>();
    m.config = doc.at("config").get<std::map<std::string, std::string>>();
    m.seed = doc.at("seed").get<std::uint64_t>();
    m.input_digests = doc.at("inputs").get<std::map<std::string, std::string>>();
    m.artifacts = doc.at("artifacts").get<std::vector<std::string>>();
    m.wall_clock_seconds = doc.value("wall_clock_seconds", 0.0);
    m.outcome = doc.value("outcome", "");
    return m;
}

}  // namespace hcrp
