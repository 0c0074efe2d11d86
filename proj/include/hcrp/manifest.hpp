#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace hcrp {

// One manifest per CLI run: command, resolved config, input digests, and
// artifact paths. Rerunning with the recorded config and seed reproduces the
// outputs bitwise.
struct RunManifest {
    std::string command;
    std::map<std::string, std::string> config;
    std::uint64_t seed = 0;
    std::map<std::string, std::string> input_digests;  // path -> fnv1a64 hex
    std::vector<std::string> artifacts;
    double wall_clock_seconds = 0.0;
    std::string outcome;  // "ok" or an error summary

    void add_input(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;
    static RunManifest load(const std::filesystem::path& path);
};

std::string file_digest(const std::filesystem::path& path);

}  // namespace hcrp
