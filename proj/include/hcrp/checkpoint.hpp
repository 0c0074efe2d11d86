#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "hcrp/params.hpp"

namespace hcrp {

// Versioned model container: config echo, vocabulary, and all parameter
// blocks. Doubles are serialized with shortest round-trip formatting, so a
// save/load cycle is bitwise exact.
struct Checkpoint {
    static constexpr int kVersion = 1;

    std::map<std::string, std::string> config;
    Vocab vocab;
    ParamStore params;

    void save(const std::filesystem::path& path) const;
    static Checkpoint load(const std::filesystem::path& path);
};

}  // namespace hcrp
