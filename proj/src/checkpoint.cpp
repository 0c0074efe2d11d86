#include "hcrp/checkpoint.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "hcrp/errors.hpp"

namespace hcrp {

using nlohmann::json;

void Checkpoint::save(const std::filesystem::path& path) const {
    json doc;
    doc["version"] = kVersion;
    doc["config"] = config;
    doc["vocab"] = vocab.tokens();
    doc["d"] = params.d;
    doc["vocab_size"] = params.vocab_size;
    doc["has_mixing"] = params.has_mixing;
    json blocks = json::array();
    for (const auto& b : params.blocks) {
        json jb;
        jb["name"] = b.name;
        jb["shape"] = b.shape;
        jb["dtype"] = "f64";
        jb["data"] = b.data;
        blocks.push_back(std::move(jb));
    }
    doc["blocks"] = std::move(blocks);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write checkpoint: " + path.string());
    out << doc.dump();
}

Checkpoint Checkpoint::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open checkpoint: " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw DataError(path.string() + ": JSON parse failure: " + e.what());
    }
    if (doc.value("version", -1) != kVersion) {
        throw DataError(path.string() + ": unsupported checkpoint version");
    }
    Checkpoint ck;
    ck.config = doc.at("config").get<std::map<std::string, std::string>>();
    ck.vocab = Vocab::from_tokens(doc.at("vocab").get<std::vector<std::string>>());
    ck.params.d = doc.at("d").get<int>();
    ck.params.vocab_size = doc.at("vocab_size").get<int>();
    ck.params.has_mixing = doc.at("has_mixing").get<bool>();
    for (const auto& jb : doc.at("blocks")) {
        ParamBlock b;
        b.name = jb.at("name").get<std::string>();
        b.shape = jb.at("shape").get<std::vector<int>>();
        if (jb.value("dtype", "") != "f64") throw DataError(path.string() + ": unsupported dtype");
        b.data = jb.at("data").get<std::vector<double>>();
        ck.params.blocks.push_back(std::move(b));
    }
    return ck;
}

}  // namespace hcrp
