#include "hcrp/encoder.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

namespace hcrp {

using nlohmann::json;

std::vector<int> marked_ids(const Vocab& vocab, const Instance& inst, int* head_pos, int* tail_pos) {
    const int len = static_cast<int>(inst.tokens.size());
    std::vector<int> ids;
    ids.reserve(len + 4);
    *head_pos = -1;
    *tail_pos = -1;
    for (int i = 0; i < len; ++i) {
        if (i == inst.head_span.start) {
            *head_pos = static_cast<int>(ids.size());
            ids.push_back(Vocab::kHeadOpen);
        }
        if (i == inst.tail_span.start) {
            *tail_pos = static_cast<int>(ids.size());
            ids.push_back(Vocab::kTailOpen);
        }
        ids.push_back(vocab.id(inst.tokens[i]));
        if (i == inst.head_span.end) ids.push_back(Vocab::kHeadClose);
        if (i == inst.tail_span.end) ids.push_back(Vocab::kTailClose);
    }
    return ids;
}

void FrozenStore::add(const std::string& key, Record rec) {
    if (records_.empty()) {
        d_ = rec.m.cols;
    } else if (rec.m.cols != d_) {
        throw DataError("frozen store: record " + key + " has d=" + std::to_string(rec.m.cols) +
                        ", store has d=" + std::to_string(d_));
    }
    records_[key] = std::move(rec);
}

const FrozenStore::Record& FrozenStore::at(const std::string& key) const {
    auto it = records_.find(key);
    if (it == records_.end()) throw DataError("frozen store: missing key: " + key);
    return it->second;
}

FrozenStore FrozenStore::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open frozen-embedding file: " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw DataError(path.string() + ": JSON parse failure: " + e.what());
    }
    if (!doc.contains("records")) throw DataError(path.string() + ": missing 'records'");
    FrozenStore store;
    for (const auto& [key, rec] : doc["records"].items()) {
        const int l = rec.at("l").get<int>();
        const int d = rec.at("d").get<int>();
        Record r;
        r.m = Mat<double>(l, d);
        const auto& data = rec.at("data");
        if (static_cast<int>(data.size()) != l * d) {
            throw DataError(path.string() + ": record " + key + ": data length != l*d");
        }
        for (std::size_t i = 0; i < r.m.a.size(); ++i) r.m.a[i] = data[i].get<double>();
        if (rec.contains("cls")) r.cls = rec["cls"].get<int>();
        if (rec.contains("head")) r.head = rec["head"].get<int>();
        if (rec.contains("tail")) r.tail = rec["tail"].get<int>();
        store.add(key, std::move(r));
    }
    return store;
}

void FrozenStore::save(const std::filesystem::path& path) const {
    json doc;
    doc["version"] = 1;
    doc["d"] = d_;
    json records = json::object();
    for (const auto& [key, r] : records_) {
        json rec;
        rec["l"] = r.m.rows;
        rec["d"] = r.m.cols;
        if (r.cls >= 0) rec["cls"] = r.cls;
        if (r.head >= 0) rec["head"] = r.head;
        if (r.tail >= 0) rec["tail"] = r.tail;
        rec["data"] = r.m.a;
        records[key] = std::move(rec);
    }
    doc["records"] = std::move(records);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write frozen-embedding file: " + path.string());
    out << doc.dump();
}

}  // namespace hcrp
