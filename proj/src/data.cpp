#include "hcrp/data.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hcrp/rng.hpp"

namespace hcrp {

using nlohmann::json;

std::vector<std::string> split_tokens(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

void validate_instance(const Instance& inst, const std::string& context) {
    if (inst.tokens.empty()) throw DataError(context + ": empty token list");
    if (inst.relation_id.empty()) throw DataError(context + ": empty relation id");
    const int len = static_cast<int>(inst.tokens.size());
    auto check_span = [&](const TokenSpan& s, const char* which) {
        if (s.start < 0 || s.start > s.end || s.end >= len) {
            throw DataError(context + ": " + which + " span [" + std::to_string(s.start) + ", " +
                            std::to_string(s.end) + "] out of range for " + std::to_string(len) +
                            " tokens");
        }
    };
    check_span(inst.head_span, "head");
    check_span(inst.tail_span, "tail");
}

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

json parse_json(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw DataError(origin + ": JSON parse failure: " + e.what());
    }
}

// Top-level object keys in document order, duplicates included (nlohmann
// silently overwrites duplicates, so they are collected via a callback parse).
std::vector<std::string> top_level_keys(const std::string& text) {
    std::vector<std::string> keys;
    int depth = 0;
    json::parser_callback_t cb = [&](int, json::parse_event_t event, json& parsed) {
        if (event == json::parse_event_t::object_start || event == json::parse_event_t::array_start) {
            ++depth;
        } else if (event == json::parse_event_t::object_end || event == json::parse_event_t::array_end) {
            --depth;
        } else if (event == json::parse_event_t::key && depth == 1) {
            keys.push_back(parsed.get<std::string>());
        }
        return true;
    };
    try {
        json::parse(text, cb);
    } catch (const json::parse_error&) {
        // The caller reports parse failures with context.
    }
    return keys;
}

TokenSpan span_from_entity(const json& ent, const std::string& context) {
    if (!ent.is_array() || ent.size() < 3 || !ent[2].is_array() || ent[2].empty() ||
        !ent[2][0].is_array() || ent[2][0].empty()) {
        throw DataError(context + ": malformed entity record");
    }
    int lo = ent[2][0][0].get<int>();
    int hi = lo;
    for (const auto& v : ent[2][0]) {
        const int i = v.get<int>();
        lo = std::min(lo, i);
        hi = std::max(hi, i);
    }
    return {lo, hi};
}

}  // namespace

Corpus parse_corpus(const std::string& text, const std::string& origin) {
    const json doc = parse_json(text, origin);
    if (!doc.is_object()) throw DataError(origin + ": top level must be an object keyed by relation id");
    Corpus corpus;
    for (const auto& [rel_id, records] : doc.items()) {
        if (!records.is_array()) {
            throw DataError(origin + ": relation " + rel_id + ": value must be an array of instances");
        }
        std::vector<Instance> list;
        list.reserve(records.size());
        int idx = 0;
        for (const auto& rec : records) {
            const std::string context = origin + ": relation " + rel_id + ", instance " + std::to_string(idx);
            if (!rec.contains("tokens") || !rec.contains("h") || !rec.contains("t")) {
                throw DataError(context + ": missing tokens/h/t field");
            }
            Instance inst;
            inst.relation_id = rel_id;
            inst.corpus_index = idx;
            for (const auto& t : rec["tokens"]) inst.tokens.push_back(t.get<std::string>());
            inst.head_span = span_from_entity(rec["h"], context + ", field h");
            inst.tail_span = span_from_entity(rec["t"], context + ", field t");
            validate_instance(inst, context);
            list.push_back(std::move(inst));
            ++idx;
        }
        corpus[rel_id] = std::move(list);
    }
    return corpus;
}

Corpus load_corpus(const std::filesystem::path& path) {
    return parse_corpus(read_file(path), path.string());
}

RelationCatalog parse_catalog(const std::string& text, const std::string& origin) {
    const json doc = parse_json(text, origin);
    if (!doc.is_object()) throw DataError(origin + ": top level must be an object keyed by relation id");

    const std::vector<std::string> keys = top_level_keys(text);
    std::set<std::string> seen;
    for (const auto& k : keys) {
        if (!seen.insert(k).second) throw DataError(origin + ": duplicate relation id: " + k);
    }

    RelationCatalog catalog;
    for (const auto& [rel_id, rec] : doc.items()) {
        if (!rec.is_array() || rec.empty()) {
            throw DataError(origin + ": relation " + rel_id + ": expected [name, description]");
        }
        RelationInfo info;
        info.name = split_tokens(rec[0].get<std::string>());
        if (info.name.empty()) throw DataError(origin + ": relation " + rel_id + ": empty name");
        if (rec.size() > 1 && rec[1].is_string()) {
            info.description = split_tokens(rec[1].get<std::string>());
        }
        catalog.entries[rel_id] = std::move(info);
    }
    return catalog;
}

RelationCatalog load_catalog(const std::filesystem::path& path) {
    return parse_catalog(read_file(path), path.string());
}

namespace {

Episode build_episode(const Corpus& corpus, const std::vector<std::string>& relation_ids, int k,
                      int r, std::mt19937_64& rng, QuerySampling mode) {
    const int n = static_cast<int>(relation_ids.size());
    Episode ep;
    ep.relation_ids = relation_ids;
    ep.support.resize(n);

    // Remaining per-class pools after support removal; query sampled from them.
    std::vector<std::vector<int>> remaining(n);
    for (int i = 0; i < n; ++i) {
        auto it = corpus.find(relation_ids[i]);
        if (it == corpus.end()) throw DataError("unknown relation id: " + relation_ids[i]);
        const auto& pool = it->second;
        const int needed = k + (r + n - 1) / n;
        if (static_cast<int>(pool.size()) < needed) {
            throw DataError("relation " + relation_ids[i] + " has " + std::to_string(pool.size()) +
                            " instances, needs at least " + std::to_string(needed));
        }
        std::vector<int> idx(pool.size());
        std::iota(idx.begin(), idx.end(), 0);
        // Partial Fisher-Yates: first k become support.
        for (int j = 0; j < k; ++j) {
            const int pick = j + static_cast<int>(bounded(rng, idx.size() - j));
            std::swap(idx[j], idx[pick]);
            ep.support[i].push_back(pool[idx[j]]);
        }
        remaining[i].assign(idx.begin() + k, idx.end());
    }

    for (int j = 0; j < r; ++j) {
        int cls;
        if (mode == QuerySampling::kBalanced) {
            cls = j % n;
        } else {
            // Uniform over classes with a nonempty remaining pool.
            std::vector<int> alive;
            for (int i = 0; i < n; ++i)
                if (!remaining[i].empty()) alive.push_back(i);
            if (alive.empty()) throw DataError("query pool exhausted");
            cls = alive[bounded(rng, alive.size())];
        }
        if (remaining[cls].empty()) throw DataError("query pool exhausted for relation " + relation_ids[cls]);
        const int pick = static_cast<int>(bounded(rng, remaining[cls].size()));
        const int inst_idx = remaining[cls][pick];
        remaining[cls][pick] = remaining[cls].back();
        remaining[cls].pop_back();
        ep.query.emplace_back(corpus.at(relation_ids[cls])[inst_idx], cls);
    }
    return ep;
}

}  // namespace

Episode sample_episode(const Corpus& corpus, int n, int k, int r, std::mt19937_64& rng,
                       QuerySampling mode) {
    if (n < 1 || k < 1 || r < 1) throw ConfigError("n, k, r must all be positive");
    if (static_cast<int>(corpus.size()) < n) {
        throw DataError("corpus has " + std::to_string(corpus.size()) + " relations, need " +
                        std::to_string(n));
    }
    std::vector<std::string> ids;
    ids.reserve(corpus.size());
    for (const auto& [id, _] : corpus) ids.push_back(id);
    for (int j = 0; j < n; ++j) {
        const int pick = j + static_cast<int>(bounded(rng, ids.size() - j));
        std::swap(ids[j], ids[pick]);
    }
    ids.resize(n);
    return build_episode(corpus, ids, k, r, rng, mode);
}

Episode fixed_episode(const Corpus& corpus, const std::vector<std::string>& relation_ids, int k,
                      int r, std::mt19937_64& rng, QuerySampling mode) {
    if (relation_ids.empty()) throw ConfigError("fixed episode needs at least one relation id");
    for (const auto& id : relation_ids) {
        if (!corpus.contains(id)) throw DataError("unknown relation id: " + id);
    }
    return build_episode(corpus, relation_ids, k, r, rng, mode);
}

}  // namespace hcrp
