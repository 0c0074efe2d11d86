#include "hcrp/synthetic.hpp"

#include <algorithm>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "hcrp/rng.hpp"

namespace hcrp {

using nlohmann::json;

void SyntheticSpec::validate() const {
    if (clusters < 1 || relations_per_cluster < 1 || instances_per_relation < 1) {
        throw ConfigError("synthetic spec counts must be positive");
    }
    if (sentence_tokens < 3) throw ConfigError("sentence_tokens must be at least 3");
    if (hardness < 0.0 || hardness > 1.0) throw ConfigError("hardness must be in [0, 1]");
    const int relations = clusters * relations_per_cluster;
    if (vocab_size < 2 * relations + 2 * clusters) {
        throw ConfigError("vocab_size too small for the requested relation/cluster pools");
    }
}

std::string synthetic_relation_id(int cluster, int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "c%02d_r%d", cluster, index);
    return buf;
}

bool looks_synthetic(const Corpus& corpus) {
    if (corpus.empty()) return false;
    for (const auto& [id, _] : corpus) {
        if (id.size() < 6 || id[0] != 'c' || id.find("_r") == std::string::npos) return false;
    }
    return true;
}

std::vector<std::string> synthetic_cluster_relations(const Corpus& corpus, int cluster) {
    std::vector<std::string> out;
    char prefix[16];
    std::snprintf(prefix, sizeof(prefix), "c%02d_r", cluster);
    for (const auto& [id, _] : corpus) {
        if (id.rfind(prefix, 0) == 0) out.push_back(id);
    }
    return out;
}

namespace {

std::string word(int i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "w%04d", i);
    return buf;
}

}  // namespace

SyntheticData make_synthetic_corpus(const SyntheticSpec& spec) {
    spec.validate();
    const int relations = spec.clusters * spec.relations_per_cluster;

    // Split the vocabulary: half into per-cluster shared pools, half into
    // per-relation private pools.
    const int cluster_pool = std::max(2, spec.vocab_size / 2 / spec.clusters);
    const int relation_pool = std::max(2, spec.vocab_size / 2 / relations);
    auto cluster_word = [&](int cluster, int j) { return word(cluster * cluster_pool + j); };
    auto relation_word = [&](int rel, int j) {
        return word(spec.clusters * cluster_pool + rel * relation_pool + j);
    };

    std::mt19937_64 rng = substream(spec.seed, "synthetic");
    json corpus_doc = json::object();
    json catalog_doc = json::object();

    for (int c = 0; c < spec.clusters; ++c) {
        for (int r = 0; r < spec.relations_per_cluster; ++r) {
            const int rel = c * spec.relations_per_cluster + r;
            const std::string rel_id = synthetic_relation_id(c, r);

            json instances = json::array();
            for (int inst = 0; inst < spec.instances_per_relation; ++inst) {
                std::vector<std::string> tokens;
                tokens.reserve(spec.sentence_tokens);
                for (int p = 0; p < spec.sentence_tokens; ++p) {
                    if (uniform01(rng) < spec.hardness) {
                        tokens.push_back(cluster_word(c, static_cast<int>(bounded(rng, cluster_pool))));
                    } else {
                        tokens.push_back(relation_word(rel, static_cast<int>(bounded(rng, relation_pool))));
                    }
                }
                const int head = static_cast<int>(bounded(rng, spec.sentence_tokens));
                int tail = static_cast<int>(bounded(rng, spec.sentence_tokens - 1));
                if (tail >= head) ++tail;
                json rec;
                rec["tokens"] = tokens;
                rec["h"] = json::array({tokens[head], "synthetic", json::array({json::array({head})})});
                rec["t"] = json::array({tokens[tail], "synthetic", json::array({json::array({tail})})});
                instances.push_back(std::move(rec));
            }
            corpus_doc[rel_id] = std::move(instances);

            // Name carries a unique token; the description samples the
            // relation's private pool plus a little cluster context.
            std::string name = "relation " + rel_id;
            std::string desc;
            const int desc_rel_words = std::min(6, relation_pool);
            for (int j = 0; j < desc_rel_words; ++j) {
                if (!desc.empty()) desc += ' ';
                desc += relation_word(rel, j);
            }
            for (int j = 0; j < std::min(2, cluster_pool); ++j) {
                desc += ' ';
                desc += cluster_word(c, j);
            }
            catalog_doc[rel_id] = json::array({name, desc});
        }
    }

    SyntheticData out;
    out.corpus_json = corpus_doc.dump();
    out.catalog_json = catalog_doc.dump();
    out.corpus = parse_corpus(out.corpus_json, "synthetic corpus");
    out.catalog = parse_catalog(out.catalog_json, "synthetic catalog");
    return out;
}

}  // namespace hcrp
