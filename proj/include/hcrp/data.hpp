#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "hcrp/errors.hpp"

namespace hcrp {

// Inclusive 0-based token span.
struct TokenSpan {
    int start = 0;
    int end = 0;
};

struct Instance {
    std::vector<std::string> tokens;
    TokenSpan head_span;
    TokenSpan tail_span;
    std::string relation_id;
    // Position within the relation's corpus list; instance identity for
    // support/query disjointness and frozen-embedding keys.
    int corpus_index = -1;
};

// Ordered so iteration is deterministic.
using Corpus = std::map<std::string, std::vector<Instance>>;

struct RelationInfo {
    std::vector<std::string> name;
    std::vector<std::string> description;  // empty == absent (name-only mode)
    bool has_description() const { return !description.empty(); }
};

struct RelationCatalog {
    std::map<std::string, RelationInfo> entries;

    const RelationInfo& at(const std::string& id) const {
        auto it = entries.find(id);
        if (it == entries.end()) throw DataError("unknown relation id in catalog: " + id);
        return it->second;
    }
};

struct Episode {
    std::vector<std::string> relation_ids;            // N distinct ids
    std::vector<std::vector<Instance>> support;       // N x K
    std::vector<std::pair<Instance, int>> query;      // R (instance, label index)

    int n() const { return static_cast<int>(relation_ids.size()); }
    int k() const { return support.empty() ? 0 : static_cast<int>(support[0].size()); }
    int r() const { return static_cast<int>(query.size()); }
};

enum class QuerySampling {
    kUniform,   // class uniform, then instance uniform (default)
    kBalanced,  // round-robin over classes
};

void validate_instance(const Instance& inst, const std::string& context);

Corpus load_corpus(const std::filesystem::path& path);
Corpus parse_corpus(const std::string& text, const std::string& origin);

RelationCatalog load_catalog(const std::filesystem::path& path);
RelationCatalog parse_catalog(const std::string& text, const std::string& origin);

// N distinct relations, K support per relation without replacement, R query
// instances from the remaining data of the N classes. Deterministic per rng state.
Episode sample_episode(const Corpus& corpus, int n, int k, int r, std::mt19937_64& rng,
                       QuerySampling mode = QuerySampling::kUniform);

// Relations fixed as given, instances resampled per call (easy/hard settings).
Episode fixed_episode(const Corpus& corpus, const std::vector<std::string>& relation_ids, int k,
                      int r, std::mt19937_64& rng, QuerySampling mode = QuerySampling::kUniform);

// Whitespace tokenization for relation names/descriptions.
std::vector<std::string> split_tokens(const std::string& text);

}  // namespace hcrp
