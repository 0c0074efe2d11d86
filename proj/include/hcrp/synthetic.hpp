#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hcrp/data.hpp"

namespace hcrp {

// Desk-scale FewRel stand-in. Relations are grouped into clusters; the
// hardness knob is the probability that a token is drawn from the cluster's
// shared pool instead of the relation's private pool, so same-cluster
// relations share token distributions (hard) while cross-cluster relations
// barely overlap (easy).
struct SyntheticSpec {
    int clusters = 8;
    int relations_per_cluster = 3;
    int instances_per_relation = 100;
    int vocab_size = 400;
    double hardness = 0.7;
    std::uint64_t seed = 0;
    int sentence_tokens = 8;  // content tokens per instance, entities included

    void validate() const;
};

struct SyntheticData {
    std::string corpus_json;   // exact external corpus schema, byte-deterministic
    std::string catalog_json;
    Corpus corpus;
    RelationCatalog catalog;
};

SyntheticData make_synthetic_corpus(const SyntheticSpec& spec);

// "c{cluster}_r{index}" — synthetic relation id layout.
std::string synthetic_relation_id(int cluster, int index);
bool looks_synthetic(const Corpus& corpus);

// Relation ids of one cluster, in index order.
std::vector<std::string> synthetic_cluster_relations(const Corpus& corpus, int cluster);

}  // namespace hcrp
