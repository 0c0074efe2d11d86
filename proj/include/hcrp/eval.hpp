#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hcrp/forward.hpp"
#include "hcrp/training.hpp"

namespace hcrp {

enum class EvalSetting { kRandom, kEasy, kHard, kCustom };

EvalSetting parse_eval_setting(const std::string& name);
std::string eval_setting_name(EvalSetting s);

struct EvalConfig {
    EvalSetting setting = EvalSetting::kRandom;
    std::vector<std::string> relations;  // custom setting
    int n = 5;
    int k = 1;
    int r = 5;
    int episodes = 10000;
    std::uint64_t seed = 0;
    bool balanced_queries = false;
    int threads = 1;

    void validate() const;
};

struct EvalReport {
    double accuracy = 0.0;
    double half_width = 0.0;  // 1.96 * sqrt(a(1-a)/n_queries)
    int episodes = 0;
    long queries = 0;
    long correct = 0;
    std::vector<double> per_episode_accuracy;
    std::string setting;
    std::vector<std::string> relations;  // fixed relations, when applicable
};

// Relation ids behind the easy/hard settings: same-cluster vs cross-cluster
// triples on synthetic corpora, the fixed name triples on FewRel-style data.
std::vector<std::string> resolve_setting_relations(const EvalConfig& cfg, const Corpus& corpus,
                                                   const RelationCatalog& catalog);

EvalReport evaluate(const ParamStore& params, const Vocab& vocab, const RelationCatalog& catalog,
                    const Corpus& corpus, const ModelConfig& model_cfg, const EvalConfig& cfg,
                    const FrozenStore* frozen = nullptr);

struct AblationRow {
    std::string label;
    std::vector<double> per_seed_accuracy;
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation over seeds
};

// Trains each variant on shared seeds and evaluates under one shared config.
std::vector<AblationRow> compare_ablations(const Corpus& corpus, const RelationCatalog& catalog,
                                           const std::vector<std::pair<std::string, TrainConfig>>& variants,
                                           const EvalConfig& eval_cfg,
                                           const std::vector<std::uint64_t>& seeds,
                                           const Corpus* eval_corpus = nullptr);

std::string format_ablation_table(const std::vector<AblationRow>& rows);

}  // namespace hcrp
