#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "hcrp/eval.hpp"
#include "hcrp/rng.hpp"
#include "hcrp/synthetic.hpp"

#include "test_util.hpp"

using namespace hcrp;

namespace {

SyntheticSpec small_spec(std::uint64_t seed) {
    SyntheticSpec spec;
    spec.clusters = 4;
    spec.relations_per_cluster = 3;
    spec.instances_per_relation = 20;
    spec.vocab_size = 120;
    spec.hardness = 0.7;
    spec.seed = seed;
    return spec;
}

std::set<std::string> token_set(const std::vector<Instance>& list) {
    std::set<std::string> out;
    for (const Instance& inst : list) out.insert(inst.tokens.begin(), inst.tokens.end());
    return out;
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
    std::size_t inter = 0;
    for (const auto& t : a) inter += b.count(t);
    return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

ParamStore zero_store(int vocab_size, int d) {
    auto rng = substream(0, "init");
    ParamStore store = ParamStore::init(vocab_size, d, true, rng);
    for (auto& block : store.blocks) {
        for (double& x : block.data) x = 0.0;
    }
    return store;
}

}  // namespace

TEST_CASE("synthetic corpus is byte-deterministic per seed") {
    const SyntheticData a = make_synthetic_corpus(small_spec(5));
    const SyntheticData b = make_synthetic_corpus(small_spec(5));
    CHECK(a.corpus_json == b.corpus_json);
    CHECK(a.catalog_json == b.catalog_json);
    const SyntheticData c = make_synthetic_corpus(small_spec(6));
    CHECK(a.corpus_json != c.corpus_json);
}

TEST_CASE("synthetic corpus parses back to its in-memory form") {
    const SyntheticData data = make_synthetic_corpus(small_spec(7));
    const Corpus reparsed = parse_corpus(data.corpus_json, "synthetic");
    CHECK(reparsed.size() == data.corpus.size());
    for (const auto& [id, list] : data.corpus) {
        REQUIRE(reparsed.contains(id));
        CHECK(reparsed.at(id).size() == list.size());
    }
    CHECK(looks_synthetic(data.corpus));
    CHECK(synthetic_cluster_relations(data.corpus, 0) ==
          std::vector<std::string>{"c00_r0", "c00_r1", "c00_r2"});
}

TEST_CASE("hardness 0: relations use disjoint token pools") {
    SyntheticSpec spec = small_spec(8);
    spec.hardness = 0.0;
    const SyntheticData data = make_synthetic_corpus(spec);
    std::vector<std::set<std::string>> sets;
    std::vector<std::string> ids;
    for (const auto& [id, list] : data.corpus) {
        sets.push_back(token_set(list));
        ids.push_back(id);
    }
    for (std::size_t i = 0; i < sets.size(); ++i) {
        for (std::size_t j = i + 1; j < sets.size(); ++j) {
            std::size_t inter = 0;
            for (const auto& t : sets[i]) inter += sets[j].count(t);
            INFO(ids[i], " vs ", ids[j]);
            CHECK(inter == 0);
        }
    }
}

TEST_CASE("hardness 1: same-cluster relations overlap heavily") {
    SyntheticSpec spec = small_spec(9);
    spec.hardness = 1.0;
    const SyntheticData data = make_synthetic_corpus(spec);
    const auto cluster = synthetic_cluster_relations(data.corpus, 0);
    REQUIRE(cluster.size() == 3);
    for (std::size_t i = 0; i < cluster.size(); ++i) {
        for (std::size_t j = i + 1; j < cluster.size(); ++j) {
            const double jac = jaccard(token_set(data.corpus.at(cluster[i])),
                                       token_set(data.corpus.at(cluster[j])));
            INFO(cluster[i], " vs ", cluster[j], " jaccard ", jac);
            CHECK(jac > 0.8);
        }
    }
}

TEST_CASE("eval config validation and setting names") {
    EvalConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.episodes = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.episodes = 1;
    cfg.setting = EvalSetting::kCustom;
    cfg.relations = {"only-one"};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    CHECK(parse_eval_setting("hard") == EvalSetting::kHard);
    CHECK(eval_setting_name(EvalSetting::kEasy) == "easy");
    CHECK_THROWS_AS(parse_eval_setting("medium"), ConfigError);
}

TEST_CASE("setting relations: synthetic hard is one cluster, easy crosses clusters") {
    const SyntheticData data = make_synthetic_corpus(small_spec(10));
    EvalConfig cfg;
    cfg.setting = EvalSetting::kHard;
    const auto hard = resolve_setting_relations(cfg, data.corpus, data.catalog);
    CHECK(hard == std::vector<std::string>{"c00_r0", "c00_r1", "c00_r2"});
    cfg.setting = EvalSetting::kEasy;
    const auto easy = resolve_setting_relations(cfg, data.corpus, data.catalog);
    CHECK(easy == std::vector<std::string>{"c00_r0", "c01_r0", "c02_r0"});
}

TEST_CASE("setting relations: FewRel-style names resolve through the catalog") {
    Corpus corpus;
    RelationCatalog catalog;
    const std::vector<std::pair<std::string, std::string>> rels = {
        {"P25", "mother"}, {"P40", "child"}, {"P26", "spouse"}};
    for (const auto& [id, name] : rels) {
        RelationInfo info;
        info.name = split_tokens(name);
        catalog.entries[id] = info;
        for (int i = 0; i < 3; ++i) {
            Instance inst;
            inst.tokens = {"a", "b"};
            inst.head_span = {0, 0};
            inst.tail_span = {1, 1};
            inst.relation_id = id;
            inst.corpus_index = i;
            corpus[id].push_back(inst);
        }
    }
    EvalConfig cfg;
    cfg.setting = EvalSetting::kHard;
    const auto ids = resolve_setting_relations(cfg, corpus, catalog);
    CHECK(ids == std::vector<std::string>{"P25", "P40", "P26"});
    cfg.setting = EvalSetting::kEasy;
    CHECK_THROWS_AS(resolve_setting_relations(cfg, corpus, catalog), DataError);
}

TEST_CASE("degenerate all-zero model scores at the base rate") {
    const SyntheticData data = make_synthetic_corpus(small_spec(11));
    const Vocab vocab = Vocab::build(data.corpus, data.catalog);
    const ParamStore store = zero_store(vocab.size(), 4);
    EvalConfig cfg;
    cfg.n = 5;
    cfg.r = 5;
    cfg.episodes = 400;
    cfg.seed = 3;
    const EvalReport report =
        evaluate(store, vocab, data.catalog, data.corpus, ModelConfig{}, cfg);
    // uniform rows + index-0 tie break: accuracy = frequency of label 0
    CHECK(std::abs(report.accuracy - 0.2) <= 3.0 * report.half_width);
    CHECK(report.queries == 400 * 5);
    CHECK(report.half_width ==
          doctest::Approx(1.96 * std::sqrt(report.accuracy * (1.0 - report.accuracy) /
                                           report.queries))
              .epsilon(1e-12));
}

TEST_CASE("evaluate is deterministic and thread-count independent") {
    const SyntheticData data = make_synthetic_corpus(small_spec(12));
    const Vocab vocab = Vocab::build(data.corpus, data.catalog);
    auto init = substream(12, "init");
    const ParamStore store = ParamStore::init(vocab.size(), 4, true, init);
    EvalConfig cfg;
    cfg.n = 3;
    cfg.r = 3;
    cfg.episodes = 50;
    cfg.seed = 9;
    const EvalReport a = evaluate(store, vocab, data.catalog, data.corpus, ModelConfig{}, cfg);
    const EvalReport b = evaluate(store, vocab, data.catalog, data.corpus, ModelConfig{}, cfg);
    CHECK(a.accuracy == b.accuracy);
    CHECK(a.per_episode_accuracy == b.per_episode_accuracy);
    cfg.threads = 4;
    const EvalReport c = evaluate(store, vocab, data.catalog, data.corpus, ModelConfig{}, cfg);
    CHECK(a.accuracy == c.accuracy);
    CHECK(a.per_episode_accuracy == c.per_episode_accuracy);
    cfg.threads = 1;
    cfg.seed = 10;
    const EvalReport d = evaluate(store, vocab, data.catalog, data.corpus, ModelConfig{}, cfg);
    CHECK(a.per_episode_accuracy != d.per_episode_accuracy);
}

TEST_CASE("single episode with one query is a Bernoulli trial") {
    const SyntheticData data = make_synthetic_corpus(small_spec(13));
    const Vocab vocab = Vocab::build(data.corpus, data.catalog);
    auto init = substream(13, "init");
    const ParamStore store = ParamStore::init(vocab.size(), 4, true, init);
    EvalConfig cfg;
    cfg.n = 2;
    cfg.r = 1;
    cfg.episodes = 1;
    const EvalReport report =
        evaluate(store, vocab, data.catalog, data.corpus, ModelConfig{}, cfg);
    CHECK((report.accuracy == 0.0 || report.accuracy == 1.0));
}

TEST_CASE("easy setting is no worse than hard beyond noise, trained model") {
    const SyntheticData data = make_synthetic_corpus(small_spec(14));
    TrainConfig tc;
    tc.n = 3;
    tc.k = 1;
    tc.r = 3;
    tc.t = 2;
    tc.d = 8;
    tc.max_iters = 300;
    tc.seed = 14;
    const TrainResult trained = train(tc, data.corpus, data.catalog);
    EvalConfig cfg;
    cfg.n = 3;
    cfg.r = 3;
    cfg.episodes = 300;
    cfg.seed = 14;
    cfg.setting = EvalSetting::kEasy;
    const EvalReport easy =
        evaluate(trained.params, trained.vocab, data.catalog, data.corpus, tc.model(), cfg);
    cfg.setting = EvalSetting::kHard;
    const EvalReport hard =
        evaluate(trained.params, trained.vocab, data.catalog, data.corpus, tc.model(), cfg);
    INFO("easy ", easy.accuracy, " hard ", hard.accuracy);
    CHECK(easy.accuracy >= hard.accuracy - 3.0 * hard.half_width);
}

TEST_CASE("compare_ablations: single variant equals a direct evaluate") {
    const SyntheticData data = make_synthetic_corpus(small_spec(15));
    TrainConfig tc;
    tc.n = 3;
    tc.k = 1;
    tc.r = 3;
    tc.t = 1;
    tc.d = 4;
    tc.max_iters = 20;
    EvalConfig ec;
    ec.n = 3;
    ec.r = 3;
    ec.episodes = 40;
    ec.seed = 15;
    const auto rows = compare_ablations(data.corpus, data.catalog, {{"full", tc}}, ec, {15});
    REQUIRE(rows.size() == 1);
    REQUIRE(rows[0].per_seed_accuracy.size() == 1);
    TrainConfig direct = tc;
    direct.seed = 15;
    const TrainResult trained = train(direct, data.corpus, data.catalog);
    const EvalReport rep =
        evaluate(trained.params, trained.vocab, data.catalog, data.corpus, direct.model(), ec);
    CHECK(rows[0].per_seed_accuracy[0] == rep.accuracy);
    CHECK(rows[0].mean == rep.accuracy);
    CHECK(rows[0].stddev == 0.0);
}

TEST_CASE("compare_ablations rejects mismatched dimensions") {
    const SyntheticData data = make_synthetic_corpus(small_spec(16));
    TrainConfig a;
    a.d = 4;
    TrainConfig b = a;
    b.d = 8;
    EvalConfig ec;
    CHECK_THROWS_AS(compare_ablations(data.corpus, data.catalog, {{"a", a}, {"b", b}}, ec, {1}),
                    ConfigError);
}

TEST_CASE("ablation table formatting lists every variant") {
    std::vector<AblationRow> rows(2);
    rows[0].label = "full";
    rows[0].per_seed_accuracy = {0.9, 0.92};
    rows[0].mean = 0.91;
    rows[0].stddev = 0.0141;
    rows[1].label = "no-contrastive";
    rows[1].per_seed_accuracy = {0.88, 0.9};
    rows[1].mean = 0.89;
    rows[1].stddev = 0.0141;
    const std::string table = format_ablation_table(rows);
    CHECK(table.find("full") != std::string::npos);
    CHECK(table.find("no-contrastive") != std::string::npos);
    CHECK(table.find("0.9100") != std::string::npos);
}

TEST_CASE("synthetic spec validation") {
    SyntheticSpec spec;
    CHECK_NOTHROW(spec.validate());
    spec.hardness = 1.5;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec = SyntheticSpec{};
    spec.clusters = 0;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
}
