#include "hcrp/eval.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

#include "hcrp/rng.hpp"
#include "hcrp/synthetic.hpp"

namespace hcrp {

EvalSetting parse_eval_setting(const std::string& name) {
    if (name == "random") return EvalSetting::kRandom;
    if (name == "easy") return EvalSetting::kEasy;
    if (name == "hard") return EvalSetting::kHard;
    if (name == "custom") return EvalSetting::kCustom;
    throw ConfigError("unknown eval setting: " + name + " (expected random|easy|hard|custom)");
}

std::string eval_setting_name(EvalSetting s) {
    switch (s) {
        case EvalSetting::kRandom: return "random";
        case EvalSetting::kEasy: return "easy";
        case EvalSetting::kHard: return "hard";
        case EvalSetting::kCustom: return "custom";
    }
    return "?";
}

void EvalConfig::validate() const {
    if (episodes < 1) throw ConfigError("episode count must be at least 1");
    if (n < 1 || k < 1 || r < 1) throw ConfigError("n, k, r must all be positive");
    if (setting == EvalSetting::kCustom && relations.size() < 2) {
        throw ConfigError("custom setting requires at least 2 relation ids");
    }
    if (threads < 1) throw ConfigError("threads must be positive");
}

namespace {

// Fixed 3-way triples for FewRel-style corpora, matched by relation name:
// the hard triple is three kinship relations, the easy one is unrelated.
const std::vector<std::string> kHardNames = {"mother", "child", "spouse"};
const std::vector<std::string> kEasyNames = {"crosses", "constellation", "military rank"};

std::string joined_name(const RelationInfo& info) {
    std::string out;
    for (const auto& t : info.name) {
        if (!out.empty()) out += ' ';
        out += t;
    }
    return out;
}

std::vector<std::string> relations_by_name(const Corpus& corpus, const RelationCatalog& catalog,
                                           const std::vector<std::string>& names) {
    std::vector<std::string> ids;
    for (const auto& want : names) {
        bool found = false;
        for (const auto& [id, info] : catalog.entries) {
            if (joined_name(info) == want && corpus.contains(id)) {
                ids.push_back(id);
                found = true;
                break;
            }
        }
        if (!found) throw DataError("no corpus relation named '" + want + "' for this setting");
    }
    return ids;
}

}  // namespace

std::vector<std::string> resolve_setting_relations(const EvalConfig& cfg, const Corpus& corpus,
                                                   const RelationCatalog& catalog) {
    switch (cfg.setting) {
        case EvalSetting::kRandom:
            return {};
        case EvalSetting::kCustom:
            return cfg.relations;
        case EvalSetting::kHard:
            if (looks_synthetic(corpus)) {
                // Same-cluster relations share token distributions.
                std::vector<std::string> ids = synthetic_cluster_relations(corpus, 0);
                if (static_cast<int>(ids.size()) > 3) ids.resize(3);
                if (ids.size() < 2) throw DataError("synthetic corpus has no multi-relation cluster");
                return ids;
            }
            return relations_by_name(corpus, catalog, kHardNames);
        case EvalSetting::kEasy:
            if (looks_synthetic(corpus)) {
                std::vector<std::string> ids;
                for (int c = 0; c < 64 && ids.size() < 3; ++c) {
                    const auto cluster = synthetic_cluster_relations(corpus, c);
                    if (!cluster.empty()) ids.push_back(cluster.front());
                }
                if (ids.size() < 2) throw DataError("synthetic corpus has too few clusters");
                return ids;
            }
            return relations_by_name(corpus, catalog, kEasyNames);
    }
    return {};
}

EvalReport evaluate(const ParamStore& params, const Vocab& vocab, const RelationCatalog& catalog,
                    const Corpus& corpus, const ModelConfig& model_cfg, const EvalConfig& cfg,
                    const FrozenStore* frozen) {
    cfg.validate();
    const QuerySampling qmode =
        cfg.balanced_queries ? QuerySampling::kBalanced : QuerySampling::kUniform;
    const std::vector<std::string> fixed = resolve_setting_relations(cfg, corpus, catalog);

    // Episodes are sampled up front on one stream so the report is
    // deterministic regardless of thread count.
    std::mt19937_64 rng = substream(cfg.seed, "eval");
    std::vector<Episode> episodes;
    episodes.reserve(cfg.episodes);
    for (int e = 0; e < cfg.episodes; ++e) {
        if (fixed.empty()) {
            episodes.push_back(sample_episode(corpus, cfg.n, cfg.k, cfg.r, rng, qmode));
        } else {
            episodes.push_back(fixed_episode(corpus, fixed, cfg.k, cfg.r, rng, qmode));
        }
    }

    const ParamSet<double> values = value_params(params);
    std::vector<double> per_episode(episodes.size(), 0.0);
    std::vector<long> per_episode_correct(episodes.size(), 0);
    auto run_range = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t e = lo; e < hi; ++e) {
            const Episode& ep = episodes[e];
            // Scoring needs only the probability rows, so the loss terms
            // (and their degenerate-representation diagnostics) are skipped.
            const EncodedEpisode<double> enc =
                encode_episode(values, vocab, catalog, ep, model_cfg, frozen);
            const auto probs = score_queries(assemble_hybrid(enc, model_cfg.layout()));
            long correct = 0;
            for (int j = 0; j < ep.r(); ++j) {
                if (predict(probs[j]) == ep.query[j].second) ++correct;
            }
            per_episode_correct[e] = correct;
            per_episode[e] = static_cast<double>(correct) / ep.r();
        }
    };
    if (cfg.threads <= 1) {
        run_range(0, episodes.size());
    } else {
        std::vector<std::future<void>> futures;
        const std::size_t chunk = (episodes.size() + cfg.threads - 1) / cfg.threads;
        for (int t = 0; t < cfg.threads; ++t) {
            const std::size_t lo = std::min(episodes.size(), t * chunk);
            const std::size_t hi = std::min(episodes.size(), lo + chunk);
            if (lo < hi) futures.push_back(std::async(std::launch::async, run_range, lo, hi));
        }
        for (auto& f : futures) f.get();
    }

    EvalReport report;
    report.episodes = cfg.episodes;
    report.setting = eval_setting_name(cfg.setting);
    report.relations = fixed;
    report.per_episode_accuracy = std::move(per_episode);
    for (const Episode& ep : episodes) report.queries += ep.r();
    for (long c : per_episode_correct) report.correct += c;
    report.accuracy = static_cast<double>(report.correct) / static_cast<double>(report.queries);
    report.half_width =
        1.96 * std::sqrt(report.accuracy * (1.0 - report.accuracy) / static_cast<double>(report.queries));
    return report;
}

std::vector<AblationRow> compare_ablations(const Corpus& corpus, const RelationCatalog& catalog,
                                           const std::vector<std::pair<std::string, TrainConfig>>& variants,
                                           const EvalConfig& eval_cfg,
                                           const std::vector<std::uint64_t>& seeds,
                                           const Corpus* eval_corpus) {
    if (variants.empty()) throw ConfigError("no ablation variants given");
    if (seeds.empty()) throw ConfigError("no seeds given");
    for (const auto& [label, cfg] : variants) {
        if (cfg.n != variants[0].second.n || cfg.k != variants[0].second.k ||
            cfg.d != variants[0].second.d) {
            throw ConfigError("ablation variants must share n, k, d (variant '" + label + "' differs)");
        }
    }
    std::vector<AblationRow> rows;
    for (const auto& [label, base_cfg] : variants) {
        AblationRow row;
        row.label = label;
        for (std::uint64_t seed : seeds) {
            TrainConfig cfg = base_cfg;
            cfg.seed = seed;
            const TrainResult trained = train(cfg, corpus, catalog);
            const Corpus& ec = eval_corpus ? *eval_corpus : corpus;
            const EvalReport rep =
                evaluate(trained.params, trained.vocab, catalog, ec, cfg.model(), eval_cfg);
            row.per_seed_accuracy.push_back(rep.accuracy);
        }
        double sum = 0.0;
        for (double a : row.per_seed_accuracy) sum += a;
        row.mean = sum / row.per_seed_accuracy.size();
        double sq = 0.0;
        for (double a : row.per_seed_accuracy) sq += (a - row.mean) * (a - row.mean);
        row.stddev = row.per_seed_accuracy.size() > 1
                         ? std::sqrt(sq / (row.per_seed_accuracy.size() - 1))
                         : 0.0;
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string format_ablation_table(const std::vector<AblationRow>& rows) {
    std::ostringstream out;
    std::size_t width = 8;
    for (const auto& r : rows) width = std::max(width, r.label.size());
    out << std::left;
    out.setf(std::ios::fixed);
    out.precision(4);
    out << "variant";
    for (std::size_t i = 7; i < width; ++i) out << ' ';
    out << "  mean_acc  stddev  per_seed\n";
    for (const auto& r : rows) {
        out << r.label;
        for (std::size_t i = r.label.size(); i < width; ++i) out << ' ';
        out << "  " << r.mean << "    " << r.stddev << "  ";
        for (std::size_t i = 0; i < r.per_seed_accuracy.size(); ++i) {
            if (i) out << ',';
            out << r.per_seed_accuracy[i];
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace hcrp
