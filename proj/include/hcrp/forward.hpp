#pragma once

#include <vector>

#include "hcrp/data.hpp"
#include "hcrp/encoder.hpp"
#include "hcrp/losses.hpp"
#include "hcrp/protonet.hpp"

namespace hcrp {

// Loss modes map onto the ablation rows: plain CE, CE with task weights,
// focal, and the full task-adaptive focal loss.
enum class LossMode { kCe, kCeTaskWeights, kFocal, kTaskAdaptiveFocal };

inline bool uses_task_weights(LossMode m) {
    return m == LossMode::kCeTaskWeights || m == LossMode::kTaskAdaptiveFocal;
}
inline double effective_gamma(LossMode m, double gamma) {
    return (m == LossMode::kCe || m == LossMode::kCeTaskWeights) ? 0.0 : gamma;
}

struct ModelConfig {
    double gamma = 1.0;
    double lambda = 1.0;
    LossMode loss_mode = LossMode::kTaskAdaptiveFocal;
    bool use_local = true;
    bool use_global = true;
    bool use_contrastive = true;
    ContrastiveMode contrastive_mode = ContrastiveMode::kExp;
    // s^tau is a constant weight by default; enable to differentiate through
    // the similarity matrices as well.
    bool grad_through_weights = false;
    bool names_only = false;  // drop relation descriptions (FewRel 2.0 mode)

    HybridLayout layout() const { return {use_global, use_local}; }
};

template <class S>
EncodedEpisode<S> encode_episode(const ParamSet<S>& params, const Vocab& vocab,
                                 const RelationCatalog& catalog, const Episode& ep,
                                 const ModelConfig& cfg, const FrozenStore* frozen = nullptr,
                                 ad::Tape* tape = nullptr) {
    const int n = ep.n();
    const int k = ep.k();
    const int r = ep.r();
    EncodedEpisode<S> enc;
    enc.support_emb.resize(n);
    enc.support_global.resize(n);
    auto encode_inst = [&](const Instance& inst) {
        if (frozen) return lift_frozen<S>(frozen->at(FrozenStore::instance_key(inst)), tape);
        return encode_instance(params, vocab, inst);
    };
    for (int i = 0; i < n; ++i) {
        enc.support_emb[i].reserve(k);
        enc.support_global[i].reserve(k);
        for (int j = 0; j < k; ++j) {
            enc.support_emb[i].push_back(encode_inst(ep.support[i][j]));
            enc.support_global[i].push_back(global_instance_feature(enc.support_emb[i][j]));
        }
        if (frozen) {
            enc.relation_emb.push_back(
                lift_frozen<S>(frozen->at(FrozenStore::relation_key(ep.relation_ids[i])), tape));
        } else {
            RelationInfo info = catalog.at(ep.relation_ids[i]);
            if (cfg.names_only) info.description.clear();
            enc.relation_emb.push_back(encode_relation(params, vocab, info));
        }
        enc.relation_global.push_back(global_relation_feature(params, enc.relation_emb[i]));
    }
    enc.query_emb.reserve(r);
    enc.query_global.reserve(r);
    for (int j = 0; j < r; ++j) {
        enc.query_emb.push_back(encode_inst(ep.query[j].first));
        enc.query_global.push_back(global_instance_feature(enc.query_emb[j]));
    }
    return enc;
}

template <class S>
struct EpisodeForward {
    HybridReps<S> reps;
    std::vector<std::vector<S>> probs;  // R x N
    std::vector<S> focal_terms;         // per query, unweighted
    S frob_norm{};                      // ||S^tau||_F
    bool has_contrastive = false;
    S contrastive{};
};

template <class S>
EpisodeForward<S> forward_episode(const ParamSet<S>& params, const Vocab& vocab,
                                  const RelationCatalog& catalog, const Episode& ep,
                                  const ModelConfig& cfg, const FrozenStore* frozen = nullptr,
                                  ad::Tape* tape = nullptr) {
    EpisodeForward<S> out;
    const EncodedEpisode<S> enc = encode_episode(params, vocab, catalog, ep, cfg, frozen, tape);
    out.reps = assemble_hybrid(enc, cfg.layout());
    out.probs = score_queries(out.reps);
    const double gamma = effective_gamma(cfg.loss_mode, cfg.gamma);
    out.focal_terms.reserve(ep.r());
    for (int j = 0; j < ep.r(); ++j) {
        out.focal_terms.push_back(focal_loss(out.probs[j], ep.query[j].second, gamma));
    }
    // c^i = [r_h^i; p_h^i]
    std::vector<std::vector<S>> class_reps(ep.n());
    for (int i = 0; i < ep.n(); ++i) {
        class_reps[i] = concat(out.reps.relation_hybrid[i], out.reps.proto_hybrid[i]);
    }
    out.frob_norm = frobenius_norm(task_similarity_matrix(class_reps));
    if (cfg.use_contrastive && ep.n() >= 2) {
        out.contrastive = contrastive_loss(out.reps, cfg.contrastive_mode);
        out.has_contrastive = true;
    }
    return out;
}

template <class S>
struct BatchForward {
    S total{};
    LossBreakdown breakdown;
    std::vector<EpisodeForward<S>> episodes;
};

template <class S>
BatchForward<S> forward_batch(const ParamSet<S>& params, const Vocab& vocab,
                              const RelationCatalog& catalog, const std::vector<Episode>& episodes,
                              const ModelConfig& cfg, const FrozenStore* frozen = nullptr,
                              ad::Tape* tape = nullptr) {
    using ad::value;
    if (episodes.empty()) throw ConfigError("empty episode batch");
    const int t = static_cast<int>(episodes.size());

    BatchForward<S> out;
    out.episodes.reserve(t);
    int total_queries = 0;
    for (const Episode& ep : episodes) {
        out.episodes.push_back(forward_episode(params, vocab, catalog, ep, cfg, frozen, tape));
        total_queries += ep.r();
    }

    LossBreakdown& br = out.breakdown;
    br.gamma = effective_gamma(cfg.loss_mode, cfg.gamma);
    br.lambda = cfg.use_contrastive ? cfg.lambda : 0.0;

    // Task weights: softmax over Frobenius norms when the loss mode uses
    // them, otherwise 1 per episode.
    std::vector<S> frob;
    frob.reserve(t);
    for (const auto& e : out.episodes) {
        frob.push_back(e.frob_norm);
        br.frob_norms.push_back(value(e.frob_norm));
    }
    std::vector<S> weights_s;
    std::vector<double> weights_v(t, 1.0);
    if (uses_task_weights(cfg.loss_mode)) {
        weights_s = task_weights(frob);
        for (int i = 0; i < t; ++i) weights_v[i] = value(weights_s[i]);
    }
    br.task_weight = weights_v;

    S focal_raw{};
    bool first = true;
    for (int i = 0; i < t; ++i) {
        const auto& e = out.episodes[i];
        S ep_sum = e.focal_terms[0];
        for (std::size_t j = 1; j < e.focal_terms.size(); ++j) ep_sum = ep_sum + e.focal_terms[j];
        S weighted = (uses_task_weights(cfg.loss_mode) && cfg.grad_through_weights)
                         ? weights_s[i] * ep_sum
                         : weights_v[i] * ep_sum;
        br.per_episode_focal.push_back(value(weighted));
        focal_raw = first ? weighted : focal_raw + weighted;
        first = false;

        std::vector<double> ce_terms;
        ce_terms.reserve(e.probs.size());
        for (std::size_t j = 0; j < e.probs.size(); ++j) {
            ce_terms.push_back(value(cross_entropy(e.probs[j], episodes[i].query[j].second)));
        }
        br.per_query_ce.push_back(std::move(ce_terms));
    }

    S task_focal = focal_raw * (1.0 / total_queries);
    br.task_focal_raw = value(focal_raw);
    br.task_focal = value(task_focal);

    if (cfg.use_contrastive) {
        S contrastive_raw{};
        bool any = false;
        for (const auto& e : out.episodes) {
            if (!e.has_contrastive) continue;
            contrastive_raw = any ? contrastive_raw + e.contrastive : e.contrastive;
            any = true;
        }
        if (any) {
            S contrastive = contrastive_raw * (1.0 / t);
            br.contrastive_raw = value(contrastive_raw);
            br.contrastive = value(contrastive);
            out.total = task_focal + cfg.lambda * contrastive;
        } else {
            out.total = task_focal;
        }
    } else {
        out.total = task_focal;
    }
    br.total = value(out.total);
    return out;
}

}  // namespace hcrp
