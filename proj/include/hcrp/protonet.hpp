#pragma once

#include <vector>

#include "hcrp/encoder.hpp"
#include "hcrp/matrix.hpp"

namespace hcrp {

// Per-episode encodings: token matrices plus the derived global features.
template <class S>
struct EncodedEpisode {
    std::vector<std::vector<TokenEmbeddings<S>>> support_emb;  // N x K
    std::vector<TokenEmbeddings<S>> query_emb;                 // R
    std::vector<TokenEmbeddings<S>> relation_emb;              // N
    std::vector<std::vector<std::vector<S>>> support_global;   // N x K, 2d
    std::vector<std::vector<S>> relation_global;               // N, 2d
    std::vector<std::vector<S>> query_global;                  // R, 2d

    int n() const { return static_cast<int>(relation_emb.size()); }
    int k() const { return support_emb.empty() ? 0 : static_cast<int>(support_emb[0].size()); }
    int r() const { return static_cast<int>(query_emb.size()); }
};

// Hybrid representations plus the intermediates the losses reuse.
template <class S>
struct HybridReps {
    std::vector<std::vector<S>> proto_hybrid;     // N, layout [global; local]
    std::vector<std::vector<S>> query_hybrid;     // R
    std::vector<std::vector<S>> relation_hybrid;  // N
    std::vector<std::vector<S>> proto_global;     // N, 2d
    std::vector<std::vector<S>> proto_local;      // N, d
    std::vector<std::vector<S>> relation_local;   // N, d
    std::vector<std::vector<S>> query_local;      // R, d

    int n() const { return static_cast<int>(proto_hybrid.size()); }
    int r() const { return static_cast<int>(query_hybrid.size()); }
};

// Mean of the K support globals plus the relation global.
template <class S>
std::vector<S> global_prototype(const std::vector<std::vector<S>>& support_global,
                                const std::vector<S>& relation_global) {
    const int k = static_cast<int>(support_global.size());
    const std::size_t dim = relation_global.size();
    std::vector<S> out;
    out.reserve(dim);
    for (std::size_t c = 0; c < dim; ++c) {
        S acc = support_global[0][c];
        for (int i = 1; i < k; ++i) acc = acc + support_global[i][c];
        out.push_back(acc * (1.0 / k) + relation_global[c]);
    }
    return out;
}

// Attention-pool the rows of `target` with weights from row-sums of
// target * context^T: alpha = softmax(sum(target context^T)), out = alpha^T target.
template <class S>
std::vector<S> attention_pool(const Mat<S>& target, const Mat<S>& context) {
    std::vector<S> logits;
    logits.reserve(target.rows);
    for (int i = 0; i < target.rows; ++i) {
        S acc = dot(target.row(i), context.row(0));
        for (int j = 1; j < context.rows; ++j) acc = acc + dot(target.row(i), context.row(j));
        logits.push_back(acc);
    }
    const std::vector<S> alpha = softmax(logits);
    std::vector<S> out;
    out.reserve(target.cols);
    for (int c = 0; c < target.cols; ++c) {
        S acc = alpha[0] * target.at(0, c);
        for (int i = 1; i < target.rows; ++i) acc = acc + alpha[i] * target.at(i, c);
        out.push_back(acc);
    }
    return out;
}

// Tokens weighted by similarity with the relation embedding.
template <class S>
std::vector<S> local_support_feature(const Mat<S>& support_emb, const Mat<S>& relation_emb) {
    return attention_pool(support_emb, relation_emb);
}

// Per-support attention pooling of the relation embedding, averaged over K.
template <class S>
std::vector<S> local_relation_feature(const Mat<S>& relation_emb,
                                      const std::vector<const Mat<S>*>& support_embs) {
    const int k = static_cast<int>(support_embs.size());
    std::vector<S> out = attention_pool(relation_emb, *support_embs[0]);
    for (int i = 1; i < k; ++i) {
        const std::vector<S> r_k = attention_pool(relation_emb, *support_embs[i]);
        for (std::size_t c = 0; c < out.size(); ++c) out[c] = out[c] + r_k[c];
    }
    for (S& v : out) v = v * (1.0 / k);
    return out;
}

// Self-attention pooling of the query tokens.
template <class S>
std::vector<S> local_query_feature(const Mat<S>& query_emb) {
    return attention_pool(query_emb, query_emb);
}

// Mean of the K local support features plus the relation local feature.
template <class S>
std::vector<S> local_prototype(const std::vector<std::vector<S>>& local_support,
                               const std::vector<S>& relation_local) {
    return global_prototype(local_support, relation_local);
}

// Which halves of the hybrid representation are active (ablation switches).
struct HybridLayout {
    bool use_global = true;
    bool use_local = true;
};

template <class S>
std::vector<S> hybrid_concat(const std::vector<S>& global_part, const std::vector<S>& local_part,
                             const HybridLayout& layout) {
    if (layout.use_global && layout.use_local) return concat(global_part, local_part);
    if (layout.use_global) return global_part;
    return local_part;
}

template <class S>
HybridReps<S> assemble_hybrid(const EncodedEpisode<S>& enc, const HybridLayout& layout = {}) {
    const int n = enc.n();
    const int k = enc.k();
    const int r = enc.r();
    HybridReps<S> reps;
    reps.proto_global.resize(n);
    reps.proto_local.resize(n);
    reps.relation_local.resize(n);
    reps.proto_hybrid.resize(n);
    reps.relation_hybrid.resize(n);
    for (int i = 0; i < n; ++i) {
        reps.proto_global[i] = global_prototype(enc.support_global[i], enc.relation_global[i]);
        std::vector<std::vector<S>> local_support(k);
        std::vector<const Mat<S>*> support_mats(k);
        for (int j = 0; j < k; ++j) {
            local_support[j] = local_support_feature(enc.support_emb[i][j].m, enc.relation_emb[i].m);
            support_mats[j] = &enc.support_emb[i][j].m;
        }
        reps.relation_local[i] = local_relation_feature(enc.relation_emb[i].m, support_mats);
        reps.proto_local[i] = local_prototype(local_support, reps.relation_local[i]);
        reps.proto_hybrid[i] = hybrid_concat(reps.proto_global[i], reps.proto_local[i], layout);
        reps.relation_hybrid[i] = hybrid_concat(enc.relation_global[i], reps.relation_local[i], layout);
    }
    reps.query_local.resize(r);
    reps.query_hybrid.resize(r);
    for (int j = 0; j < r; ++j) {
        reps.query_local[j] = local_query_feature(enc.query_emb[j].m);
        reps.query_hybrid[j] = hybrid_concat(enc.query_global[j], reps.query_local[j], layout);
    }
    return reps;
}

// Softmax over prototype dot products, one probability row per query.
template <class S>
std::vector<std::vector<S>> score_queries(const HybridReps<S>& reps) {
    const int n = reps.n();
    const int r = reps.r();
    std::vector<std::vector<S>> probs(r);
    for (int j = 0; j < r; ++j) {
        std::vector<S> logits;
        logits.reserve(n);
        for (int i = 0; i < n; ++i) logits.push_back(dot(reps.query_hybrid[j], reps.proto_hybrid[i]));
        probs[j] = softmax(logits);
    }
    return probs;
}

// Argmax with ties broken toward the lowest index.
template <class S>
int predict(const std::vector<S>& prob_row) {
    using ad::value;
    int best = 0;
    double best_v = value(prob_row[0]);
    for (int i = 1; i < static_cast<int>(prob_row.size()); ++i) {
        if (value(prob_row[i]) > best_v) {
            best = i;
            best_v = value(prob_row[i]);
        }
    }
    return best;
}

}  // namespace hcrp
