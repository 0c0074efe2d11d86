#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "hcrp/data.hpp"
#include "hcrp/matrix.hpp"
#include "hcrp/params.hpp"

namespace hcrp {

// Contextual token embeddings plus the marker rows downstream features read.
template <class S>
struct TokenEmbeddings {
    Mat<S> m;       // l x d
    int cls = -1;   // relations only
    int head = -1;  // instance <H> marker row
    int tail = -1;  // instance <T> marker row
};

template <class S>
S constant_like(double v, ad::Tape*);
template <>
inline double constant_like<double>(double v, ad::Tape*) {
    return v;
}
template <>
inline ad::Var constant_like<ad::Var>(double v, ad::Tape* tape) {
    return ad::constant(*tape, v);
}

// C = A (l x d) * B (d x d), row-major.
template <class S>
Mat<S> matmul_square(const Mat<S>& a, const std::vector<S>& b, int d) {
    Mat<S> c(a.rows, d);
    for (int i = 0; i < a.rows; ++i) {
        for (int j = 0; j < d; ++j) {
            S acc = a.at(i, 0) * b[j];
            for (int k = 1; k < d; ++k) acc = acc + a.at(i, k) * b[static_cast<std::size_t>(k) * d + j];
            c.at(i, j) = acc;
        }
    }
    return c;
}

// Single-head self-attention with a residual connection:
//   Y = X + softmax(X Wq (X Wk)^T / sqrt(d)) X Wv
template <class S>
Mat<S> mixing_layer(const ParamSet<S>& p, const Mat<S>& x) {
    const int d = p.d;
    const Mat<S> q = matmul_square(x, p.wq, d);
    const Mat<S> k = matmul_square(x, p.wk, d);
    const Mat<S> v = matmul_square(x, p.wv, d);
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    Mat<S> y(x.rows, d);
    for (int i = 0; i < x.rows; ++i) {
        std::vector<S> logits;
        logits.reserve(x.rows);
        for (int j = 0; j < x.rows; ++j) logits.push_back(dot(q.row(i), k.row(j)) * scale);
        const std::vector<S> alpha = softmax(logits);
        for (int c = 0; c < d; ++c) {
            S acc = alpha[0] * v.at(0, c);
            for (int j = 1; j < x.rows; ++j) acc = acc + alpha[j] * v.at(j, c);
            y.at(i, c) = x.at(i, c) + acc;
        }
    }
    return y;
}

template <class S>
Mat<S> embed_ids(const ParamSet<S>& p, const std::vector<int>& ids) {
    Mat<S> m(static_cast<int>(ids.size()), p.d);
    for (int i = 0; i < m.rows; ++i) {
        const std::size_t base = static_cast<std::size_t>(ids[i]) * p.d;
        for (int c = 0; c < p.d; ++c) m.at(i, c) = p.emb[base + c];
    }
    return m;
}

// Token ids with entity markers inserted; outputs the marker row positions.
std::vector<int> marked_ids(const Vocab& vocab, const Instance& inst, int* head_pos, int* tail_pos);

// l = len(tokens) + 4 markers; no CLS slot for instances.
template <class S>
TokenEmbeddings<S> encode_instance(const ParamSet<S>& p, const Vocab& vocab, const Instance& inst) {
    TokenEmbeddings<S> out;
    const std::vector<int> ids = marked_ids(vocab, inst, &out.head, &out.tail);
    out.m = embed_ids(p, ids);
    if (p.has_mixing) out.m = mixing_layer(p, out.m);
    return out;
}

// [CLS] + name + description; description omitted when absent.
template <class S>
TokenEmbeddings<S> encode_relation(const ParamSet<S>& p, const Vocab& vocab, const RelationInfo& info) {
    std::vector<int> ids;
    ids.push_back(Vocab::kCls);
    for (const auto& t : info.name) ids.push_back(vocab.id(t));
    for (const auto& t : info.description) ids.push_back(vocab.id(t));
    TokenEmbeddings<S> out;
    out.cls = 0;
    out.m = embed_ids(p, ids);
    if (p.has_mixing) out.m = mixing_layer(p, out.m);
    return out;
}

// [row(head); row(tail)], size 2d.
template <class S>
std::vector<S> global_instance_feature(const TokenEmbeddings<S>& emb) {
    return concat(emb.m.row(emb.head), emb.m.row(emb.tail));
}

// W_rel * row(cls) + b_rel, size 2d.
template <class S>
std::vector<S> global_relation_feature(const ParamSet<S>& p, const TokenEmbeddings<S>& emb) {
    const auto cls = emb.m.row(emb.cls);
    const int d = p.d;
    std::vector<S> out;
    out.reserve(2 * d);
    for (int i = 0; i < 2 * d; ++i) {
        S acc = p.b_rel[i];
        for (int j = 0; j < d; ++j) acc = acc + p.w_rel[static_cast<std::size_t>(i) * d + j] * cls[j];
        out.push_back(acc);
    }
    return out;
}

// Precomputed token-embedding matrices keyed by instance / relation id.
// Matrices are constants: a frozen encoder contributes no gradients.
class FrozenStore {
public:
    struct Record {
        Mat<double> m;
        int cls = -1;
        int head = -1;
        int tail = -1;
    };

    static std::string instance_key(const Instance& inst) {
        return inst.relation_id + "#" + std::to_string(inst.corpus_index);
    }
    static std::string relation_key(const std::string& rel_id) { return "rel#" + rel_id; }

    static FrozenStore load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    void add(const std::string& key, Record rec);
    const Record& at(const std::string& key) const;
    int d() const { return d_; }
    std::size_t size() const { return records_.size(); }

private:
    int d_ = 0;
    std::map<std::string, Record> records_;
};

template <class S>
TokenEmbeddings<S> lift_frozen(const FrozenStore::Record& rec, ad::Tape* tape) {
    TokenEmbeddings<S> out;
    out.cls = rec.cls;
    out.head = rec.head;
    out.tail = rec.tail;
    out.m = Mat<S>(rec.m.rows, rec.m.cols);
    for (std::size_t i = 0; i < rec.m.a.size(); ++i) out.m.a[i] = constant_like<S>(rec.m.a[i], tape);
    return out;
}

}  // namespace hcrp
