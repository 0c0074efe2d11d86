#pragma once

#include <cmath>
#include <vector>

#include "hcrp/matrix.hpp"
#include "hcrp/protonet.hpp"

namespace hcrp {

// z_y clamp inside logs; shared by cross entropy and focal loss.
inline constexpr double kProbClamp = 1e-12;

enum class ContrastiveMode {
    kExp,     // u = exp(dot), per-anchor max-subtraction (default)
    kStrict,  // u = raw dot, as written; domain error on nonpositive terms
};

// Relation anchors vs. prototypes: per anchor i, the positive is p_h^i and
// the negatives are p_h^n (n != i); summed over anchors.
template <class S>
S contrastive_loss(const HybridReps<S>& reps, ContrastiveMode mode = ContrastiveMode::kExp) {
    using ad::value;
    using std::exp;
    using std::log;
    const int n = reps.n();
    if (n < 2) throw ConfigError("contrastive loss needs N >= 2");
    S total{};
    bool first = true;
    for (int i = 0; i < n; ++i) {
        std::vector<S> dots;
        dots.reserve(n);
        for (int m = 0; m < n; ++m) dots.push_back(dot(reps.proto_hybrid[m], reps.relation_hybrid[i]));
        S term{};
        if (mode == ContrastiveMode::kExp) {
            double mx = value(dots[0]);
            for (const S& u : dots) mx = std::max(mx, value(u));
            std::vector<S> e;
            e.reserve(n);
            for (const S& u : dots) e.push_back(exp(u - mx));
            term = -log(e[i] / sum(std::span<const S>(e)));
        } else {
            for (const S& u : dots) {
                if (value(u) <= 0.0) {
                    throw NumericError("strict contrastive mode: nonpositive similarity u=" +
                                       std::to_string(value(u)) + " at anchor " + std::to_string(i));
                }
            }
            const S denom = sum(std::span<const S>(dots));
            term = -log(dots[i] / denom);
        }
        total = first ? term : total + term;
        first = false;
    }
    return total;
}

template <class S>
S cross_entropy(const std::vector<S>& prob_row, int label) {
    using ad::clamp_min;
    using std::log;
    return -log(clamp_min(prob_row[label], kProbClamp));
}

// -(1 - z_y)^gamma * log(z_y); gamma = 0 delegates to cross_entropy so the
// reduction is bitwise exact.
template <class S>
S focal_loss(const std::vector<S>& prob_row, int label, double gamma) {
    using ad::clamp_min;
    using std::log;
    using std::pow;
    if (gamma == 0.0) return cross_entropy(prob_row, label);
    const S z = prob_row[label];
    return -(pow(1.0 - z, gamma) * log(clamp_min(z, kProbClamp)));
}

// Cosine-similarity matrix of the class representations c^i = [r_h^i; p_h^i].
template <class S>
Mat<S> task_similarity_matrix(const std::vector<std::vector<S>>& class_reps) {
    using ad::value;
    using std::sqrt;
    const int n = static_cast<int>(class_reps.size());
    std::vector<S> norms;
    norms.reserve(n);
    for (int i = 0; i < n; ++i) {
        const S sq = dot(class_reps[i], class_reps[i]);
        if (value(sq) <= 0.0) {
            throw NumericError("degenerate class representation: zero norm at class " +
                               std::to_string(i));
        }
        norms.push_back(sqrt(sq));
    }
    Mat<S> sim(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            sim.at(i, j) = dot(class_reps[i], class_reps[j]) / (norms[i] * norms[j]);
        }
    }
    return sim;
}

template <class S>
S frobenius_norm(const Mat<S>& m) {
    using std::sqrt;
    S acc = m.a[0] * m.a[0];
    for (std::size_t i = 1; i < m.a.size(); ++i) acc = acc + m.a[i] * m.a[i];
    return sqrt(acc);
}

// Softmax over the Frobenius norms of the batch's similarity matrices.
template <class S>
std::vector<S> task_weights(const std::vector<S>& frob_norms) {
    if (frob_norms.empty()) throw ConfigError("task_weights needs at least one task");
    return softmax(frob_norms);
}

// L = L_TF + lambda * L_C.
inline double total_loss(double task_focal, double contrastive, double lambda) {
    if (lambda < 0.0) throw ConfigError("lambda must be nonnegative");
    return task_focal + lambda * contrastive;
}

// Per-batch loss report. task_focal/contrastive are the normalized values
// entering the optimizer (raw sums divided by total query count / T); the
// raw sums are kept alongside.
struct LossBreakdown {
    double total = 0.0;
    double task_focal = 0.0;
    double contrastive = 0.0;
    double task_focal_raw = 0.0;
    double contrastive_raw = 0.0;
    double gamma = 0.0;
    double lambda = 0.0;
    std::vector<double> task_weight;                 // s^tau per episode
    std::vector<double> frob_norms;                  // ||S^tau||_F per episode
    std::vector<std::vector<double>> per_query_ce;   // per episode, R terms
    std::vector<double> per_episode_focal;           // weighted contribution per episode
};

}  // namespace hcrp
