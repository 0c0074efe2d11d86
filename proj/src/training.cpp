#include "hcrp/training.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <nlohmann/json.hpp>

#include "hcrp/rng.hpp"

namespace hcrp {

using nlohmann::json;

void TrainConfig::validate() const {
    if (n < 1 || k < 1 || r < 1 || t < 1) throw ConfigError("n, k, r, t must all be positive");
    if (d < 1) throw ConfigError("d must be positive");
    if (gamma < 0.0) throw ConfigError("gamma must be nonnegative");
    if (lambda < 0.0) throw ConfigError("lambda must be nonnegative");
    if (lr < 0.0) throw ConfigError("learning rate must be nonnegative");
    if (max_iters < 1) throw ConfigError("max_iters must be positive");
    if (optimizer != "sgd" && optimizer != "adam") throw ConfigError("optimizer must be sgd or adam");
    if (disable_local && disable_global) throw ConfigError("cannot disable both prototype paths");
}

ForwardBackwardResult forward_backward(const ParamStore& store, const Vocab& vocab,
                                       const RelationCatalog& catalog,
                                       const std::vector<Episode>& batch, const ModelConfig& cfg,
                                       const FrozenStore* frozen) {
    // The tape is reused across calls so its arena stays warm.
    static thread_local ad::Tape tape;
    tape.clear();
    tape.reserve(store.total() + (1 << 16));
    const ParamSet<ad::Var> params = lift_params(store, tape);
    const BatchForward<ad::Var> fwd =
        forward_batch(params, vocab, catalog, batch, cfg, frozen, &tape);
    if (!std::isfinite(fwd.breakdown.total)) {
        throw NumericError("non-finite loss: " + std::to_string(fwd.breakdown.total));
    }
    const std::vector<double> adj = tape.gradient(fwd.total.idx);
    ForwardBackwardResult out;
    out.breakdown = fwd.breakdown;
    out.gradients.assign(adj.begin(), adj.begin() + static_cast<std::ptrdiff_t>(store.total()));
    const auto offsets = block_offsets(store);
    for (std::size_t i = 0; i < out.gradients.size(); ++i) {
        if (!std::isfinite(out.gradients[i])) {
            std::string block = "?";
            std::size_t local = i;
            for (const auto& [name, off] : offsets) {
                if (off <= i) {
                    block = name;
                    local = i - off;
                }
            }
            throw NumericError("non-finite gradient at block " + block + ", coordinate " +
                               std::to_string(local));
        }
    }
    return out;
}

double GradientReport::max_rel_err() const {
    double m = 0.0;
    for (const auto& b : blocks) m = std::max(m, b.max_rel_err);
    return m;
}

namespace {

double batch_loss_value(const ParamStore& store, const Vocab& vocab, const RelationCatalog& catalog,
                        const std::vector<Episode>& batch, const ModelConfig& cfg,
                        const FrozenStore* frozen) {
    const ParamSet<double> params = value_params(store);
    return forward_batch(params, vocab, catalog, batch, cfg, frozen).breakdown.total;
}

// Relative error with a floor: the loss is O(1), so coordinates whose
// gradients sit below the FD noise floor should not dominate the report.
double rel_err(double a, double f) {
    return std::abs(a - f) / std::max({std::abs(a), std::abs(f), 1e-3});
}

}  // namespace

GradientReport score_gradients(const ParamStore& store, const Vocab& vocab,
                               const RelationCatalog& catalog, const std::vector<Episode>& batch,
                               const ModelConfig& cfg, const std::vector<double>& analytic,
                               double step, double threshold, std::size_t exhaustive_limit,
                               std::size_t subsample, std::uint64_t seed,
                               const FrozenStore* frozen) {
    ParamStore work = store;
    GradientReport report;
    report.threshold = threshold;
    std::mt19937_64 rng = substream(seed, "gradcheck");
    std::size_t offset = 0;
    for (const auto& block : store.blocks) {
        GradientReport::Block rb;
        rb.name = block.name;
        std::vector<std::size_t> coords;
        if (block.count() <= exhaustive_limit) {
            coords.resize(block.count());
            for (std::size_t i = 0; i < coords.size(); ++i) coords[i] = i;
        } else {
            for (std::size_t i = 0; i < subsample; ++i) coords.push_back(bounded(rng, block.count()));
        }
        for (std::size_t c : coords) {
            const std::size_t flat = offset + c;
            double& x = work.coord(flat);
            const double saved = x;
            x = saved + step;
            const double up = batch_loss_value(work, vocab, catalog, batch, cfg, frozen);
            x = saved - step;
            const double down = batch_loss_value(work, vocab, catalog, batch, cfg, frozen);
            x = saved;
            const double fd = (up - down) / (2.0 * step);
            const double err = rel_err(analytic[flat], fd);
            if (err > rb.max_rel_err) {
                rb.max_rel_err = err;
                rb.worst_coord = c;
            }
            ++rb.checked;
        }
        report.blocks.push_back(std::move(rb));
        offset += block.count();
    }
    return report;
}

GradientReport check_gradients(const ParamStore& store, const Vocab& vocab,
                               const RelationCatalog& catalog, const std::vector<Episode>& batch,
                               const ModelConfig& cfg, double step, double threshold,
                               std::size_t exhaustive_limit, std::size_t subsample,
                               std::uint64_t seed, const FrozenStore* frozen) {
    const ForwardBackwardResult fb = forward_backward(store, vocab, catalog, batch, cfg, frozen);
    return score_gradients(store, vocab, catalog, batch, cfg, fb.gradients, step, threshold,
                           exhaustive_limit, subsample, seed, frozen);
}

double quick_accuracy(const ParamStore& store, const Vocab& vocab, const RelationCatalog& catalog,
                      const Corpus& corpus, const ModelConfig& cfg, int n, int k, int r,
                      int episodes, std::mt19937_64& rng, QuerySampling mode,
                      const FrozenStore* frozen) {
    const ParamSet<double> params = value_params(store);
    long correct = 0;
    long total = 0;
    for (int e = 0; e < episodes; ++e) {
        const Episode ep = sample_episode(corpus, n, k, r, rng, mode);
        const EncodedEpisode<double> enc = encode_episode(params, vocab, catalog, ep, cfg, frozen);
        const auto probs = score_queries(assemble_hybrid(enc, cfg.layout()));
        for (int j = 0; j < ep.r(); ++j) {
            if (predict(probs[j]) == ep.query[j].second) ++correct;
            ++total;
        }
    }
    return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

namespace {

class AdamState {
public:
    AdamState(std::size_t count) : m_(count, 0.0), v_(count, 0.0) {}

    void step(ParamStore& store, const std::vector<double>& grad, double lr) {
        ++t_;
        const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
        const double bc1 = 1.0 - std::pow(b1, t_);
        const double bc2 = 1.0 - std::pow(b2, t_);
        std::size_t flat = 0;
        for (auto& block : store.blocks) {
            for (double& x : block.data) {
                m_[flat] = b1 * m_[flat] + (1.0 - b1) * grad[flat];
                v_[flat] = b2 * v_[flat] + (1.0 - b2) * grad[flat] * grad[flat];
                x -= lr * (m_[flat] / bc1) / (std::sqrt(v_[flat] / bc2) + eps);
                ++flat;
            }
        }
    }

private:
    std::vector<double> m_, v_;
    int t_ = 0;
};

void sgd_step(ParamStore& store, const std::vector<double>& grad, double lr) {
    if (lr == 0.0) return;  // bitwise no-op by contract
    std::size_t flat = 0;
    for (auto& block : store.blocks) {
        for (double& x : block.data) {
            x -= lr * grad[flat];
            ++flat;
        }
    }
}

}  // namespace

TrainResult train(const TrainConfig& cfg, const Corpus& corpus, const RelationCatalog& catalog,
                  const Corpus* val_corpus, std::ostream* metrics_out, const FrozenStore* frozen) {
    cfg.validate();
    const ModelConfig model_cfg = cfg.model();
    const QuerySampling qmode = cfg.balanced_queries ? QuerySampling::kBalanced : QuerySampling::kUniform;

    TrainResult result;
    result.vocab = Vocab::build(corpus, catalog);
    std::mt19937_64 init_rng = substream(cfg.seed, "init");
    result.params = ParamStore::init(result.vocab.size(), cfg.d, cfg.mixing, init_rng);

    std::mt19937_64 sample_rng = substream(cfg.seed, "sampling");
    std::mt19937_64 val_rng = substream(cfg.seed, "validation");
    std::optional<AdamState> adam;
    if (cfg.optimizer == "adam") adam.emplace(result.params.total());

    for (int iter = 1; iter <= cfg.max_iters; ++iter) {
        std::vector<Episode> batch;
        batch.reserve(cfg.t);
        for (int i = 0; i < cfg.t; ++i) {
            batch.push_back(sample_episode(corpus, cfg.n, cfg.k, cfg.r, sample_rng, qmode));
        }
        const ForwardBackwardResult fb =
            forward_backward(result.params, result.vocab, catalog, batch, model_cfg, frozen);
        if (fb.breakdown.total > 1e6) {
            throw NumericError("training diverged at iteration " + std::to_string(iter) +
                               ": loss=" + std::to_string(fb.breakdown.total));
        }
        if (adam) {
            adam->step(result.params, fb.gradients, cfg.lr);
        } else {
            sgd_step(result.params, fb.gradients, cfg.lr);
        }
        result.final_loss = fb.breakdown.total;

        json line;
        line["iter"] = iter;
        line["loss"] = fb.breakdown.total;
        line["l_tf"] = fb.breakdown.task_focal;
        line["l_c"] = fb.breakdown.contrastive;
        line["s_tau"] = fb.breakdown.task_weight;
        if (cfg.val_every > 0 && (iter % cfg.val_every == 0 || iter == cfg.max_iters)) {
            const Corpus& vc = val_corpus ? *val_corpus : corpus;
            line["val_acc"] = quick_accuracy(result.params, result.vocab, catalog, vc, model_cfg,
                                             cfg.n, cfg.k, cfg.r, cfg.val_episodes, val_rng, qmode,
                                             frozen);
        }
        result.metrics_lines.push_back(line.dump());
        if (metrics_out) *metrics_out << result.metrics_lines.back() << "\n";
    }
    return result;
}

}  // namespace hcrp
