#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hcrp/forward.hpp"
#include "hcrp/params.hpp"

namespace hcrp {

struct TrainConfig {
    int n = 5;
    int k = 1;
    int r = 5;
    int t = 4;  // episodes per batch
    int d = 16;
    bool mixing = true;
    double gamma = 1.0;
    double lambda = 1.0;
    double lr = 0.1;
    int max_iters = 2000;
    std::uint64_t seed = 0;
    std::string optimizer = "sgd";  // sgd | adam
    LossMode loss_mode = LossMode::kTaskAdaptiveFocal;
    bool disable_local = false;
    bool disable_global = false;
    bool disable_contrastive = false;
    ContrastiveMode contrastive_mode = ContrastiveMode::kExp;
    bool grad_through_weights = false;
    bool balanced_queries = false;
    bool names_only = false;
    int val_every = 0;      // 0 = no periodic validation
    int val_episodes = 200;

    ModelConfig model() const {
        ModelConfig m;
        m.gamma = gamma;
        m.lambda = lambda;
        m.loss_mode = loss_mode;
        m.use_local = !disable_local;
        m.use_global = !disable_global;
        m.use_contrastive = !disable_contrastive;
        m.contrastive_mode = contrastive_mode;
        m.grad_through_weights = grad_through_weights;
        m.names_only = names_only;
        return m;
    }

    void validate() const;
};

struct ForwardBackwardResult {
    LossBreakdown breakdown;
    std::vector<double> gradients;  // flat, in block order
};

// One exact reverse-mode pass over a batch; aborts with a diagnostic on the
// first non-finite loss or gradient coordinate.
ForwardBackwardResult forward_backward(const ParamStore& store, const Vocab& vocab,
                                       const RelationCatalog& catalog,
                                       const std::vector<Episode>& batch, const ModelConfig& cfg,
                                       const FrozenStore* frozen = nullptr);

struct GradientReport {
    struct Block {
        std::string name;
        double max_rel_err = 0.0;
        std::size_t checked = 0;
        std::size_t worst_coord = 0;
    };
    std::vector<Block> blocks;
    double threshold = 1e-4;

    double max_rel_err() const;
    bool pass() const { return max_rel_err() < threshold; }
};

// Central finite differences per parameter coordinate: exhaustive for blocks
// under `exhaustive_limit` coordinates, random subsample otherwise.
GradientReport check_gradients(const ParamStore& store, const Vocab& vocab,
                               const RelationCatalog& catalog, const std::vector<Episode>& batch,
                               const ModelConfig& cfg, double step = 1e-5, double threshold = 1e-4,
                               std::size_t exhaustive_limit = 10000,
                               std::size_t subsample = 256, std::uint64_t seed = 0,
                               const FrozenStore* frozen = nullptr);

// As above but scoring a caller-supplied analytic gradient (harness
// sensitivity checks use this with a deliberately corrupted gradient).
GradientReport score_gradients(const ParamStore& store, const Vocab& vocab,
                               const RelationCatalog& catalog, const std::vector<Episode>& batch,
                               const ModelConfig& cfg, const std::vector<double>& analytic,
                               double step, double threshold, std::size_t exhaustive_limit,
                               std::size_t subsample, std::uint64_t seed,
                               const FrozenStore* frozen = nullptr);

struct TrainResult {
    ParamStore params;
    Vocab vocab;
    std::vector<std::string> metrics_lines;  // one JSON object per line
    double final_loss = 0.0;
};

// Episodic training loop: sample batch -> forward/backward -> update.
// Deterministic given config.seed; metrics mirror to `metrics_out` when set.
TrainResult train(const TrainConfig& cfg, const Corpus& corpus, const RelationCatalog& catalog,
                  const Corpus* val_corpus = nullptr, std::ostream* metrics_out = nullptr,
                  const FrozenStore* frozen = nullptr);

// Accuracy over freshly sampled episodes with a value-mode forward pass.
double quick_accuracy(const ParamStore& store, const Vocab& vocab, const RelationCatalog& catalog,
                      const Corpus& corpus, const ModelConfig& cfg, int n, int k, int r,
                      int episodes, std::mt19937_64& rng,
                      QuerySampling mode = QuerySampling::kUniform,
                      const FrozenStore* frozen = nullptr);

}  // namespace hcrp
