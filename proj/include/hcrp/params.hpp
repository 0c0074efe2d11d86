#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "hcrp/ad.hpp"
#include "hcrp/data.hpp"

namespace hcrp {

// Vocabulary built from a corpus + catalog. Ids 0..5 are reserved; everything
// else is assigned in sorted token order for determinism. Unknown tokens map
// to kUnk.
class Vocab {
public:
    static constexpr int kUnk = 0;
    static constexpr int kCls = 1;
    static constexpr int kHeadOpen = 2;
    static constexpr int kHeadClose = 3;
    static constexpr int kTailOpen = 4;
    static constexpr int kTailClose = 5;
    static constexpr int kReserved = 6;

    static Vocab build(const Corpus& corpus, const RelationCatalog& catalog);
    static Vocab from_tokens(std::vector<std::string> tokens);

    int id(const std::string& token) const {
        auto it = index_.find(token);
        return it == index_.end() ? kUnk : it->second;
    }
    int size() const { return kReserved + static_cast<int>(tokens_.size()); }
    const std::vector<std::string>& tokens() const { return tokens_; }

private:
    std::vector<std::string> tokens_;  // id - kReserved -> token
    std::unordered_map<std::string, int> index_;
};

struct ParamBlock {
    std::string name;
    std::vector<int> shape;
    std::vector<double> data;
    std::size_t count() const { return data.size(); }
};

// Flat named parameter storage. Block order is fixed so that lifted tape
// leaves, checkpoints, and gradient reports all agree on coordinates.
struct ParamStore {
    int d = 0;
    int vocab_size = 0;
    bool has_mixing = true;
    std::vector<ParamBlock> blocks;

    static ParamStore init(int vocab_size, int d, bool mixing, std::mt19937_64& rng);

    ParamBlock& block(const std::string& name);
    const ParamBlock& block(const std::string& name) const;

    std::size_t total() const;
    // Flat coordinate across blocks in order.
    double& coord(std::size_t flat);
};

// Parameter views for one forward pass, over double or ad::Var.
template <class S>
struct ParamSet {
    int d = 0;
    int vocab_size = 0;
    bool has_mixing = true;
    std::vector<S> emb;    // vocab_size x d
    std::vector<S> wq, wk, wv;  // d x d each (mixing layer)
    std::vector<S> w_rel;  // 2d x d
    std::vector<S> b_rel;  // 2d
};

ParamSet<double> value_params(const ParamStore& store);

// Pushes one tape leaf per parameter, in block order, starting from an empty
// tape: the adjoint of leaf i is the gradient of flat coordinate i.
ParamSet<ad::Var> lift_params(const ParamStore& store, ad::Tape& tape);

// Offsets of each block within the flat coordinate space.
std::vector<std::pair<std::string, std::size_t>> block_offsets(const ParamStore& store);

}  // namespace hcrp
