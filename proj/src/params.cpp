#include "hcrp/params.hpp"

#include <algorithm>
#include <set>

#include "hcrp/errors.hpp"
#include "hcrp/rng.hpp"

namespace hcrp {

Vocab Vocab::build(const Corpus& corpus, const RelationCatalog& catalog) {
    std::set<std::string> seen;
    for (const auto& [_, instances] : corpus) {
        for (const auto& inst : instances) {
            seen.insert(inst.tokens.begin(), inst.tokens.end());
        }
    }
    for (const auto& [_, info] : catalog.entries) {
        seen.insert(info.name.begin(), info.name.end());
        seen.insert(info.description.begin(), info.description.end());
    }
    return from_tokens(std::vector<std::string>(seen.begin(), seen.end()));
}

Vocab Vocab::from_tokens(std::vector<std::string> tokens) {
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
    Vocab v;
    v.tokens_ = std::move(tokens);
    for (int i = 0; i < static_cast<int>(v.tokens_.size()); ++i) {
        v.index_[v.tokens_[i]] = kReserved + i;
    }
    return v;
}

ParamStore ParamStore::init(int vocab_size, int d, bool mixing, std::mt19937_64& rng) {
    ParamStore store;
    store.d = d;
    store.vocab_size = vocab_size;
    store.has_mixing = mixing;
    auto add = [&](const std::string& name, std::vector<int> shape) {
        ParamBlock b;
        b.name = name;
        b.shape = std::move(shape);
        std::size_t count = 1;
        for (int s : b.shape) count *= static_cast<std::size_t>(s);
        b.data.resize(count);
        for (double& x : b.data) x = uniform_range(rng, -0.1, 0.1);
        store.blocks.push_back(std::move(b));
    };
    add("emb", {vocab_size, d});
    if (mixing) {
        add("wq", {d, d});
        add("wk", {d, d});
        add("wv", {d, d});
    }
    add("w_rel", {2 * d, d});
    add("b_rel", {2 * d});
    return store;
}

ParamBlock& ParamStore::block(const std::string& name) {
    for (auto& b : blocks)
        if (b.name == name) return b;
    throw ConfigError("unknown parameter block: " + name);
}

const ParamBlock& ParamStore::block(const std::string& name) const {
    for (const auto& b : blocks)
        if (b.name == name) return b;
    throw ConfigError("unknown parameter block: " + name);
}

std::size_t ParamStore::total() const {
    std::size_t n = 0;
    for (const auto& b : blocks) n += b.count();
    return n;
}

double& ParamStore::coord(std::size_t flat) {
    for (auto& b : blocks) {
        if (flat < b.count()) return b.data[flat];
        flat -= b.count();
    }
    throw ConfigError("parameter coordinate out of range");
}

ParamSet<double> value_params(const ParamStore& store) {
    ParamSet<double> p;
    p.d = store.d;
    p.vocab_size = store.vocab_size;
    p.has_mixing = store.has_mixing;
    p.emb = store.block("emb").data;
    if (store.has_mixing) {
        p.wq = store.block("wq").data;
        p.wk = store.block("wk").data;
        p.wv = store.block("wv").data;
    }
    p.w_rel = store.block("w_rel").data;
    p.b_rel = store.block("b_rel").data;
    return p;
}

ParamSet<ad::Var> lift_params(const ParamStore& store, ad::Tape& tape) {
    ParamSet<ad::Var> p;
    p.d = store.d;
    p.vocab_size = store.vocab_size;
    p.has_mixing = store.has_mixing;
    auto lift = [&](const std::string& name) {
        const auto& data = store.block(name).data;
        std::vector<ad::Var> out;
        out.reserve(data.size());
        for (double x : data) out.push_back(ad::make_var(tape, x));
        return out;
    };
    // Lift order must match block order in ParamStore::init.
    p.emb = lift("emb");
    if (store.has_mixing) {
        p.wq = lift("wq");
        p.wk = lift("wk");
        p.wv = lift("wv");
    }
    p.w_rel = lift("w_rel");
    p.b_rel = lift("b_rel");
    return p;
}

std::vector<std::pair<std::string, std::size_t>> block_offsets(const ParamStore& store) {
    std::vector<std::pair<std::string, std::size_t>> out;
    std::size_t off = 0;
    for (const auto& b : store.blocks) {
        out.emplace_back(b.name, off);
        off += b.count();
    }
    return out;
}

}  // namespace hcrp
