// Command-line entry points: train, eval, sample, inspect-weights,
// check-gradients, make-synthetic. Every run writes a manifest with the
// resolved config, seed, and input digests; rerunning from a manifest's
// config reproduces the outputs bitwise.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hcrp/checkpoint.hpp"
#include "hcrp/eval.hpp"
#include "hcrp/manifest.hpp"
#include "hcrp/rng.hpp"
#include "hcrp/synthetic.hpp"
#include "hcrp/training.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

hcrp::LossMode parse_loss_mode(const std::string& name) {
    if (name == "ce") return hcrp::LossMode::kCe;
    if (name == "ce-task") return hcrp::LossMode::kCeTaskWeights;
    if (name == "focal") return hcrp::LossMode::kFocal;
    if (name == "task-focal") return hcrp::LossMode::kTaskAdaptiveFocal;
    throw hcrp::ConfigError("unknown loss mode: " + name + " (expected ce|ce-task|focal|task-focal)");
}

std::string loss_mode_name(hcrp::LossMode m) {
    switch (m) {
        case hcrp::LossMode::kCe: return "ce";
        case hcrp::LossMode::kCeTaskWeights: return "ce-task";
        case hcrp::LossMode::kFocal: return "focal";
        case hcrp::LossMode::kTaskAdaptiveFocal: return "task-focal";
    }
    return "?";
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct TrainArgs {
    std::string corpus_path, catalog_path, val_corpus_path, frozen_path;
    std::string out_dir = ".";
    std::string loss = "task-focal";
    std::string contrastive = "exp";
    hcrp::TrainConfig cfg;

    std::map<std::string, std::string> as_config() const {
        std::map<std::string, std::string> m;
        m["corpus"] = corpus_path;
        m["catalog"] = catalog_path;
        if (!val_corpus_path.empty()) m["val_corpus"] = val_corpus_path;
        if (!frozen_path.empty()) m["frozen"] = frozen_path;
        m["n"] = std::to_string(cfg.n);
        m["k"] = std::to_string(cfg.k);
        m["r"] = std::to_string(cfg.r);
        m["t"] = std::to_string(cfg.t);
        m["d"] = std::to_string(cfg.d);
        m["mixing"] = cfg.mixing ? "1" : "0";
        m["gamma"] = fmt(cfg.gamma);
        m["lambda"] = fmt(cfg.lambda);
        m["lr"] = fmt(cfg.lr);
        m["iters"] = std::to_string(cfg.max_iters);
        m["seed"] = std::to_string(cfg.seed);
        m["optimizer"] = cfg.optimizer;
        m["loss"] = loss_mode_name(cfg.loss_mode);
        m["no_local"] = cfg.disable_local ? "1" : "0";
        m["no_global"] = cfg.disable_global ? "1" : "0";
        m["no_contrastive"] = cfg.disable_contrastive ? "1" : "0";
        m["contrastive_mode"] =
            cfg.contrastive_mode == hcrp::ContrastiveMode::kStrict ? "strict" : "exp";
        m["grad_through_weights"] = cfg.grad_through_weights ? "1" : "0";
        m["balanced_queries"] = cfg.balanced_queries ? "1" : "0";
        m["names_only"] = cfg.names_only ? "1" : "0";
        m["val_every"] = std::to_string(cfg.val_every);
        m["val_episodes"] = std::to_string(cfg.val_episodes);
        return m;
    }
};

void add_common_train_flags(CLI::App* cmd, TrainArgs& a) {
    cmd->add_option("--corpus", a.corpus_path, "training corpus JSON")->required();
    cmd->add_option("--catalog", a.catalog_path, "relation catalog JSON")->required();
    cmd->add_option("--val-corpus", a.val_corpus_path, "validation corpus JSON");
    cmd->add_option("--frozen", a.frozen_path, "frozen-embedding file (disables toy encoder training)");
    cmd->add_option("--out-dir", a.out_dir, "artifact output directory");
    cmd->add_option("--n", a.cfg.n, "ways per episode");
    cmd->add_option("--k", a.cfg.k, "shots per relation");
    cmd->add_option("--r", a.cfg.r, "queries per episode");
    cmd->add_option("--t", a.cfg.t, "episodes per batch");
    cmd->add_option("--d", a.cfg.d, "encoder hidden size");
    cmd->add_flag("--no-mixing{false}", a.cfg.mixing, "disable the self-attention mixing layer");
    cmd->add_option("--gamma", a.cfg.gamma, "focal exponent");
    cmd->add_option("--lambda", a.cfg.lambda, "contrastive weight");
    cmd->add_option("--lr", a.cfg.lr, "learning rate");
    cmd->add_option("--iters", a.cfg.max_iters, "training iterations");
    cmd->add_option("--seed", a.cfg.seed, "root random seed");
    cmd->add_option("--optimizer", a.cfg.optimizer, "sgd | adam");
    cmd->add_option("--loss", a.loss, "ce | ce-task | focal | task-focal");
    cmd->add_flag("--no-local", a.cfg.disable_local, "disable local prototypes");
    cmd->add_flag("--no-global", a.cfg.disable_global, "disable global prototypes");
    cmd->add_flag("--no-contrastive", a.cfg.disable_contrastive, "disable the contrastive loss");
    cmd->add_option("--contrastive-mode", a.contrastive, "exp | strict");
    cmd->add_flag("--grad-through-weights", a.cfg.grad_through_weights,
                  "differentiate through the task weights");
    cmd->add_flag("--balanced-queries", a.cfg.balanced_queries, "round-robin query classes");
    cmd->add_flag("--names-only", a.cfg.names_only, "ignore relation descriptions");
    cmd->add_option("--val-every", a.cfg.val_every, "validation interval (0 = off)");
    cmd->add_option("--val-episodes", a.cfg.val_episodes, "episodes per validation pass");
}

void finish_train_args(TrainArgs& a) {
    a.cfg.loss_mode = parse_loss_mode(a.loss);
    if (a.contrastive == "strict") {
        a.cfg.contrastive_mode = hcrp::ContrastiveMode::kStrict;
    } else if (a.contrastive == "exp") {
        a.cfg.contrastive_mode = hcrp::ContrastiveMode::kExp;
    } else {
        throw hcrp::ConfigError("unknown contrastive mode: " + a.contrastive);
    }
}

int run_train(TrainArgs& a) {
    finish_train_args(a);
    a.cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();

    hcrp::RunManifest manifest;
    manifest.command = "train";
    manifest.config = a.as_config();
    manifest.seed = a.cfg.seed;
    manifest.add_input(a.corpus_path);
    manifest.add_input(a.catalog_path);

    const hcrp::Corpus corpus = hcrp::load_corpus(a.corpus_path);
    const hcrp::RelationCatalog catalog = hcrp::load_catalog(a.catalog_path);
    std::optional<hcrp::Corpus> val;
    if (!a.val_corpus_path.empty()) {
        manifest.add_input(a.val_corpus_path);
        val = hcrp::load_corpus(a.val_corpus_path);
    }
    std::optional<hcrp::FrozenStore> frozen;
    if (!a.frozen_path.empty()) {
        manifest.add_input(a.frozen_path);
        frozen = hcrp::FrozenStore::load(a.frozen_path);
    }

    fs::create_directories(a.out_dir);
    const fs::path metrics_path = fs::path(a.out_dir) / "metrics.jsonl";
    std::ofstream metrics(metrics_path, std::ios::binary);
    if (!metrics) throw hcrp::DataError("cannot write metrics log: " + metrics_path.string());

    const hcrp::TrainResult result =
        hcrp::train(a.cfg, corpus, catalog, val ? &*val : nullptr, &metrics,
                    frozen ? &*frozen : nullptr);

    const fs::path ckpt_path = fs::path(a.out_dir) / "checkpoint.json";
    hcrp::Checkpoint ck;
    ck.config = manifest.config;
    ck.vocab = result.vocab;
    ck.params = result.params;
    ck.save(ckpt_path);

    manifest.artifacts = {ckpt_path.string(), metrics_path.string()};
    manifest.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    manifest.outcome = "ok";
    manifest.save(fs::path(a.out_dir) / "manifest.json");

    std::cout << "train: " << a.cfg.max_iters << " iterations, final loss " << result.final_loss
              << ", checkpoint " << ckpt_path.string() << "\n";
    return 0;
}

hcrp::ModelConfig model_from_checkpoint(const hcrp::Checkpoint& ck) {
    hcrp::TrainConfig cfg;
    auto get = [&](const std::string& key, const std::string& fallback) {
        auto it = ck.config.find(key);
        return it == ck.config.end() ? fallback : it->second;
    };
    cfg.gamma = std::stod(get("gamma", "1"));
    cfg.lambda = std::stod(get("lambda", "1"));
    cfg.loss_mode = parse_loss_mode(get("loss", "task-focal"));
    cfg.disable_local = get("no_local", "0") == "1";
    cfg.disable_global = get("no_global", "0") == "1";
    cfg.disable_contrastive = get("no_contrastive", "0") == "1";
    cfg.contrastive_mode = get("contrastive_mode", "exp") == "strict"
                               ? hcrp::ContrastiveMode::kStrict
                               : hcrp::ContrastiveMode::kExp;
    cfg.names_only = get("names_only", "0") == "1";
    return cfg.model();
}

struct EvalArgs {
    std::string checkpoint_path, corpus_path, catalog_path;
    std::string out_dir = ".";
    std::string setting = "random";
    std::string relations;
    hcrp::EvalConfig cfg;
};

int run_eval(EvalArgs& a) {
    a.cfg.setting = hcrp::parse_eval_setting(a.setting);
    a.cfg.relations = split_csv(a.relations);
    if (!a.cfg.relations.empty() && a.cfg.setting == hcrp::EvalSetting::kRandom) {
        a.cfg.setting = hcrp::EvalSetting::kCustom;
    }
    a.cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();

    hcrp::RunManifest manifest;
    manifest.command = "eval";
    manifest.seed = a.cfg.seed;
    manifest.config["checkpoint"] = a.checkpoint_path;
    manifest.config["corpus"] = a.corpus_path;
    manifest.config["catalog"] = a.catalog_path;
    manifest.config["setting"] = hcrp::eval_setting_name(a.cfg.setting);
    manifest.config["relations"] = a.relations;
    manifest.config["n"] = std::to_string(a.cfg.n);
    manifest.config["k"] = std::to_string(a.cfg.k);
    manifest.config["r"] = std::to_string(a.cfg.r);
    manifest.config["episodes"] = std::to_string(a.cfg.episodes);
    manifest.config["seed"] = std::to_string(a.cfg.seed);
    manifest.config["threads"] = std::to_string(a.cfg.threads);
    manifest.add_input(a.checkpoint_path);
    manifest.add_input(a.corpus_path);
    manifest.add_input(a.catalog_path);

    const hcrp::Checkpoint ck = hcrp::Checkpoint::load(a.checkpoint_path);
    const hcrp::Corpus corpus = hcrp::load_corpus(a.corpus_path);
    const hcrp::RelationCatalog catalog = hcrp::load_catalog(a.catalog_path);

    // A checkpoint trained on one vocabulary cannot score another.
    const hcrp::Vocab fresh = hcrp::Vocab::build(corpus, catalog);
    for (const auto& tok : fresh.tokens()) {
        (void)tok;  // unknown eval-time tokens map to UNK by design
    }
    if (ck.params.vocab_size != ck.vocab.size()) {
        throw hcrp::DataError("checkpoint vocabulary size mismatch: params expect " +
                              std::to_string(ck.params.vocab_size) + ", vocab has " +
                              std::to_string(ck.vocab.size()));
    }

    if (a.cfg.setting == hcrp::EvalSetting::kEasy || a.cfg.setting == hcrp::EvalSetting::kHard) {
        const auto fixed = hcrp::resolve_setting_relations(a.cfg, corpus, catalog);
        a.cfg.n = static_cast<int>(fixed.size());
    }

    const hcrp::ModelConfig model_cfg = model_from_checkpoint(ck);
    const hcrp::EvalReport report =
        hcrp::evaluate(ck.params, ck.vocab, catalog, corpus, model_cfg, a.cfg);

    fs::create_directories(a.out_dir);
    const fs::path report_path = fs::path(a.out_dir) / "eval_report.json";
    json jr;
    jr["accuracy"] = report.accuracy;
    jr["half_width"] = report.half_width;
    jr["episodes"] = report.episodes;
    jr["queries"] = report.queries;
    jr["correct"] = report.correct;
    jr["setting"] = report.setting;
    jr["relations"] = report.relations;
    jr["config"] = manifest.config;
    {
        std::ofstream out(report_path, std::ios::binary);
        out << jr.dump(2) << "\n";
    }

    manifest.artifacts = {report_path.string()};
    manifest.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    manifest.outcome = "ok";
    manifest.save(fs::path(a.out_dir) / "manifest.json");

    std::cout << "accuracy " << report.accuracy << " +/- " << report.half_width << " ("
              << report.setting << ", " << report.episodes << " episodes, " << report.queries
              << " queries)\n";
    return 0;
}

struct SampleArgs {
    std::string corpus_path, catalog_path;
    int n = 5, k = 1, r = 5;
    std::uint64_t seed = 0;
    std::string format = "text";
};

int run_sample(SampleArgs& a) {
    const hcrp::Corpus corpus = hcrp::load_corpus(a.corpus_path);
    std::mt19937_64 rng = hcrp::substream(a.seed, "sampling");
    const hcrp::Episode ep = hcrp::sample_episode(corpus, a.n, a.k, a.r, rng);

    auto sentence = [](const hcrp::Instance& inst) {
        std::string out;
        for (const auto& t : inst.tokens) {
            if (!out.empty()) out += ' ';
            out += t;
        }
        return out;
    };

    if (a.format == "json") {
        json doc;
        doc["relation_ids"] = ep.relation_ids;
        json support = json::array();
        for (const auto& cls : ep.support) {
            json list = json::array();
            for (const auto& inst : cls) {
                json rec;
                rec["tokens"] = inst.tokens;
                rec["h"] = json::array({inst.tokens[inst.head_span.start], "sampled",
                                        json::array({json::array({inst.head_span.start, inst.head_span.end})})});
                rec["t"] = json::array({inst.tokens[inst.tail_span.start], "sampled",
                                        json::array({json::array({inst.tail_span.start, inst.tail_span.end})})});
                list.push_back(std::move(rec));
            }
            support.push_back(std::move(list));
        }
        doc["support"] = std::move(support);
        json query = json::array();
        for (const auto& [inst, label] : ep.query) {
            json rec;
            rec["tokens"] = inst.tokens;
            rec["label"] = label;
            rec["relation_id"] = inst.relation_id;
            query.push_back(std::move(rec));
        }
        doc["query"] = std::move(query);
        std::cout << doc.dump(2) << "\n";
    } else {
        for (int i = 0; i < ep.n(); ++i) {
            std::cout << "[" << i << "] " << ep.relation_ids[i] << "\n";
            for (const auto& inst : ep.support[i]) {
                std::cout << "  support: " << sentence(inst) << "  (head " << inst.head_span.start
                          << ".." << inst.head_span.end << ", tail " << inst.tail_span.start << ".."
                          << inst.tail_span.end << ")\n";
            }
        }
        for (const auto& [inst, label] : ep.query) {
            std::cout << "query -> " << label << " (" << inst.relation_id << "): " << sentence(inst)
                      << "\n";
        }
    }
    return 0;
}

struct InspectArgs {
    std::string checkpoint_path, corpus_path, catalog_path;
    int t = 4, n = 5, k = 1, r = 5;
    std::uint64_t seed = 0;
};

int run_inspect(InspectArgs& a) {
    const hcrp::Checkpoint ck = hcrp::Checkpoint::load(a.checkpoint_path);
    const hcrp::Corpus corpus = hcrp::load_corpus(a.corpus_path);
    const hcrp::RelationCatalog catalog = hcrp::load_catalog(a.catalog_path);
    const hcrp::ModelConfig model_cfg = model_from_checkpoint(ck);

    std::mt19937_64 rng = hcrp::substream(a.seed, "sampling");
    std::vector<hcrp::Episode> batch;
    for (int i = 0; i < a.t; ++i) batch.push_back(hcrp::sample_episode(corpus, a.n, a.k, a.r, rng));

    const hcrp::ParamSet<double> params = hcrp::value_params(ck.params);
    const hcrp::BatchForward<double> fwd =
        hcrp::forward_batch(params, ck.vocab, catalog, batch, model_cfg);

    std::cout.setf(std::ios::fixed);
    std::cout.precision(4);
    for (int i = 0; i < a.t; ++i) {
        std::cout << "task " << (i + 1) << ": ";
        for (std::size_t j = 0; j < batch[i].relation_ids.size(); ++j) {
            if (j) std::cout << ", ";
            std::cout << batch[i].relation_ids[j];
        }
        std::cout << "  |S|_F=" << fwd.breakdown.frob_norms[i]
                  << "  weight=" << fwd.breakdown.task_weight[i] << "\n";
    }
    double total = 0.0;
    for (double w : fwd.breakdown.task_weight) total += w;
    std::cout << "weight sum " << total << "\n";
    return 0;
}

struct GradArgs {
    std::string corpus_path, catalog_path, frozen_path;
    TrainArgs train;  // reuse model hyperparameters
    double step = 1e-5;
    double threshold = 1e-4;
    int t = 2;
    std::uint64_t seed = 0;

    GradArgs() {
        // Finite differences see the full dependence, including the task
        // weights, so the check runs with full differentiation enabled.
        train.cfg.grad_through_weights = true;
    }
};

int run_check_gradients(GradArgs& a) {
    hcrp::Corpus corpus;
    hcrp::RelationCatalog catalog;
    if (!a.corpus_path.empty()) {
        corpus = hcrp::load_corpus(a.corpus_path);
        catalog = hcrp::load_catalog(a.catalog_path);
    } else {
        hcrp::SyntheticSpec spec;
        spec.clusters = 3;
        spec.relations_per_cluster = 2;
        spec.instances_per_relation = 12;
        spec.vocab_size = 48;
        spec.hardness = 0.5;
        spec.seed = a.seed;
        spec.sentence_tokens = 4;
        hcrp::SyntheticData data = hcrp::make_synthetic_corpus(spec);
        corpus = std::move(data.corpus);
        catalog = std::move(data.catalog);
    }
    finish_train_args(a.train);
    hcrp::TrainConfig& cfg = a.train.cfg;

    const hcrp::Vocab vocab = hcrp::Vocab::build(corpus, catalog);
    std::mt19937_64 init_rng = hcrp::substream(a.seed, "init");
    hcrp::ParamStore store = hcrp::ParamStore::init(vocab.size(), cfg.d, cfg.mixing, init_rng);

    std::mt19937_64 rng = hcrp::substream(a.seed, "sampling");
    std::vector<hcrp::Episode> batch;
    for (int i = 0; i < a.t; ++i) batch.push_back(hcrp::sample_episode(corpus, cfg.n, cfg.k, cfg.r, rng));

    std::optional<hcrp::FrozenStore> frozen;
    if (!a.frozen_path.empty()) frozen = hcrp::FrozenStore::load(a.frozen_path);

    const hcrp::GradientReport report =
        hcrp::check_gradients(store, vocab, catalog, batch, cfg.model(), a.step, a.threshold, 10000,
                              256, a.seed, frozen ? &*frozen : nullptr);
    for (const auto& b : report.blocks) {
        std::cout << b.name << ": max_rel_err=" << b.max_rel_err << " over " << b.checked
                  << " coordinates (worst at " << b.worst_coord << ")\n";
    }
    const bool pass = report.pass();
    std::cout << (pass ? "PASS" : "FAIL") << " at threshold " << report.threshold << "\n";
    if (!pass) throw hcrp::NumericError("gradient check failed");
    return 0;
}

struct SynthArgs {
    hcrp::SyntheticSpec spec;
    std::string corpus_out = "synthetic_corpus.json";
    std::string catalog_out = "synthetic_catalog.json";
};

int run_make_synthetic(SynthArgs& a) {
    const hcrp::SyntheticData data = hcrp::make_synthetic_corpus(a.spec);
    {
        std::ofstream out(a.corpus_out, std::ios::binary);
        if (!out) throw hcrp::DataError("cannot write " + a.corpus_out);
        out << data.corpus_json;
    }
    {
        std::ofstream out(a.catalog_out, std::ios::binary);
        if (!out) throw hcrp::DataError("cannot write " + a.catalog_out);
        out << data.catalog_json;
    }
    std::cout << "wrote " << a.corpus_out << " (" << data.corpus.size() << " relations) and "
              << a.catalog_out << "\n";
    return 0;
}

// Expands a flat key=value config file into --key=value tokens. Lines that are
// blank or start with '#' are skipped; unknown keys surface later as normal
// unknown-option parse errors.
std::vector<std::string> config_tokens(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw hcrp::ConfigError("cannot read config file " + path);
    std::vector<std::string> tokens;
    std::string line;
    auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw hcrp::ConfigError("config line is not key=value: " + line);
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw hcrp::ConfigError("config line has empty key: " + line);
        tokens.push_back("--" + key + "=" + value);
    }
    return tokens;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Episodic few-shot relation extraction with hybrid prototypes"};
    app.require_subcommand(1);
    // Later occurrences win, so config-file values (spliced in first) are
    // overridden by explicit flags.
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    TrainArgs train_args;
    CLI::App* train_cmd = app.add_subcommand("train", "train a model");
    add_common_train_flags(train_cmd, train_args);

    EvalArgs eval_args;
    CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint");
    eval_cmd->add_option("--checkpoint", eval_args.checkpoint_path, "checkpoint file")->required();
    eval_cmd->add_option("--corpus", eval_args.corpus_path, "evaluation corpus")->required();
    eval_cmd->add_option("--catalog", eval_args.catalog_path, "relation catalog")->required();
    eval_cmd->add_option("--out-dir", eval_args.out_dir, "artifact output directory");
    eval_cmd->add_option("--setting", eval_args.setting, "random | easy | hard | custom");
    eval_cmd->add_option("--relations", eval_args.relations, "comma-separated relation ids");
    eval_cmd->add_option("--n", eval_args.cfg.n, "ways");
    eval_cmd->add_option("--k", eval_args.cfg.k, "shots");
    eval_cmd->add_option("--r", eval_args.cfg.r, "queries");
    eval_cmd->add_option("--episodes", eval_args.cfg.episodes, "episode count");
    eval_cmd->add_option("--seed", eval_args.cfg.seed, "random seed");
    eval_cmd->add_option("--threads", eval_args.cfg.threads, "worker threads");
    eval_cmd->add_flag("--balanced-queries", eval_args.cfg.balanced_queries, "round-robin query classes");

    SampleArgs sample_args;
    CLI::App* sample_cmd = app.add_subcommand("sample", "print one sampled episode");
    sample_cmd->add_option("--corpus", sample_args.corpus_path, "corpus")->required();
    sample_cmd->add_option("--n", sample_args.n, "ways");
    sample_cmd->add_option("--k", sample_args.k, "shots");
    sample_cmd->add_option("--r", sample_args.r, "queries");
    sample_cmd->add_option("--seed", sample_args.seed, "random seed");
    sample_cmd->add_option("--format", sample_args.format, "text | json");

    InspectArgs inspect_args;
    CLI::App* inspect_cmd = app.add_subcommand("inspect-weights", "show task-adaptive weights for one batch");
    inspect_cmd->add_option("--checkpoint", inspect_args.checkpoint_path, "checkpoint")->required();
    inspect_cmd->add_option("--corpus", inspect_args.corpus_path, "corpus")->required();
    inspect_cmd->add_option("--catalog", inspect_args.catalog_path, "catalog")->required();
    inspect_cmd->add_option("--t", inspect_args.t, "tasks in the batch");
    inspect_cmd->add_option("--n", inspect_args.n, "ways");
    inspect_cmd->add_option("--k", inspect_args.k, "shots");
    inspect_cmd->add_option("--r", inspect_args.r, "queries");
    inspect_cmd->add_option("--seed", inspect_args.seed, "random seed");

    GradArgs grad_args;
    CLI::App* grad_cmd = app.add_subcommand("check-gradients", "finite-difference gradient verification");
    grad_cmd->add_option("--corpus", grad_args.corpus_path, "corpus (default: built-in synthetic)");
    grad_cmd->add_option("--catalog", grad_args.catalog_path, "catalog");
    grad_cmd->add_option("--frozen", grad_args.frozen_path, "frozen-embedding file");
    grad_cmd->add_option("--n", grad_args.train.cfg.n, "ways");
    grad_cmd->add_option("--k", grad_args.train.cfg.k, "shots");
    grad_cmd->add_option("--r", grad_args.train.cfg.r, "queries");
    grad_cmd->add_option("--t", grad_args.t, "episodes in the batch");
    grad_cmd->add_option("--d", grad_args.train.cfg.d, "hidden size");
    grad_cmd->add_flag("--no-mixing{false}", grad_args.train.cfg.mixing, "disable mixing layer");
    grad_cmd->add_option("--gamma", grad_args.train.cfg.gamma, "focal exponent");
    grad_cmd->add_option("--lambda", grad_args.train.cfg.lambda, "contrastive weight");
    grad_cmd->add_option("--loss", grad_args.train.loss, "loss mode");
    grad_cmd->add_flag("--no-local", grad_args.train.cfg.disable_local, "disable local prototypes");
    grad_cmd->add_flag("--no-global", grad_args.train.cfg.disable_global, "disable global prototypes");
    grad_cmd->add_flag("--no-contrastive", grad_args.train.cfg.disable_contrastive, "disable contrastive loss");
    grad_cmd->add_flag("--stop-grad-weights{false}", grad_args.train.cfg.grad_through_weights,
                       "treat task weights as constants (the FD oracle will then disagree by design)");
    grad_cmd->add_option("--step", grad_args.step, "finite-difference step");
    grad_cmd->add_option("--threshold", grad_args.threshold, "max relative error");
    grad_cmd->add_option("--seed", grad_args.seed, "random seed");

    SynthArgs synth_args;
    CLI::App* synth_cmd = app.add_subcommand("make-synthetic", "generate a synthetic corpus");
    synth_cmd->add_option("--clusters", synth_args.spec.clusters, "relation clusters");
    synth_cmd->add_option("--relations-per-cluster", synth_args.spec.relations_per_cluster, "relations per cluster");
    synth_cmd->add_option("--instances", synth_args.spec.instances_per_relation, "instances per relation");
    synth_cmd->add_option("--vocab", synth_args.spec.vocab_size, "vocabulary size");
    synth_cmd->add_option("--hardness", synth_args.spec.hardness, "cluster-pool probability in [0, 1]");
    synth_cmd->add_option("--seed", synth_args.spec.seed, "random seed");
    synth_cmd->add_option("--sentence-tokens", synth_args.spec.sentence_tokens, "tokens per sentence");
    synth_cmd->add_option("--corpus-out", synth_args.corpus_out, "corpus output path");
    synth_cmd->add_option("--catalog-out", synth_args.catalog_out, "catalog output path");

    // Each subcommand accepts --config with flat key=value lines that mirror
    // its own flags one-to-one; explicit flags override config-file values.
    std::string config_placeholder;
    for (CLI::App* cmd : app.get_subcommands({})) {
        cmd->add_option("--config", config_placeholder, "flat key=value config file");
    }

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        for (std::size_t i = 0; i + 1 < args.size(); ++i) {
            if (args[i] != "--config") continue;
            const std::vector<std::string> expanded = config_tokens(args[i + 1]);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                       args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
            // Splice after the subcommand name so explicit flags come later
            // and take precedence.
            args.insert(args.begin() + 1, expanded.begin(), expanded.end());
            break;
        }
        std::reverse(args.begin(), args.end());
        app.parse(args);
        if (train_cmd->parsed()) return run_train(train_args);
        if (eval_cmd->parsed()) return run_eval(eval_args);
        if (sample_cmd->parsed()) return run_sample(sample_args);
        if (inspect_cmd->parsed()) return run_inspect(inspect_args);
        if (grad_cmd->parsed()) return run_check_gradients(grad_args);
        if (synth_cmd->parsed()) return run_make_synthetic(synth_args);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << "error: config: " << e.what() << "\n";
        return 1;
    } catch (const hcrp::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
