// Acceptance gate: one test case per release criterion, each printing a
// single PASS/FAIL line. Tolerances are pinned here, next to the checks.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hcrp/eval.hpp"
#include "hcrp/rng.hpp"
#include "hcrp/synthetic.hpp"
#include "hcrp/training.hpp"

#include "oracle.hpp"
#include "reduced_ce.hpp"
#include "test_util.hpp"

using namespace hcrp;
namespace fs = std::filesystem;

namespace {

void report(int idx, const char* name, bool ok) {
    std::printf("criterion %d (%s): %s\n", idx, name, ok ? "PASS" : "FAIL");
    std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double pooled_sd(double a, double b) { return std::sqrt((a * a + b * b) / 2.0); }

}  // namespace

TEST_CASE("1 gradient fidelity") {
    // 2-way 2-shot, 2 queries, d=4, 20-entry vocabulary, gamma=1, lambda=1,
    // two-episode batch; every block within 1e-4 of central differences.
    const auto t0 = std::chrono::steady_clock::now();
    const auto data = testutil::make_tiny(4, 6, 4, 9);
    const Vocab vocab = Vocab::build(data.corpus, data.catalog);
    REQUIRE(vocab.size() == 20);
    auto init = substream(3, "init");
    const ParamStore store = ParamStore::init(vocab.size(), 4, true, init);
    auto sampling = substream(3, "sampling");
    std::vector<Episode> batch;
    for (int t = 0; t < 2; ++t) batch.push_back(sample_episode(data.corpus, 2, 2, 2, sampling));
    ModelConfig cfg;  // gamma = 1, lambda = 1, task-adaptive focal + contrastive
    cfg.grad_through_weights = true;
    const GradientReport rep = check_gradients(store, vocab, data.catalog, batch, cfg,
                                               /*step=*/1e-5, /*threshold=*/1e-4);
    const double elapsed = seconds_since(t0);
    const bool ok = rep.pass() && elapsed < 60.0;
    std::printf("  max rel err %.3e (< 1e-4), %.1fs (< 60s)\n", rep.max_rel_err(), elapsed);
    report(1, "gradient fidelity", ok);
    CHECK(ok);
}

TEST_CASE("2 reduction identities") {
    bool ok = true;

    // gamma = 0 focal is bitwise identical to cross entropy.
    auto rng = substream(0, "gradcheck");
    for (int trial = 0; trial < 100 && ok; ++trial) {
        const int n = 2 + static_cast<int>(bounded(rng, 4));
        std::vector<double> logits(n);
        for (double& v : logits) v = uniform_range(rng, -8.0, 8.0);
        const std::vector<double> row = softmax(logits);
        const int label = static_cast<int>(bounded(rng, n));
        ok = ok && focal_loss(row, label, 0.0) == cross_entropy(row, label);
    }

    // A single-episode batch gets task weight exactly 1.
    ok = ok && task_weights<double>({2.7}) == std::vector<double>{1.0};

    // lambda = 0 makes the total bitwise equal to the task-weighted focal term.
    {
        const auto data = testutil::make_tiny(5, 8);
        const Vocab vocab = Vocab::build(data.corpus, data.catalog);
        auto init = substream(5, "init");
        const ParamStore store = ParamStore::init(vocab.size(), 3, true, init);
        auto sampling = substream(5, "sampling");
        std::vector<Episode> batch;
        for (int t = 0; t < 3; ++t) batch.push_back(sample_episode(data.corpus, 3, 1, 3, sampling));
        ModelConfig cfg;
        cfg.lambda = 0.0;
        const auto fwd = forward_batch(value_params(store), vocab, data.catalog, batch, cfg);
        ok = ok && fwd.breakdown.total == fwd.breakdown.task_focal;
    }

    // Global-only cross entropy on a frozen encoder matches an independent
    // reduced implementation with hand-derived gradients, within 1e-10.
    {
        const int d = 4;
        const auto data = testutil::make_tiny(6, 10);
        const Vocab vocab = Vocab::build(data.corpus, data.catalog);
        auto init = substream(22, "init");
        const ParamStore store = ParamStore::init(vocab.size(), d, false, init);
        auto sampling = substream(22, "sampling");
        const std::vector<Episode> batch = {sample_episode(data.corpus, 3, 2, 4, sampling)};
        const Episode& ep = batch[0];

        FrozenStore frozen;
        auto frng = substream(22, "eval");
        std::set<std::string> seen;
        auto add_instance = [&](const Instance& inst) {
            const std::string key = FrozenStore::instance_key(inst);
            if (!seen.insert(key).second) return;
            FrozenStore::Record rec;
            const int l = 3 + static_cast<int>(bounded(frng, 3));
            rec.m = testutil::random_mat(l, d, frng);
            rec.head = static_cast<int>(bounded(frng, l));
            rec.tail = static_cast<int>(bounded(frng, l));
            frozen.add(key, rec);
        };
        for (const auto& cls : ep.support) {
            for (const Instance& s : cls) add_instance(s);
        }
        for (const auto& [q, _] : ep.query) add_instance(q);
        for (const std::string& id : ep.relation_ids) {
            FrozenStore::Record rec;
            rec.m = testutil::random_mat(2 + static_cast<int>(bounded(frng, 3)), d, frng);
            rec.cls = 0;
            frozen.add(FrozenStore::relation_key(id), rec);
        }

        ModelConfig cfg;
        cfg.loss_mode = LossMode::kCe;
        cfg.use_local = false;
        cfg.use_contrastive = false;
        cfg.lambda = 0.0;
        const ForwardBackwardResult fb =
            forward_backward(store, vocab, data.catalog, batch, cfg, &frozen);

        reduced::Inputs in;
        auto global_of = [&](const FrozenStore::Record& rec) {
            reduced::Vec g;
            for (int c = 0; c < d; ++c) g.push_back(rec.m.at(rec.head, c));
            for (int c = 0; c < d; ++c) g.push_back(rec.m.at(rec.tail, c));
            return g;
        };
        for (int i = 0; i < ep.n(); ++i) {
            std::vector<reduced::Vec> sg;
            for (const Instance& s : ep.support[i]) {
                sg.push_back(global_of(frozen.at(FrozenStore::instance_key(s))));
            }
            in.support_global.push_back(sg);
            const auto& rel = frozen.at(FrozenStore::relation_key(ep.relation_ids[i]));
            reduced::Vec cls;
            for (int c = 0; c < d; ++c) cls.push_back(rel.m.at(rel.cls, c));
            in.cls.push_back(cls);
        }
        for (const auto& [q, label] : ep.query) {
            in.query_global.push_back(global_of(frozen.at(FrozenStore::instance_key(q))));
            in.labels.push_back(label);
        }
        in.w = store.block("w_rel").data;
        in.b = store.block("b_rel").data;
        const reduced::Result want = reduced::run(in);

        const auto offsets = block_offsets(store);
        std::size_t w_off = 0, b_off = 0;
        for (const auto& [name, off] : offsets) {
            if (name == "w_rel") w_off = off;
            if (name == "b_rel") b_off = off;
        }
        double max_dev =
            std::abs(fb.breakdown.total - want.loss) / std::max(1.0, std::abs(want.loss));
        for (std::size_t i = 0; i < want.d_w.size(); ++i) {
            max_dev = std::max(max_dev, std::abs(fb.gradients[w_off + i] - want.d_w[i]) /
                                            std::max(std::abs(want.d_w[i]), 1e-3));
        }
        for (std::size_t i = 0; i < want.d_b.size(); ++i) {
            max_dev = std::max(max_dev, std::abs(fb.gradients[b_off + i] - want.d_b[i]) /
                                            std::max(std::abs(want.d_b[i]), 1e-3));
        }
        std::printf("  reduced-path max deviation %.3e (< 1e-10)\n", max_dev);
        ok = ok && max_dev < 1e-10;
    }

    report(2, "reduction identities", ok);
    CHECK(ok);
}

TEST_CASE("3 normalization suite") {
    // Attention weights, query probability rows, and batch task weights all
    // sum to 1 within 1e-9 across 1,000 randomized shapes.
    constexpr double kTol = 1e-9;
    auto rng = substream(7, "gradcheck");
    bool ok = true;
    for (int trial = 0; trial < 1000 && ok; ++trial) {
        // attention weight vector: softmax of row-sum logits
        {
            const int rows = 1 + static_cast<int>(bounded(rng, 12));
            std::vector<double> logits(rows);
            for (double& v : logits) v = uniform_range(rng, -30.0, 30.0);
            double s = 0.0;
            for (double v : softmax(logits)) s += v;
            ok = ok && std::abs(s - 1.0) <= kTol;
        }
        // query probability rows
        {
            const int n = 2 + static_cast<int>(bounded(rng, 5));
            const int r = 1 + static_cast<int>(bounded(rng, 4));
            const int dim = 1 + static_cast<int>(bounded(rng, 6));
            HybridReps<double> reps;
            for (int i = 0; i < n; ++i) reps.proto_hybrid.push_back(testutil::random_vec(dim, rng, -3.0, 3.0));
            for (int j = 0; j < r; ++j) reps.query_hybrid.push_back(testutil::random_vec(dim, rng, -3.0, 3.0));
            for (const auto& row : score_queries(reps)) {
                double s = 0.0;
                for (double v : row) s += v;
                ok = ok && std::abs(s - 1.0) <= kTol;
            }
        }
        // batch task weights
        {
            const int t = 1 + static_cast<int>(bounded(rng, 8));
            std::vector<double> frob(t);
            for (double& v : frob) v = uniform_range(rng, 0.0, 20.0);
            double s = 0.0;
            for (double v : task_weights(frob)) s += v;
            ok = ok && std::abs(s - 1.0) <= kTol;
        }
    }
    report(3, "normalization suite", ok);
    CHECK(ok);
}

TEST_CASE("4 hardness ordering") {
    // A task whose class vectors are small perturbations of a common vector
    // (pairwise cosine > 0.9) must outweigh a task with orthogonal classes.
    auto rng = substream(11, "gradcheck");
    int violations = 0;
    const int dim = 6, n = 3;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::vector<double>> similar;
        bool cos_ok = false;
        while (!cos_ok) {
            const std::vector<double> base = testutil::random_vec(dim, rng, -1.0, 1.0);
            similar.clear();
            for (int i = 0; i < n; ++i) {
                std::vector<double> v = base;
                for (double& x : v) x += uniform_range(rng, -0.05, 0.05);
                similar.push_back(v);
            }
            cos_ok = true;
            for (int i = 0; i < n && cos_ok; ++i) {
                for (int j = i + 1; j < n && cos_ok; ++j) {
                    double dij = 0.0, di = 0.0, dj = 0.0;
                    for (int c = 0; c < dim; ++c) {
                        dij += similar[i][c] * similar[j][c];
                        di += similar[i][c] * similar[i][c];
                        dj += similar[j][c] * similar[j][c];
                    }
                    cos_ok = dij / std::sqrt(di * dj) > 0.9;
                }
            }
        }
        std::vector<std::vector<double>> orthogonal(n, std::vector<double>(dim, 0.0));
        for (int i = 0; i < n; ++i) orthogonal[i][i] = uniform_range(rng, 0.5, 2.0);

        const double frob_sim = frobenius_norm(task_similarity_matrix(similar));
        const double frob_orth = frobenius_norm(task_similarity_matrix(orthogonal));
        const std::vector<double> w = task_weights<double>({frob_sim, frob_orth});
        if (!(w[0] > w[1])) ++violations;
    }
    std::printf("  violations %d / 100\n", violations);
    report(4, "hardness ordering", violations == 0);
    CHECK(violations == 0);
}

TEST_CASE("5 oracle equivalence") {
    constexpr double kTol = 1e-12;
    bool ok = true;

    // 200 random small episodes against the naive scalar-loop oracle.
    double worst = 0.0;
    for (int trial = 0; trial < 200 && ok; ++trial) {
        auto rng = substream(trial, "synthetic");
        const int n = 2 + static_cast<int>(bounded(rng, 2));   // 2..3
        const int k = 1 + static_cast<int>(bounded(rng, 2));   // 1..2
        const int r = 1 + static_cast<int>(bounded(rng, 3));   // 1..3
        const int d = 1 + static_cast<int>(bounded(rng, 3));   // 1..3
        const int len = 2 + static_cast<int>(bounded(rng, 3)); // 2..4
        const auto data = testutil::make_tiny(4, 6, len, 10);
        const Vocab vocab = Vocab::build(data.corpus, data.catalog);
        const bool mixing = bounded(rng, 2) == 0;
        const ParamStore store = ParamStore::init(vocab.size(), d, mixing, rng);
        const Episode ep = sample_episode(data.corpus, n, k, r, rng);
        ModelConfig cfg;  // gamma = 1, lambda = 1

        const ParamSet<double> params = value_params(store);
        const auto fwd = forward_batch(params, vocab, data.catalog, {ep}, cfg);
        const EncodedEpisode<double> enc = encode_episode(params, vocab, data.catalog, ep, cfg);
        const oracle::Result res =
            oracle::run_episode(testutil::to_oracle_episode(enc, ep, params), cfg.gamma);
        const oracle::BatchTotals want = oracle::batch_totals({res}, cfg.lambda, true);

        double dev = std::abs(fwd.breakdown.task_focal - want.task_focal);
        dev = std::max(dev, std::abs(fwd.breakdown.contrastive - want.contrastive));
        dev = std::max(dev, std::abs(fwd.breakdown.total - want.total));
        dev = std::max(dev, std::abs(fwd.breakdown.frob_norms[0] - res.frob));
        for (int j = 0; j < r; ++j) {
            for (int i = 0; i < n; ++i) {
                dev = std::max(dev, std::abs(fwd.episodes[0].probs[j][i] - res.probs[j][i]));
            }
        }
        worst = std::max(worst, dev);
        ok = ok && dev <= kTol;
    }
    std::printf("  worst oracle deviation %.3e (<= 1e-12)\n", worst);

    // The documented 2-way 1-shot d=1 worked example, to printed precision
    // (docs/hand_trace.md, 9 decimal places).
    {
        constexpr double kPrintTol = 5e-10;
        ParamSet<double> params;
        params.d = 1;
        params.vocab_size = 0;
        params.has_mixing = false;
        params.w_rel = {1.0, -1.0};
        params.b_rel = {0.0, 0.0};

        auto make_emb = [](std::vector<double> col, int head, int tail, int cls) {
            TokenEmbeddings<double> e;
            e.m = Mat<double>(static_cast<int>(col.size()), 1);
            for (std::size_t i = 0; i < col.size(); ++i) e.m.at(static_cast<int>(i), 0) = col[i];
            e.head = head;
            e.tail = tail;
            e.cls = cls;
            return e;
        };
        EncodedEpisode<double> enc;
        enc.support_emb = {{make_emb({1.0, 0.0}, 0, 1, -1)}, {make_emb({0.0, 1.0}, 0, 1, -1)}};
        enc.relation_emb = {make_emb({0.5, 1.0}, -1, -1, 0), make_emb({-0.5, 0.5}, -1, -1, 0)};
        enc.query_emb = {make_emb({1.0, 0.0}, 0, 1, -1), make_emb({0.0, 1.0}, 0, 1, -1)};
        for (int i = 0; i < 2; ++i) {
            enc.support_global.push_back({global_instance_feature(enc.support_emb[i][0])});
            enc.relation_global.push_back(global_relation_feature(params, enc.relation_emb[i]));
            enc.query_global.push_back(global_instance_feature(enc.query_emb[i]));
        }

        const HybridReps<double> reps = assemble_hybrid(enc);
        const auto probs = score_queries(reps);
        const double focal0 = focal_loss(probs[0], 0, 1.0);
        const double focal1 = focal_loss(probs[1], 1, 1.0);
        std::vector<std::vector<double>> class_reps = {
            concat(reps.relation_hybrid[0], reps.proto_hybrid[0]),
            concat(reps.relation_hybrid[1], reps.proto_hybrid[1])};
        const Mat<double> sim = task_similarity_matrix(class_reps);
        const double frob = frobenius_norm(sim);
        const double weight = task_weights<double>({frob})[0];
        const double contrastive = contrastive_loss(reps);
        const double task_focal = weight * (focal0 + focal1) / 2.0;
        const double total = task_focal + 1.0 * contrastive;

        // the numbers printed in docs/hand_trace.md
        const std::vector<std::vector<double>> doc_hybrids = {
            {0.500000000, -0.500000000, 0.811229666},   // relation 1
            {-0.500000000, 0.500000000, 0.231058579},   // relation 2
            {1.500000000, -0.500000000, 1.628804142},   // prototype 1
            {-0.500000000, 1.500000000, 0.731058579},   // prototype 2
            {1.000000000, 0.000000000, 0.731058579},    // query 1
            {0.000000000, 1.000000000, 0.731058579}};   // query 2
        const std::vector<const std::vector<double>*> got_hybrids = {
            &reps.relation_hybrid[0], &reps.relation_hybrid[1], &reps.proto_hybrid[0],
            &reps.proto_hybrid[1],    &reps.query_hybrid[0],    &reps.query_hybrid[1]};
        double dev = 0.0;
        for (std::size_t i = 0; i < doc_hybrids.size(); ++i) {
            for (int c = 0; c < 3; ++c) dev = std::max(dev, std::abs((*got_hybrids[i])[c] - doc_hybrids[i][c]));
        }
        dev = std::max(dev, std::abs(probs[0][0] - 0.934398509));
        dev = std::max(dev, std::abs(probs[0][1] - 0.065601491));
        dev = std::max(dev, std::abs(probs[1][0] - 0.206903007));
        dev = std::max(dev, std::abs(probs[1][1] - 0.793096993));
        dev = std::max(dev, std::abs(focal0 - 0.004451210));
        dev = std::max(dev, std::abs(focal1 - 0.047962135));
        dev = std::max(dev, std::abs(sim.at(0, 1) - -0.130673376));
        dev = std::max(dev, std::abs(frob - 1.426236678));
        dev = std::max(dev, std::abs(weight - 1.0));
        dev = std::max(dev, std::abs(contrastive - 0.217321400));
        dev = std::max(dev, std::abs(task_focal - 0.026206672));
        dev = std::max(dev, std::abs(total - 0.243528072));
        std::printf("  worked-example deviation %.3e (<= 5e-10)\n", dev);
        ok = ok && dev <= kPrintTol;
    }

    report(5, "oracle equivalence", ok);
    CHECK(ok);
}

TEST_CASE("6 contrastive symmetry value") {
    // All pairwise anchor-candidate dot products equal, N=3: every anchor
    // contributes -log(1/3), so the loss is 3 ln 3.
    HybridReps<double> reps;
    reps.proto_hybrid = {{0.3, 0.3, 0.3}, {0.3, 0.3, 0.3}, {0.3, 0.3, 0.3}};
    reps.relation_hybrid = {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}};
    reps.query_hybrid = {};
    const double got = contrastive_loss(reps);
    const double want = 3.0 * std::log(3.0);
    const bool ok = std::abs(got - want) <= 1e-9;
    std::printf("  L_C %.12f vs 3 ln 3 = %.12f\n", got, want);
    report(6, "contrastive symmetry value", ok);
    CHECK(ok);
}

TEST_CASE("7 desk-scale learning") {
    // Synthetic corpus (8 clusters x 3 relations x 100 instances, hardness
    // 0.7), toy encoder d=16, 2,000 iterations: 5-way 1-shot random-setting
    // accuracy above 0.85 averaged over 3 seeds, inside 10 minutes.
    const auto t0 = std::chrono::steady_clock::now();
    SyntheticSpec spec;  // 8 x 3 x 100, hardness 0.7
    const SyntheticData data = make_synthetic_corpus(spec);
    double mean = 0.0;
    for (std::uint64_t seed : {1, 2, 3}) {
        TrainConfig cfg;  // 5-way 1-shot, 5 queries, 4 episodes per batch, 2000 iters
        cfg.d = 16;
        cfg.seed = seed;
        const TrainResult tr = train(cfg, data.corpus, data.catalog);
        EvalConfig ec;
        ec.n = 5;
        ec.k = 1;
        ec.r = 5;
        ec.episodes = 200;
        ec.seed = seed;
        const EvalReport rep =
            evaluate(tr.params, tr.vocab, data.catalog, data.corpus, cfg.model(), ec);
        std::printf("  seed %llu accuracy %.4f\n", static_cast<unsigned long long>(seed),
                    rep.accuracy);
        mean += rep.accuracy / 3.0;
    }
    const double elapsed = seconds_since(t0);
    const bool ok = mean > 0.85 && elapsed < 600.0;
    std::printf("  mean accuracy %.4f (> 0.85), %.1fs (< 600s)\n", mean, elapsed);
    report(7, "desk-scale learning", ok);
    CHECK(ok);
}

TEST_CASE("8 directional ablation") {
    // Full objective vs. the no-contrastive variant on the synthetic hard
    // setting (3 same-cluster relations), 5 shared seeds. A reversal beyond
    // one pooled standard deviation fails; a tie within noise is reported.
    SyntheticSpec spec;
    const SyntheticData data = make_synthetic_corpus(spec);
    TrainConfig base;
    base.d = 16;
    TrainConfig no_contrastive = base;
    no_contrastive.disable_contrastive = true;
    EvalConfig ec;
    ec.setting = EvalSetting::kHard;
    ec.n = 3;
    ec.k = 1;
    ec.r = 5;
    ec.episodes = 200;
    ec.seed = 7;
    const auto rows = compare_ablations(data.corpus, data.catalog,
                                        {{"full", base}, {"no-contrastive", no_contrastive}}, ec,
                                        {1, 2, 3, 4, 5});
    const double gap = rows[0].mean - rows[1].mean;
    const double sd = pooled_sd(rows[0].stddev, rows[1].stddev);
    std::printf("  full %.4f +/- %.4f, no-contrastive %.4f +/- %.4f, gap %+.4f (pooled sd %.4f)\n",
                rows[0].mean, rows[0].stddev, rows[1].mean, rows[1].stddev, gap, sd);
    const bool ok = gap >= -sd;
    report(8, "directional ablation", ok);
    CHECK(ok);
}

TEST_CASE("9 determinism") {
    // Rerunning train and eval through the CLI with identical configs and
    // seeds reproduces the metrics log, checkpoint, and report bitwise.
    const fs::path dir = fs::temp_directory_path() / "hcrp_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto run = [&](const std::string& args) {
        const std::string cmd =
            std::string(HCRP_CLI_PATH) + " " + args + " > " + (dir / "log.txt").string() + " 2>&1";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    };
    auto read_file = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream out;
        out << in.rdbuf();
        return out.str();
    };
    const std::string corpus = (dir / "corpus.json").string();
    const std::string catalog = (dir / "catalog.json").string();
    bool ok = run("make-synthetic --clusters 3 --relations-per-cluster 2 --instances 12"
                  " --vocab 60 --hardness 0.5 --seed 5 --sentence-tokens 4 --corpus-out " +
                  corpus + " --catalog-out " + catalog) == 0;
    const std::string train_flags = "train --corpus " + corpus + " --catalog " + catalog +
                                    " --n 3 --k 1 --r 3 --t 2 --d 4 --iters 40 --seed 11"
                                    " --out-dir " +
                                    (dir / "train").string();
    for (const char* sub : {"a", "b"}) {
        ok = ok && run(train_flags + sub) == 0;
    }
    ok = ok && read_file(dir / "traina" / "metrics.jsonl") ==
                   read_file(dir / "trainb" / "metrics.jsonl");
    ok = ok && read_file(dir / "traina" / "checkpoint.json") ==
                   read_file(dir / "trainb" / "checkpoint.json");
    const std::string eval_flags = "eval --checkpoint " + (dir / "traina" / "checkpoint.json").string() +
                                   " --corpus " + corpus + " --catalog " + catalog +
                                   " --n 3 --r 3 --episodes 50 --seed 4 --out-dir " +
                                   (dir / "eval").string();
    for (const char* sub : {"a", "b"}) {
        ok = ok && run(eval_flags + sub) == 0;
    }
    ok = ok && read_file(dir / "evala" / "eval_report.json") ==
                   read_file(dir / "evalb" / "eval_report.json");
    report(9, "determinism", ok);
    CHECK(ok);
}
