// Command-line front end: preprocess, train, evaluate, oracle-check, bench.
//
// Configuration comes from an optional JSON file (--config); individual flags
// override file values. Exit codes: 0 success, 1 usage/config error, 2 data
// error, 3 metric threshold missed.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sketchlp/bench.hpp"
#include "sketchlp/fixtures.hpp"
#include "sketchlp/graph.hpp"
#include "sketchlp/heuristics.hpp"
#include "sketchlp/metrics.hpp"
#include "sketchlp/predictor.hpp"
#include "sketchlp/propagation.hpp"
#include "sketchlp/split_io.hpp"
#include "sketchlp/splits.hpp"
#include "sketchlp/structure.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sketchlp;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitThreshold = 3;

struct RunConfig {
    std::string dataset = "c6";   // built-in fixture name, dataset name, or edge-list path
    std::string feature_path;     // optional node features
    std::string out = "artifacts";
    std::string model = "buddy";
    int hops = 2;
    int threads = 1;
    SketchConfig sketch;
    SplitConfig split;
    PredictorConfig predictor;
    std::vector<std::uint64_t> seeds{0, 1, 2};          // bench only
    std::map<std::string, double> thresholds;           // e.g. {"test_hits": 0.8}

    // Hash over everything that determines preprocessing artifacts.
    std::uint64_t preprocess_hash() const {
        std::uint64_t h = fnv1a64(dataset.data(), dataset.size());
        h = fnv1a64(feature_path.data(), feature_path.size(), h);
        h = fnv1a64(&hops, sizeof(hops), h);
        const std::uint64_t sh = sketch.hash();
        h = fnv1a64(&sh, sizeof(sh), h);
        h = fnv1a64(&split.train_frac, sizeof(double), h);
        h = fnv1a64(&split.valid_frac, sizeof(double), h);
        h = fnv1a64(&split.test_frac, sizeof(double), h);
        h = fnv1a64(&split.eval_negatives, sizeof(split.eval_negatives), h);
        h = fnv1a64(&split.valid_edges_in_eval_graph, sizeof(bool), h);
        h = fnv1a64(&split.seed, sizeof(split.seed), h);
        return h;
    }

    std::uint64_t train_hash() const {
        const std::uint64_t a = preprocess_hash(), b = predictor.hash();
        std::uint64_t h = fnv1a64(&a, sizeof(a));
        return fnv1a64(&b, sizeof(b), h);
    }
};

void reject_unknown_keys(const json& j, const std::vector<std::string>& allowed,
                         const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            throw ConfigError("unknown config key '" + it.key() + "' in " + where);
}

RunConfig load_config(const std::string& path) {
    RunConfig c;
    if (path.empty()) return c;
    std::ifstream is(path);
    if (!is) throw DataError("cannot open config file: " + path);
    json j;
    try {
        j = json::parse(is);
    } catch (const json::parse_error& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    reject_unknown_keys(j,
                        {"dataset", "features", "out", "model", "hops", "threads", "sketch",
                         "split", "predictor", "seeds", "thresholds"},
                        path);
    c.dataset = j.value("dataset", c.dataset);
    c.feature_path = j.value("features", c.feature_path);
    c.out = j.value("out", c.out);
    c.model = j.value("model", c.model);
    c.hops = j.value("hops", c.hops);
    c.threads = j.value("threads", c.threads);
    if (j.contains("sketch")) {
        const auto& s = j["sketch"];
        reject_unknown_keys(s, {"hll_precision", "minhash_perms", "seed"}, path + ":sketch");
        c.sketch.hll_precision = s.value("hll_precision", c.sketch.hll_precision);
        c.sketch.minhash_perms = s.value("minhash_perms", c.sketch.minhash_perms);
        c.sketch.seed = s.value("seed", c.sketch.seed);
    }
    if (j.contains("split")) {
        const auto& s = j["split"];
        reject_unknown_keys(
            s, {"train_frac", "valid_frac", "test_frac", "eval_negatives",
                "valid_edges_in_eval_graph", "seed"},
            path + ":split");
        c.split.train_frac = s.value("train_frac", c.split.train_frac);
        c.split.valid_frac = s.value("valid_frac", c.split.valid_frac);
        c.split.test_frac = s.value("test_frac", c.split.test_frac);
        c.split.eval_negatives = s.value("eval_negatives", c.split.eval_negatives);
        c.split.valid_edges_in_eval_graph =
            s.value("valid_edges_in_eval_graph", c.split.valid_edges_in_eval_graph);
        c.split.seed = s.value("seed", c.split.seed);
    }
    if (j.contains("predictor")) {
        const auto& p = j["predictor"];
        reject_unknown_keys(p,
                            {"hidden_dims", "dropout", "learning_rate", "weight_decay",
                             "batch_size", "max_epochs", "patience", "use_node_features",
                             "use_structure_features", "eval_k", "seed"},
                            path + ":predictor");
        if (p.contains("hidden_dims"))
            c.predictor.hidden_dims = p["hidden_dims"].get<std::vector<std::size_t>>();
        c.predictor.dropout = p.value("dropout", c.predictor.dropout);
        c.predictor.learning_rate = p.value("learning_rate", c.predictor.learning_rate);
        c.predictor.weight_decay = p.value("weight_decay", c.predictor.weight_decay);
        c.predictor.batch_size = p.value("batch_size", c.predictor.batch_size);
        c.predictor.max_epochs = p.value("max_epochs", c.predictor.max_epochs);
        c.predictor.patience = p.value("patience", c.predictor.patience);
        c.predictor.use_node_features = p.value("use_node_features", c.predictor.use_node_features);
        c.predictor.use_structure_features =
            p.value("use_structure_features", c.predictor.use_structure_features);
        c.predictor.eval_k = p.value("eval_k", c.predictor.eval_k);
        c.predictor.seed = p.value("seed", c.predictor.seed);
    }
    if (j.contains("seeds")) c.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
    if (j.contains("thresholds"))
        c.thresholds = j["thresholds"].get<std::map<std::string, double>>();
    return c;
}

// Resolve a dataset identifier: built-in fixture name, directory or file path,
// or a name under $SKETCHLP_DATA_DIR (default ./data).
Graph resolve_dataset(const RunConfig& c) {
    if (c.dataset == "c6") return fixtures::c6();
    if (c.dataset == "k4") return fixtures::complete(4);
    if (c.dataset == "example8") return fixtures::example8();

    std::string path = c.dataset;
    if (!fs::exists(path)) {
        const char* root = std::getenv("SKETCHLP_DATA_DIR");
        path = std::string(root ? root : "data") + "/" + c.dataset + "/edges.txt";
    } else if (fs::is_directory(path)) {
        path += "/edges.txt";
    }
    if (!fs::exists(path))
        throw DataError("dataset not found: '" + c.dataset +
                        "' is not a fixture (c6|k4|example8), an edge-list path, or a name "
                        "under $SKETCHLP_DATA_DIR (tried " + path + ")");
    LoadOptions opts;
    opts.feature_path = c.feature_path;
    if (opts.feature_path.empty()) {
        const auto sibling = fs::path(path).parent_path() / "features.bin";
        if (fs::exists(sibling)) opts.feature_path = sibling.string();
    }
    auto res = load_edge_list(path, opts);
    std::cerr << "loaded " << c.dataset << ": " << res.graph.num_nodes() << " nodes, "
              << res.graph.num_edges() << " edges";
    if (res.dropped_self_loops || res.dropped_duplicates)
        std::cerr << " (dropped " << res.dropped_self_loops << " self-loops, "
                  << res.dropped_duplicates << " duplicates)";
    std::cerr << "\n";
    return std::move(res.graph);
}

struct MetricsCsv {
    std::ostringstream rows;
    MetricsCsv() { rows << "metric,k,split,value,num_pos,num_neg,seed\n"; }
    void add(const std::string& metric, std::size_t k, const std::string& split, double value,
             std::size_t np, std::size_t nn, std::uint64_t seed) {
        rows << metric << ',' << k << ',' << split << ',' << std::setprecision(17) << value << ','
             << np << ',' << nn << ',' << seed << '\n';
    }
    void write(const std::string& path) const {
        std::ofstream os(path);
        if (!os) throw DataError("cannot write " + path);
        os << rows.str();
    }
};

void write_text(const std::string& path, const std::string& body) {
    std::ofstream os(path);
    if (!os) throw DataError("cannot write " + path);
    os << body;
}

// Threshold check: keys are "<split>_<metric>" (e.g. "test_hits", "valid_hits",
// "test_mrr"); values are minimum acceptable scores.
bool check_thresholds(const RunConfig& c, const std::map<std::string, double>& achieved) {
    bool ok = true;
    for (const auto& [key, minimum] : c.thresholds) {
        auto it = achieved.find(key);
        if (it == achieved.end()) {
            std::cerr << "threshold '" << key << "' does not match any reported metric\n";
            ok = false;
            continue;
        }
        if (it->second < minimum) {
            std::cerr << "threshold miss: " << key << " = " << it->second << " < " << minimum
                      << "\n";
            ok = false;
        } else {
            std::cerr << "threshold ok: " << key << " = " << it->second << " >= " << minimum
                      << "\n";
        }
    }
    return ok;
}

fs::path art_dir(const RunConfig& c) { return fs::path(c.out); }

int cmd_preprocess(const RunConfig& c) {
    c.sketch.validate();
    c.split.validate();
    if (c.hops < 1) throw ConfigError("--hops must be >= 1");
    const auto dir = art_dir(c);
    const std::uint64_t h = c.preprocess_hash();

    const auto manifest_path = dir / "manifest.json";
    if (fs::exists(manifest_path)) {
        std::ifstream ms(manifest_path);
        json m = json::parse(ms, nullptr, false);
        if (!m.is_discarded() && m.value("config_hash", std::uint64_t{0}) == h) {
            std::cout << "up to date (config hash " << std::hex << h << std::dec
                      << " matches " << manifest_path.string() << "); nothing to do\n";
            return kExitOk;
        }
        std::cerr << "config changed; rebuilding artifacts in " << dir.string() << "\n";
    }
    fs::create_directories(dir);

    Graph g = resolve_dataset(c);
    auto split = make_splits(g, c.split);
    save_split(split, c.split, (dir / "split").string());

    StopWatch sw_hash;
    auto t_train = propagate_sketches(split.message_graph_train, c.sketch, c.hops);
    auto t_eval = propagate_sketches(split.message_graph_eval, c.sketch, c.hops);
    const double t_hashing = sw_hash.seconds();
    save_sketch_table(t_train, (dir / "sketch_train.bin").string());
    save_sketch_table(t_eval, (dir / "sketch_eval.bin").string());

    double t_feat = 0.0;
    if (g.has_features()) {
        StopWatch sw;
        auto z_train = propagate_features(split.message_graph_train, c.hops);
        auto z_eval = propagate_features(split.message_graph_eval, c.hops);
        t_feat = sw.seconds();
        save_propagated_features(z_train, (dir / "feat_train.bin").string());
        save_propagated_features(z_eval, (dir / "feat_eval.bin").string());
    }

    StopWatch sw_sf;
    write_edge_feature_cache((dir / "edge_cache_train.bin").string(), t_train,
                             split.message_graph_train, split.train_pos, h);
    const double t_sf = sw_sf.seconds();

    json manifest{
        {"config_hash", h},
        {"dataset", c.dataset},
        {"hops", c.hops},
        {"num_nodes", g.num_nodes()},
        {"num_edges", g.num_edges()},
        {"has_features", g.has_features()},
        {"sketch", {{"hll_precision", c.sketch.hll_precision},
                    {"minhash_perms", c.sketch.minhash_perms},
                    {"seed", c.sketch.seed}}},
    };
    write_text(manifest_path.string(), manifest.dump(2) + "\n");

    const double total = t_hashing + t_feat + t_sf;
    std::cout << "phase,seconds\n"
              << "hashing," << t_hashing << "\n"
              << "feature_propagation," << t_feat << "\n"
              << "structure_features," << t_sf << "\n"
              << "total," << total << "\n";
    std::cout << "artifacts written to " << dir.string() << "\n";
    return kExitOk;
}

struct Artifacts {
    Graph graph;
    EdgeSplit split;
    SketchTable table_train, table_eval;
    std::optional<PropagatedFeatures> z_train, z_eval;
    std::uint64_t config_hash = 0;
};

Artifacts load_artifacts(const RunConfig& c) {
    const auto dir = art_dir(c);
    const auto manifest_path = dir / "manifest.json";
    if (!fs::exists(manifest_path))
        throw DataError("no preprocessing artifacts in " + dir.string() +
                        "; run `sketchlp preprocess` with the same config first");
    std::ifstream ms(manifest_path);
    json m = json::parse(ms);
    const std::uint64_t h = c.preprocess_hash();
    if (m.value("config_hash", std::uint64_t{0}) != h)
        throw ConfigError("artifacts in " + dir.string() +
                          " were built with a different config; rerun `sketchlp preprocess`");
    Artifacts a;
    a.config_hash = h;
    a.graph = resolve_dataset(c);
    a.split = load_split(a.graph, (dir / "split").string());
    a.table_train = load_sketch_table((dir / "sketch_train.bin").string(), c.sketch);
    a.table_eval = load_sketch_table((dir / "sketch_eval.bin").string(), c.sketch);
    if (m.value("has_features", false)) {
        a.z_train = load_propagated_features((dir / "feat_train.bin").string());
        a.z_eval = load_propagated_features((dir / "feat_eval.bin").string());
    }
    return a;
}

int cmd_train(const RunConfig& c) {
    if (c.model != "buddy") {
        std::cout << "model '" << c.model << "' has no trainable parameters; nothing to do\n";
        return kExitOk;
    }
    auto a = load_artifacts(c);
    PredictorConfig pc = c.predictor;
    if (!a.z_train.has_value()) pc.use_node_features = false;
    pc.validate();

    auto r = train_predictor(a.split.message_graph_train, a.split, a.table_train,
                             a.z_train ? &*a.z_train : nullptr, pc);

    const auto dir = art_dir(c);
    save_checkpoint(r.predictor, (dir / "checkpoint.bin").string(), c.train_hash());

    std::ostringstream hist;
    hist << "epoch,train_loss,valid_hits@" << pc.eval_k << "\n";
    for (const auto& e : r.history)
        hist << e.epoch << ',' << std::setprecision(17) << e.train_loss << ',' << e.valid_metric
             << '\n';
    write_text((dir / "history.csv").string(), hist.str());

    std::cout << "trained " << r.history.size() << " epochs; best epoch " << r.best_epoch
              << " with valid hits@" << pc.eval_k << " = " << r.best_valid << "\n"
              << "checkpoint written to " << (dir / "checkpoint.bin").string() << "\n";
    return kExitOk;
}

int cmd_evaluate(const RunConfig& c) {
    const ModelKind model = parse_model(c.model);
    MetricsCsv csv;
    std::map<std::string, double> achieved;
    const std::size_t K = c.predictor.eval_k;

    std::vector<double> vp, vn, tp, tn;
    if (model == ModelKind::buddy) {
        auto a = load_artifacts(c);
        PredictorConfig pc = c.predictor;
        if (!a.z_train.has_value()) pc.use_node_features = false;
        const auto ckpt = art_dir(c) / "checkpoint.bin";
        if (!fs::exists(ckpt))
            throw DataError("no checkpoint at " + ckpt.string() +
                            "; run `sketchlp train` first");
        Predictor p = load_checkpoint(ckpt.string(), pc, c.train_hash());
        vp = predict_batch(p, a.split.valid_pos, a.table_train,
                           a.z_train ? &*a.z_train : nullptr, a.split.message_graph_train);
        vn = predict_batch(p, a.split.valid_neg, a.table_train,
                           a.z_train ? &*a.z_train : nullptr, a.split.message_graph_train);
        tp = predict_batch(p, a.split.test_pos, a.table_eval,
                           a.z_eval ? &*a.z_eval : nullptr, a.split.message_graph_eval);
        tn = predict_batch(p, a.split.test_neg, a.table_eval,
                           a.z_eval ? &*a.z_eval : nullptr, a.split.message_graph_eval);
    } else {
        // Heuristics run standalone: use saved splits when present, otherwise
        // build them in memory from the split config.
        Graph g = resolve_dataset(c);
        EdgeSplit split;
        const auto split_dir = art_dir(c) / "split";
        if (fs::exists(split_dir / "manifest.json"))
            split = load_split(g, split_dir.string());
        else
            split = make_splits(g, c.split);
        vp = heuristic_scores(model, split.message_graph_train, split.valid_pos);
        vn = heuristic_scores(model, split.message_graph_train, split.valid_neg);
        tp = heuristic_scores(model, split.message_graph_eval, split.test_pos);
        tn = heuristic_scores(model, split.message_graph_eval, split.test_neg);
    }

    const std::uint64_t seed = c.split.seed;
    const double vh = hits_at_k(vp, vn, std::min(K, vn.size()));
    const double th = hits_at_k(tp, tn, std::min(K, tn.size()));
    const double tm = mrr_shared(tp, tn);
    csv.add("hits@" + std::to_string(K), K, "valid", vh, vp.size(), vn.size(), seed);
    csv.add("hits@" + std::to_string(K), K, "test", th, tp.size(), tn.size(), seed);
    csv.add("mrr", 0, "test", tm, tp.size(), tn.size(), seed);
    achieved["valid_hits"] = vh;
    achieved["test_hits"] = th;
    achieved["test_mrr"] = tm;

    fs::create_directories(art_dir(c));
    const auto csv_path = art_dir(c) / ("metrics_" + c.model + ".csv");
    csv.write(csv_path.string());
    json report{{"model", c.model},
                {"dataset", c.dataset},
                {"seed", seed},
                {"valid", {{"hits@" + std::to_string(K), vh}}},
                {"test", {{"hits@" + std::to_string(K), th}, {"mrr", tm}}}};
    write_text((art_dir(c) / ("report_" + c.model + ".json")).string(), report.dump(2) + "\n");

    std::cout << csv.rows.str();
    std::cout << "written to " << csv_path.string() << "\n";
    if (!check_thresholds(c, achieved)) return kExitThreshold;
    return kExitOk;
}

int cmd_oracle_check(const RunConfig& c, std::size_t num_pairs, const std::string& out_csv) {
    c.sketch.validate();
    Graph g = resolve_dataset(c);
    auto t = propagate_sketches(g, c.sketch, c.hops);

    std::ostringstream os;
    os << "u,v,feature,estimate,exact,abs_error\n";
    std::mt19937_64 rng(c.sketch.seed);
    std::uniform_int_distribution<NodeId> pick(0, g.num_nodes() - 1);

    struct Stat {
        double mae = 0.0, rel = 0.0, worst = 0.0;
        std::size_t n = 0, rel_n = 0;
    };
    std::map<std::string, Stat> stats;

    for (std::size_t q = 0; q < num_pairs;) {
        NodeId u = pick(rng), v = pick(rng);
        if (u == v) continue;
        ++q;
        auto est = estimate_counts(t, g, u, v);
        auto ex = exact_counts(g, u, v, c.hops);
        auto emit = [&](const std::string& name, double e, double x) {
            const double err = std::abs(e - x);
            os << u << ',' << v << ',' << name << ',' << std::setprecision(17) << e << ',' << x
               << ',' << err << '\n';
            auto& s = stats[name];
            s.mae += err;
            s.worst = std::max(s.worst, err);
            ++s.n;
            if (x > 0) {
                s.rel += err / x;
                ++s.rel_n;
            }
        };
        for (int du = 1; du <= c.hops; ++du)
            for (int dv = 1; dv <= c.hops; ++dv)
                emit("A[" + std::to_string(du) + "," + std::to_string(dv) + "]", est.at(du, dv),
                     ex.at(du, dv));
        for (int d = 1; d <= c.hops; ++d) {
            emit("B_u[" + std::to_string(d) + "]", est.b_u[d - 1], ex.b_u[d - 1]);
            emit("B_v[" + std::to_string(d) + "]", est.b_v[d - 1], ex.b_v[d - 1]);
        }
    }
    write_text(out_csv, os.str());

    std::cout << "feature,mae,mean_rel_error,worst_abs_error,pairs\n";
    for (const auto& [name, s] : stats)
        std::cout << name << ',' << s.mae / static_cast<double>(s.n) << ','
                  << (s.rel_n ? s.rel / static_cast<double>(s.rel_n) : 0.0) << ',' << s.worst
                  << ',' << s.n << '\n';
    std::cout << "per-pair rows written to " << out_csv << "\n";
    return kExitOk;
}

int cmd_bench(const RunConfig& c) {
    Graph g = resolve_dataset(c);
    BenchConfig bc;
    bc.dataset_name = c.dataset;
    bc.split = c.split;
    bc.sketch = c.sketch;
    bc.hops = c.hops;
    bc.predictor = c.predictor;
    bc.model = c.model;
    bc.seeds = c.seeds;
    auto res = run_benchmark(g, bc);

    fs::create_directories(art_dir(c));
    MetricsCsv csv;
    for (const auto& r : res.metrics)
        csv.add(r.metric, static_cast<std::size_t>(r.k), r.split, r.value, r.num_pos, r.num_neg,
                r.seed);
    const auto mpath = art_dir(c) / ("bench_metrics_" + c.model + ".csv");
    csv.write(mpath.string());

    std::ostringstream ts;
    ts << "phase,seconds,dataset,seed\n";
    for (const auto& t : res.timings)
        ts << t.phase << ',' << std::setprecision(17) << t.seconds << ',' << t.dataset << ','
           << t.seed << '\n';
    write_text((art_dir(c) / ("bench_timings_" + c.model + ".csv")).string(), ts.str());

    std::map<std::string, double> achieved;
    std::cout << "metric,split,mean,std,runs\n";
    for (const auto& s : summarize(res.metrics)) {
        std::cout << s.metric << ',' << s.split << ',' << s.mean << ',' << s.std_dev << ','
                  << s.runs << '\n';
        if (s.metric.rfind("hits@", 0) == 0) achieved[s.split + "_hits"] = s.mean;
        if (s.metric == "mrr") achieved[s.split + "_mrr"] = s.mean;
    }
    std::cout << "written to " << mpath.string() << "\n";
    if (!check_thresholds(c, achieved)) return kExitThreshold;
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "link prediction via propagated neighborhood sketches\n"
        "hits@K counts positives scored strictly above the K-th best negative\n"
        "(ties count as misses); mrr averages optimistic and pessimistic tie ranks."};
    app.require_subcommand(1);

    std::string config_path;
    RunConfig cli;  // flag values; only flags the user actually passed override the file
    std::size_t num_pairs = 100;
    std::string oracle_out = "oracle_check.csv";

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file; flags override file values");
        sub->add_option("--dataset", cli.dataset,
                        "fixture name (c6|k4|example8), edge-list path, or dataset name under "
                        "$SKETCHLP_DATA_DIR");
        sub->add_option("--features", cli.feature_path, "node feature file (text or binary)");
        sub->add_option("--out", cli.out, "artifact/report directory");
        sub->add_option("--model", cli.model, "buddy|cn|aa|ra")
            ->check(CLI::IsMember({"buddy", "cn", "aa", "ra"}));
        sub->add_option("--hops", cli.hops, "sketch propagation depth k")->check(CLI::Range(1, 16));
        sub->add_option("--hll-p", cli.sketch.hll_precision, "HyperLogLog precision (registers = 2^p)");
        sub->add_option("--minhash-perms", cli.sketch.minhash_perms, "MinHash signature length");
        sub->add_option("--seed", cli.sketch.seed,
                        "master seed (applied to sketch, split and predictor)");
        sub->add_option("--threads", cli.threads, "worker cap (modules are single-threaded today)")
            ->check(CLI::Range(1, 1024));
    };

    auto* pre = app.add_subcommand("preprocess", "build splits, sketches and feature artifacts");
    auto* train = app.add_subcommand("train", "train the predictor on preprocessed artifacts");
    auto* eval = app.add_subcommand("evaluate", "score a model and emit metric CSV/JSON");
    auto* oracle = app.add_subcommand("oracle-check",
                                      "compare estimated structure counts against the exact oracle");
    auto* bench = app.add_subcommand("bench", "preprocess/train/evaluate over several seeds");
    for (auto* sub : {pre, train, eval, oracle, bench}) add_common(sub);
    oracle->add_option("--num-pairs", num_pairs, "pairs to sample (0 = header-only CSV)");
    oracle->add_option("--report", oracle_out, "output CSV path");
    bench->add_option("--seeds", cli.seeds, "seeds to run");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        RunConfig cfg = load_config(config_path);
        // flag overrides: copy only values the user set
        auto* sub = app.get_subcommands().front();
        auto took = [&](const std::string& f) { return sub->count(f) > 0; };
        if (took("--dataset")) cfg.dataset = cli.dataset;
        if (took("--features")) cfg.feature_path = cli.feature_path;
        if (took("--out")) cfg.out = cli.out;
        if (took("--model")) cfg.model = cli.model;
        if (took("--hops")) cfg.hops = cli.hops;
        if (took("--hll-p")) cfg.sketch.hll_precision = cli.sketch.hll_precision;
        if (took("--minhash-perms")) cfg.sketch.minhash_perms = cli.sketch.minhash_perms;
        if (took("--threads")) cfg.threads = cli.threads;
        if (took("--seed")) {
            cfg.sketch.seed = cli.sketch.seed;
            cfg.split.seed = cli.sketch.seed;
            cfg.predictor.seed = cli.sketch.seed;
        }
        if (sub == bench && bench->count("--seeds")) cfg.seeds = cli.seeds;

        if (sub == pre) return cmd_preprocess(cfg);
        if (sub == train) return cmd_train(cfg);
        if (sub == eval) return cmd_evaluate(cfg);
        if (sub == oracle) return cmd_oracle_check(cfg, num_pairs, oracle_out);
        if (sub == bench) return cmd_bench(cfg);
        return kExitUsage;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
}
