#pragma once

#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include "sketchlp/common.hpp"
#include "sketchlp/graph.hpp"
#include "sketchlp/heuristics.hpp"
#include "sketchlp/metrics.hpp"
#include "sketchlp/predictor.hpp"
#include "sketchlp/propagation.hpp"
#include "sketchlp/splits.hpp"
#include "sketchlp/structure.hpp"

namespace sketchlp {

struct TimingReport {
    std::string phase;  // hashing | feature_propagation | structure_features | train_epoch | inference
    double seconds = 0.0;
    std::string dataset;
    std::uint64_t seed = 0;
};

class StopWatch {
public:
    StopWatch() : start_(clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(clock::now() - start_).count();
    }

private:
    using clock = std::chrono::steady_clock;
    clock::time_point start_;
};

enum class ModelKind { buddy, cn, aa, ra };

inline ModelKind parse_model(const std::string& name) {
    if (name == "buddy") return ModelKind::buddy;
    if (name == "cn") return ModelKind::cn;
    if (name == "aa") return ModelKind::aa;
    if (name == "ra") return ModelKind::ra;
    throw ConfigError("unknown model: " + name + " (expected buddy|cn|aa|ra)");
}

inline double heuristic_score(ModelKind m, const Graph& g, NodeId u, NodeId v) {
    switch (m) {
        case ModelKind::cn: return static_cast<double>(common_neighbors(g, u, v));
        case ModelKind::aa: return adamic_adar(g, u, v);
        case ModelKind::ra: return resource_allocation(g, u, v);
        default: throw ConfigError("not a heuristic model");
    }
}

inline std::vector<double> heuristic_scores(ModelKind m, const Graph& g, const EdgeList& pairs) {
    std::vector<double> out;
    out.reserve(pairs.size());
    for (auto [u, v] : pairs) out.push_back(heuristic_score(m, g, u, v));
    return out;
}

struct BenchConfig {
    std::string dataset_name = "dataset";
    SplitConfig split;
    SketchConfig sketch;
    int hops = 2;
    PredictorConfig predictor;
    std::string model = "buddy";
    std::vector<std::uint64_t> seeds{0, 1, 2};
};

struct BenchResult {
    std::vector<MetricReport> metrics;
    std::vector<TimingReport> timings;
};

struct MetricSummary {
    std::string metric;
    std::string split;
    double mean = 0.0;
    double std_dev = 0.0;  // sample std over seeds
    std::size_t runs = 0;
};

inline std::vector<MetricSummary> summarize(const std::vector<MetricReport>& reports) {
    std::vector<MetricSummary> out;
    for (const auto& r : reports) {
        auto it = std::find_if(out.begin(), out.end(), [&](const MetricSummary& s) {
            return s.metric == r.metric && s.split == r.split;
        });
        if (it == out.end()) {
            out.push_back({r.metric, r.split, 0.0, 0.0, 0});
            it = out.end() - 1;
        }
        it->mean += r.value;
        ++it->runs;
    }
    for (auto& s : out) s.mean /= static_cast<double>(s.runs);
    for (auto& s : out) {
        double ss = 0.0;
        for (const auto& r : reports)
            if (r.metric == s.metric && r.split == s.split) ss += (r.value - s.mean) * (r.value - s.mean);
        s.std_dev = s.runs > 1 ? std::sqrt(ss / static_cast<double>(s.runs - 1)) : 0.0;
    }
    return out;
}

// One preprocess -> train -> evaluate pass per seed. Validation is scored
// against train-graph artifacts; test against eval-graph artifacts.
inline BenchResult run_benchmark(const Graph& g, const BenchConfig& cfg) {
    BenchResult res;
    const ModelKind model = parse_model(cfg.model);
    const std::size_t K = cfg.predictor.eval_k;

    for (std::uint64_t seed : cfg.seeds) {
        SplitConfig sp = cfg.split;
        sp.seed = seed;
        EdgeSplit split = make_splits(g, sp);
        const auto n_neg = split.test_neg.size();

        auto push_metric = [&](const std::string& name, int k, double value, const std::string& split_name,
                               std::size_t np) {
            res.metrics.push_back({name, k, value, split_name, seed, np, n_neg});
        };

        if (model != ModelKind::buddy) {
            // Heuristics read the message graph only; no stochasticity.
            auto vp = heuristic_scores(model, split.message_graph_train, split.valid_pos);
            auto vn = heuristic_scores(model, split.message_graph_train, split.valid_neg);
            auto tp = heuristic_scores(model, split.message_graph_eval, split.test_pos);
            StopWatch sw;
            auto tn = heuristic_scores(model, split.message_graph_eval, split.test_neg);
            res.timings.push_back({"inference", sw.seconds(), cfg.dataset_name, seed});
            push_metric("hits@" + std::to_string(K), static_cast<int>(K),
                        hits_at_k(vp, vn, std::min(K, vn.size())), "valid", vp.size());
            push_metric("hits@" + std::to_string(K), static_cast<int>(K),
                        hits_at_k(tp, tn, std::min(K, tn.size())), "test", tp.size());
            push_metric("mrr", 0, mrr_shared(tp, tn), "test", tp.size());
            continue;
        }

        SketchConfig sk = cfg.sketch;
        sk.seed = seed;
        PredictorConfig pc = cfg.predictor;
        pc.seed = seed;

        StopWatch sw_hash;
        SketchTable table_train = propagate_sketches(split.message_graph_train, sk, cfg.hops);
        SketchTable table_eval = propagate_sketches(split.message_graph_eval, sk, cfg.hops);
        res.timings.push_back({"hashing", sw_hash.seconds(), cfg.dataset_name, seed});

        std::optional<PropagatedFeatures> z_train, z_eval;
        if (g.has_features() && pc.use_node_features) {
            StopWatch sw_feat;
            z_train = propagate_features(split.message_graph_train, cfg.hops);
            z_eval = propagate_features(split.message_graph_eval, cfg.hops);
            res.timings.push_back({"feature_propagation", sw_feat.seconds(), cfg.dataset_name, seed});
        } else {
            pc.use_node_features = false;
        }

        StopWatch sw_sf;
        std::vector<StructureFeatureVector> warm;  // touch the estimator path once per edge
        for (auto e : split.train_pos)
            warm.push_back(estimate_counts(table_train, split.message_graph_train, e.first, e.second));
        res.timings.push_back({"structure_features", sw_sf.seconds(), cfg.dataset_name, seed});
        warm.clear();

        StopWatch sw_train;
        auto trained = train_predictor(split.message_graph_train, split, table_train,
                                       z_train ? &*z_train : nullptr, pc);
        const double train_total = sw_train.seconds();
        const auto epochs = std::max<std::size_t>(trained.history.size(), 1);
        res.timings.push_back({"train_epoch", train_total / static_cast<double>(epochs),
                               cfg.dataset_name, seed});

        auto vp = predict_batch(trained.predictor, split.valid_pos, table_train,
                                z_train ? &*z_train : nullptr, split.message_graph_train);
        auto vn = predict_batch(trained.predictor, split.valid_neg, table_train,
                                z_train ? &*z_train : nullptr, split.message_graph_train);
        StopWatch sw_inf;
        auto tp = predict_batch(trained.predictor, split.test_pos, table_eval,
                                z_eval ? &*z_eval : nullptr, split.message_graph_eval);
        auto tn = predict_batch(trained.predictor, split.test_neg, table_eval,
                                z_eval ? &*z_eval : nullptr, split.message_graph_eval);
        res.timings.push_back({"inference", sw_inf.seconds(), cfg.dataset_name, seed});

        push_metric("hits@" + std::to_string(K), static_cast<int>(K),
                    hits_at_k(vp, vn, std::min(K, vn.size())), "valid", vp.size());
        push_metric("hits@" + std::to_string(K), static_cast<int>(K),
                    hits_at_k(tp, tn, std::min(K, tn.size())), "test", tp.size());
        push_metric("mrr", 0, mrr_shared(tp, tn), "test", tp.size());
    }
    return res;
}

}  // namespace sketchlp
