#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "sketchlp/common.hpp"
#include "sketchlp/graph.hpp"

namespace sketchlp {

struct SplitConfig {
    double train_frac = 0.7;
    double valid_frac = 0.1;
    double test_frac = 0.2;
    std::size_t eval_negatives = 1000;  // per split, shared ranking candidates
    bool valid_edges_in_eval_graph = true;
    std::uint64_t seed = 0;

    void validate() const {
        for (double f : {train_frac, valid_frac, test_frac})
            if (!(f > 0.0 && f < 1.0)) throw ConfigError("split fractions must lie in (0,1)");
        if (std::abs(train_frac + valid_frac + test_frac - 1.0) > 1e-9)
            throw ConfigError("split fractions must sum to 1");
    }
};

struct EdgeSplit {
    EdgeList train_pos, valid_pos, test_pos;
    EdgeList valid_neg, test_neg;
    Graph message_graph_train;  // train positives only
    Graph message_graph_eval;   // train (+ valid when configured)
};

// Uniform sample of `count` distinct non-edges of g, excluding `exclude`.
inline EdgeList sample_negatives(const Graph& g, std::size_t count, const EdgeList& exclude,
                                 std::uint64_t seed) {
    const auto n = static_cast<std::uint64_t>(g.num_nodes());
    std::set<Edge> excluded(exclude.begin(), exclude.end());
    std::size_t excluded_nonedges = 0;
    for (const auto& e : excluded)
        if (!g.has_edge(e.first, e.second)) ++excluded_nonedges;
    const std::uint64_t total_pairs = n * (n - 1) / 2;
    if (total_pairs < g.num_edges() + excluded_nonedges + count)
        throw SamplingError("not enough non-edges to sample " + std::to_string(count));

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<NodeId> pick(0, g.num_nodes() - 1);
    std::set<Edge> chosen;
    EdgeList out;
    out.reserve(count);
    while (out.size() < count) {
        NodeId u = pick(rng), v = pick(rng);
        if (u == v) continue;
        Edge e = canonical({u, v});
        if (g.has_edge(e.first, e.second) || excluded.contains(e) || chosen.contains(e)) continue;
        chosen.insert(e);
        out.push_back(e);
    }
    return out;
}

// Random train/valid/test partition of the positive edges plus fixed ranking
// negatives. Deterministic under cfg.seed.
inline EdgeSplit make_splits(const Graph& g, const SplitConfig& cfg) {
    cfg.validate();
    EdgeList edges = g.edges();
    const std::size_t e = edges.size();
    const auto n_train = static_cast<std::size_t>(std::ceil(cfg.train_frac * static_cast<double>(e)));
    const auto n_valid = static_cast<std::size_t>(std::ceil(cfg.valid_frac * static_cast<double>(e)));
    if (n_train + n_valid >= e) throw ConfigError("graph too small for requested split fractions");

    std::mt19937_64 rng(cfg.seed);
    std::shuffle(edges.begin(), edges.end(), rng);

    EdgeSplit s;
    s.train_pos.assign(edges.begin(), edges.begin() + n_train);
    s.valid_pos.assign(edges.begin() + n_train, edges.begin() + n_train + n_valid);
    s.test_pos.assign(edges.begin() + n_train + n_valid, edges.end());

    s.valid_neg = sample_negatives(g, cfg.eval_negatives, {}, cfg.seed ^ 0x9d2c5680u);
    s.test_neg = sample_negatives(g, cfg.eval_negatives, s.valid_neg, cfg.seed ^ 0xefc60000u);

    std::optional<FeatureMatrix> feats_train, feats_eval;
    if (g.has_features()) {
        feats_train = g.features();
        feats_eval = g.features();
    }
    s.message_graph_train = Graph::from_edges(g.num_nodes(), s.train_pos, std::move(feats_train));
    EdgeList eval_edges = s.train_pos;
    if (cfg.valid_edges_in_eval_graph)
        eval_edges.insert(eval_edges.end(), s.valid_pos.begin(), s.valid_pos.end());
    s.message_graph_eval = Graph::from_edges(g.num_nodes(), eval_edges, std::move(feats_eval));
    return s;
}

}  // namespace sketchlp
