#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sketchlp/common.hpp"
#include "sketchlp/graph.hpp"
#include "sketchlp/metrics.hpp"
#include "sketchlp/mlp.hpp"
#include "sketchlp/propagation.hpp"
#include "sketchlp/splits.hpp"
#include "sketchlp/structure.hpp"

namespace sketchlp {

struct TrainingDivergedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PredictorConfig {
    std::vector<std::size_t> hidden_dims{256, 256};
    float dropout = 0.5f;
    double learning_rate = 1e-3;
    double weight_decay = 0.0;
    std::size_t batch_size = 1024;
    std::size_t max_epochs = 100;
    std::size_t patience = 20;
    bool use_node_features = true;
    bool use_structure_features = true;
    std::size_t eval_k = 100;  // K for early-stopping Hits@K
    std::uint64_t seed = 0;

    void validate() const {
        if (!use_node_features && !use_structure_features)
            throw ConfigError("predictor needs node features, structure features, or both");
        if (dropout < 0.0f || dropout >= 1.0f) throw ConfigError("dropout must be in [0,1)");
        for (auto w : hidden_dims)
            if (w < 1) throw ConfigError("hidden widths must be >= 1");
    }

    std::uint64_t hash() const {
        std::uint64_t h = fnv1a64(hidden_dims.data(), hidden_dims.size() * sizeof(std::size_t));
        h = fnv1a64(&dropout, sizeof(dropout), h);
        h = fnv1a64(&learning_rate, sizeof(learning_rate), h);
        h = fnv1a64(&weight_decay, sizeof(weight_decay), h);
        h = fnv1a64(&batch_size, sizeof(batch_size), h);
        h = fnv1a64(&use_node_features, sizeof(bool), h);
        h = fnv1a64(&use_structure_features, sizeof(bool), h);
        h = fnv1a64(&seed, sizeof(seed), h);
        return h;
    }
};

// Trained link predictor: MLP over (z_u ⊙ z_v, standardized structure counts).
struct Predictor {
    PredictorConfig cfg;
    Mlp model;
    std::size_t node_dim = 0;  // width of the z_u ⊙ z_v block
    std::size_t sf_dim = 0;    // width of the structure-feature block
    std::vector<float> sf_mean, sf_std;

    std::size_t input_dim() const {
        return (cfg.use_node_features ? node_dim : 0) + (cfg.use_structure_features ? sf_dim : 0);
    }
};

namespace detail {

inline void append_pair_input(std::vector<float>& out, const Predictor& p,
                              const PropagatedFeatures* z, std::span<const float> sf, NodeId u,
                              NodeId v) {
    if (p.cfg.use_node_features) {
        auto zu = z->row(u);
        auto zv = z->row(v);
        for (std::size_t i = 0; i < zu.size(); ++i) out.push_back(zu[i] * zv[i]);
    }
    if (p.cfg.use_structure_features) {
        for (std::size_t i = 0; i < sf.size(); ++i)
            out.push_back((sf[i] - p.sf_mean[i]) / p.sf_std[i]);
    }
}

inline std::vector<float> sf_row(const SketchTable& t, const Graph& g, Edge e) {
    auto c = canonical(e);
    return estimate_counts(t, g, c.first, c.second).flatten();
}

}  // namespace detail

// Sigmoid link probabilities for a batch of node pairs. Pairs are
// canonicalized, so duplicate and reversed pairs score identically.
inline std::vector<double> predict_batch(const Predictor& p, const EdgeList& pairs,
                                         const SketchTable& t, const PropagatedFeatures* z,
                                         const Graph& g) {
    if (p.cfg.use_node_features && z == nullptr)
        throw ConfigError("predictor was trained with node features; none provided");
    std::vector<double> scores;
    scores.reserve(pairs.size());
    std::vector<float> input;
    for (auto e : pairs) {
        if (e.first >= g.num_nodes() || e.second >= g.num_nodes())
            throw DataError("predict: node id out of range");
        input.clear();
        auto sf = p.cfg.use_structure_features ? detail::sf_row(t, g, e) : std::vector<float>{};
        detail::append_pair_input(input, p, z, sf, e.first, e.second);
        auto logits = p.model.forward(input, 1, /*training=*/false, 0.0f, nullptr);
        scores.push_back(sigmoid(logits[0]));
    }
    return scores;
}

struct EpochStats {
    std::size_t epoch = 0;
    double train_loss = 0.0;
    double valid_metric = 0.0;
};

struct TrainResult {
    Predictor predictor;
    std::vector<EpochStats> history;
    std::size_t best_epoch = 0;
    double best_valid = 0.0;
};

// Minibatch Adam training on train positives vs per-epoch resampled 1:1
// negatives, early-stopped on validation Hits@K. Deterministic under
// cfg.seed. `g` is the training message graph.
inline TrainResult train_predictor(const Graph& g, const EdgeSplit& split, const SketchTable& table,
                                   const PropagatedFeatures* z, const PredictorConfig& cfg) {
    cfg.validate();
    if (cfg.use_node_features && z == nullptr)
        throw ConfigError("use_node_features requires propagated features; run preprocessing first");

    Predictor p;
    p.cfg = cfg;
    p.node_dim = cfg.use_node_features ? z->z.cols : 0;
    p.sf_dim = static_cast<std::size_t>(table.hops) * (table.hops + 2);

    // Structure features of the train positives, computed once.
    std::vector<std::vector<float>> pos_sf;
    if (cfg.use_structure_features) {
        pos_sf.reserve(split.train_pos.size());
        for (auto e : split.train_pos) pos_sf.push_back(detail::sf_row(table, g, e));
    }

    // Standardization stats from train positives plus one seeded negative
    // sample (counts span orders of magnitude).
    p.sf_mean.assign(p.sf_dim, 0.0f);
    p.sf_std.assign(p.sf_dim, 1.0f);
    std::vector<std::vector<float>> stat_rows;
    if (cfg.use_structure_features) {
        stat_rows = pos_sf;
        for (auto e : sample_negatives(g, split.train_pos.size(), split.train_pos, cfg.seed ^ 0x5f5fULL))
            stat_rows.push_back(detail::sf_row(table, g, e));
        for (std::size_t j = 0; j < p.sf_dim; ++j) {
            double mean = 0.0;
            for (const auto& r : stat_rows) mean += r[j];
            mean /= static_cast<double>(stat_rows.size());
            double var = 0.0;
            for (const auto& r : stat_rows) var += (r[j] - mean) * (r[j] - mean);
            var /= static_cast<double>(stat_rows.size());
            p.sf_mean[j] = static_cast<float>(mean);
            p.sf_std[j] = static_cast<float>(std::max(std::sqrt(var), 1e-6));
        }
    }

    p.model = Mlp::create(p.input_dim(), cfg.hidden_dims, cfg.seed);
    AdamOptimizer opt(p.model, cfg.learning_rate, cfg.weight_decay);
    std::mt19937_64 rng(cfg.seed ^ 0x7a17a1ULL);

    TrainResult result;
    Mlp best_model = p.model;
    std::size_t since_best = 0;

    const std::size_t n_pos = split.train_pos.size();
    std::vector<std::size_t> order(n_pos);
    for (std::size_t i = 0; i < n_pos; ++i) order[i] = i;

    for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        EdgeList negs = sample_negatives(g, n_pos, split.train_pos,
                                         cfg.seed ^ (0x9e3779b9ULL + epoch));
        double epoch_loss = 0.0;
        std::size_t batches = 0;
        std::vector<float> batch_x;
        std::vector<float> batch_y;
        for (std::size_t start = 0; start < n_pos; start += cfg.batch_size) {
            const std::size_t end = std::min(start + cfg.batch_size, n_pos);
            batch_x.clear();
            batch_y.clear();
            for (std::size_t i = start; i < end; ++i) {
                const std::size_t idx = order[i];
                auto e = split.train_pos[idx];
                detail::append_pair_input(batch_x, p, z,
                                          cfg.use_structure_features ? std::span<const float>(pos_sf[idx])
                                                                     : std::span<const float>{},
                                          e.first, e.second);
                batch_y.push_back(1.0f);
                auto ne = negs[i];
                auto nsf = cfg.use_structure_features ? detail::sf_row(table, g, ne)
                                                      : std::vector<float>{};
                detail::append_pair_input(batch_x, p, z, nsf, ne.first, ne.second);
                batch_y.push_back(0.0f);
            }
            const std::size_t bs = batch_y.size();
            Mlp::Cache cache;
            auto logits = p.model.forward(batch_x, bs, /*training=*/true, cfg.dropout, &rng, &cache);
            std::vector<float> dlogits;
            const double loss = bce_with_logits(logits, batch_y, &dlogits);
            if (!std::isfinite(loss))
                throw TrainingDivergedError("NaN loss at epoch " + std::to_string(epoch) +
                                            ", batch " + std::to_string(batches));
            auto grads = p.model.backward(cache, dlogits);
            opt.step(p.model, grads);
            epoch_loss += loss;
            ++batches;
        }
        epoch_loss /= static_cast<double>(std::max<std::size_t>(batches, 1));

        auto pos_scores = predict_batch(p, split.valid_pos, table, z, g);
        auto neg_scores = predict_batch(p, split.valid_neg, table, z, g);
        const double metric = hits_at_k(pos_scores, neg_scores,
                                        std::min(cfg.eval_k, neg_scores.size()));
        result.history.push_back({epoch, epoch_loss, metric});

        if (metric > result.best_valid || result.history.size() == 1) {
            result.best_valid = metric;
            result.best_epoch = epoch;
            best_model = p.model;
            since_best = 0;
        } else if (++since_best >= cfg.patience) {
            break;
        }
    }
    p.model = std::move(best_model);
    result.predictor = std::move(p);
    return result;
}

// ---- checkpoint -----------------------------------------------------------

inline constexpr std::uint32_t kCheckpointMagic = 0x534c504d;  // "SLPM"

inline void save_checkpoint(const Predictor& p, const std::string& path,
                            std::uint64_t config_hash) {
    auto os = open_out(path);
    write_le<std::uint32_t>(os, kCheckpointMagic);
    write_le<std::uint64_t>(os, config_hash);
    write_le<std::uint64_t>(os, p.cfg.seed);
    write_le<std::uint8_t>(os, p.cfg.use_node_features ? 1 : 0);
    write_le<std::uint8_t>(os, p.cfg.use_structure_features ? 1 : 0);
    write_le<std::uint64_t>(os, p.node_dim);
    write_le<std::uint64_t>(os, p.sf_dim);
    write_le<std::uint64_t>(os, p.model.layers().size());
    for (const auto& l : p.model.layers()) {
        write_le<std::uint64_t>(os, l.in_dim);
        write_le<std::uint64_t>(os, l.out_dim);
        write_vec(os, l.w);
        write_vec(os, l.b);
    }
    write_vec(os, p.sf_mean);
    write_vec(os, p.sf_std);
    if (!os) throw DataError("checkpoint write failed: " + path);
}

inline Predictor load_checkpoint(const std::string& path, const PredictorConfig& cfg,
                                 std::uint64_t expected_hash) {
    auto is = open_in(path);
    if (read_le<std::uint32_t>(is) != kCheckpointMagic) throw DataError("bad checkpoint magic: " + path);
    const auto h = read_le<std::uint64_t>(is);
    if (h != expected_hash) throw IncompatibleSketchError("checkpoint config hash mismatch: " + path);
    Predictor p;
    p.cfg = cfg;
    p.cfg.seed = read_le<std::uint64_t>(is);
    p.cfg.use_node_features = read_le<std::uint8_t>(is) != 0;
    p.cfg.use_structure_features = read_le<std::uint8_t>(is) != 0;
    p.node_dim = read_le<std::uint64_t>(is);
    p.sf_dim = read_le<std::uint64_t>(is);
    const auto nl = read_le<std::uint64_t>(is);
    std::vector<DenseLayer> layers(nl);
    for (auto& l : layers) {
        l.in_dim = read_le<std::uint64_t>(is);
        l.out_dim = read_le<std::uint64_t>(is);
        l.w = read_vec<float>(is);
        l.b = read_vec<float>(is);
    }
    Mlp m;
    m.layers() = std::move(layers);
    p.model = std::move(m);
    p.sf_mean = read_vec<float>(is);
    p.sf_std = read_vec<float>(is);
    return p;
}

}  // namespace sketchlp
