#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "sketchlp/fixtures.hpp"
#include "sketchlp/predictor.hpp"
#include "test_util.hpp"

using namespace sketchlp;

namespace {

// Central finite differences over every parameter of every layer.
void check_gradients(Mlp& m, const std::vector<float>& x, const std::vector<float>& y,
                     std::size_t batch) {
    Mlp::Cache cache;
    auto logits = m.forward(x, batch, /*training=*/true, 0.0f, nullptr, &cache);
    std::vector<float> dlogits;
    bce_with_logits(logits, y, &dlogits);
    auto g = m.backward(cache, dlogits);

    const double h = 1e-3;
    auto loss_at = [&]() {
        auto l = m.forward(x, batch, true, 0.0f, nullptr);
        return bce_with_logits(l, y);
    };
    for (std::size_t li = 0; li < m.layers().size(); ++li) {
        auto probe = [&](std::vector<float>& params, const std::vector<float>& grads) {
            for (std::size_t i = 0; i < params.size(); i += std::max<std::size_t>(params.size() / 25, 1)) {
                const float orig = params[i];
                params[i] = orig + static_cast<float>(h);
                const double lp = loss_at();
                params[i] = orig - static_cast<float>(h);
                const double lm = loss_at();
                params[i] = orig;
                const double fd = (lp - lm) / (2.0 * h);
                const double an = grads[i];
                const double denom = std::max({std::abs(fd), std::abs(an), 1e-4});
                CHECK(std::abs(fd - an) / denom <= 1e-2);
            }
        };
        probe(m.layers()[li].w, g.dw[li]);
        probe(m.layers()[li].b, g.db[li]);
    }
}

}  // namespace

TEST_CASE("zero input with zero-initialized final bias gives logit 0") {
    Mlp m = Mlp::create(4, std::vector<std::size_t>{8}, 3);
    std::vector<float> x(4, 0.0f);
    auto logits = m.forward(x, 1, false, 0.0f, nullptr);
    CHECK(logits[0] == 0.0f);
}

TEST_CASE("analytic gradients match central finite differences") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<float> u(-1.0f, 1.0f);
    struct Shape {
        std::size_t in;
        std::vector<std::size_t> hidden;
    };
    for (const auto& shape : {Shape{6, {16, 8}}, Shape{3, {4}}, Shape{10, {32, 16, 8}}, Shape{2, {}}}) {
        Mlp m = Mlp::create(shape.in, shape.hidden, 99);
        const std::size_t batch = 10;
        std::vector<float> x(batch * shape.in);
        std::vector<float> y(batch);
        for (auto& v : x) v = u(rng);
        for (auto& v : y) v = rng() % 2 ? 1.0f : 0.0f;
        check_gradients(m, x, y, batch);
    }
}

TEST_CASE("forward is symmetric in the endpoints with swapped structure features") {
    auto g = fixtures::erdos_renyi(60, 0.08, 5);
    SketchConfig scfg;
    auto t = propagate_sketches(g, scfg, 2);

    Predictor p;
    p.cfg.use_node_features = false;
    p.cfg.use_structure_features = true;
    p.sf_dim = 8;
    p.sf_mean.assign(8, 0.0f);
    p.sf_std.assign(8, 1.0f);
    p.model = Mlp::create(8, std::vector<std::size_t>{16}, 7);

    auto scores_uv = predict_batch(p, {{3, 10}}, t, nullptr, g);
    auto scores_vu = predict_batch(p, {{10, 3}}, t, nullptr, g);
    CHECK(scores_uv[0] == scores_vu[0]);
}

TEST_CASE("training loss decreases on a separable toy problem") {
    // two triangles joined by nothing; features make positives separable
    auto g = fixtures::erdos_renyi(40, 0.15, 21);
    SketchConfig scfg;
    SplitConfig sp;
    sp.eval_negatives = 20;
    sp.seed = 1;
    auto split = make_splits(g, sp);
    auto t = propagate_sketches(split.message_graph_train, scfg, 2);

    PredictorConfig cfg;
    cfg.use_node_features = false;
    cfg.hidden_dims = {16};
    cfg.max_epochs = 6;
    cfg.patience = 10;
    cfg.batch_size = 64;
    cfg.eval_k = 10;
    cfg.seed = 3;
    auto r = train_predictor(split.message_graph_train, split, t, nullptr, cfg);
    REQUIRE(r.history.size() >= 5);
    CHECK(r.history[4].train_loss < r.history[0].train_loss);
}

TEST_CASE("structure-only predictor separates triangle-closing labels") {
    // labels = (A[1,1] > 0) is linearly separable from the structure block
    auto g = fixtures::erdos_renyi(80, 0.08, 9);
    SketchConfig scfg;
    auto t = propagate_sketches(g, scfg, 2);

    SplitConfig sp;
    sp.eval_negatives = 30;
    sp.seed = 2;
    auto split = make_splits(g, sp);

    PredictorConfig cfg;
    cfg.use_node_features = false;
    cfg.hidden_dims = {32};
    cfg.max_epochs = 40;
    cfg.patience = 40;
    cfg.batch_size = 128;
    cfg.eval_k = 10;
    cfg.seed = 4;
    auto r = train_predictor(split.message_graph_train, split, t, nullptr, cfg);

    // score pairs with known labels: positives = edges with a common
    // neighbor, negatives = non-adjacent pairs far apart
    EdgeList closing, far;
    auto msg = split.message_graph_train;
    for (auto e : split.train_pos)
        if (exact_counts(msg, e.first, e.second, 1).at(1, 1) > 0) closing.push_back(e);
    for (auto e : sample_negatives(msg, 50, split.train_pos, 11))
        if (pair_distance_capped(msg, e.first, e.second, 2) == DistanceProfile::kBeyond)
            far.push_back(e);
    if (!closing.empty() && !far.empty()) {
        auto sp_scores = predict_batch(r.predictor, closing, t, nullptr, msg);
        auto sn_scores = predict_batch(r.predictor, far, t, nullptr, msg);
        double mp = 0.0, mn = 0.0;
        for (double s : sp_scores) mp += s;
        for (double s : sn_scores) mn += s;
        CHECK(mp / sp_scores.size() > mn / sn_scores.size());
    }
}

TEST_CASE("predictions are in (0,1) and duplicates score identically") {
    auto g = fixtures::erdos_renyi(50, 0.1, 2);
    SketchConfig scfg;
    auto t = propagate_sketches(g, scfg, 2);
    Predictor p;
    p.cfg.use_node_features = false;
    p.sf_dim = 8;
    p.sf_mean.assign(8, 0.0f);
    p.sf_std.assign(8, 1.0f);
    p.model = Mlp::create(8, std::vector<std::size_t>{8}, 1);
    auto scores = predict_batch(p, {{1, 2}, {3, 4}, {1, 2}}, t, nullptr, g);
    CHECK(scores[0] == scores[2]);
    for (double s : scores) {
        CHECK(s > 0.0);
        CHECK(s < 1.0);
    }
    CHECK_THROWS_AS(predict_batch(p, {{1, 200}}, t, nullptr, g), DataError);
}

TEST_CASE("with node features off, predictions ignore raw feature columns") {
    auto base = fixtures::erdos_renyi(40, 0.1, 31);
    FeatureMatrix f1;
    f1.rows = 40;
    f1.cols = 2;
    f1.data.assign(80, 0.0f);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<float> u(-1.0f, 1.0f);
    for (auto& v : f1.data) v = u(rng);
    FeatureMatrix f2 = f1;
    for (std::size_t i = 0; i < f2.rows; ++i) std::swap(f2.data[i * 2], f2.data[i * 2 + 1]);

    auto g1 = Graph::from_edges(40, base.edges(), f1);
    auto g2 = Graph::from_edges(40, base.edges(), f2);

    SplitConfig sp;
    sp.eval_negatives = 20;
    sp.seed = 6;
    auto s1 = make_splits(g1, sp);
    auto s2 = make_splits(g2, sp);

    SketchConfig scfg;
    auto t1 = propagate_sketches(s1.message_graph_train, scfg, 2);
    auto t2 = propagate_sketches(s2.message_graph_train, scfg, 2);

    PredictorConfig cfg;
    cfg.use_node_features = false;
    cfg.hidden_dims = {8};
    cfg.max_epochs = 3;
    cfg.patience = 5;
    cfg.eval_k = 10;
    cfg.seed = 7;
    auto r1 = train_predictor(s1.message_graph_train, s1, t1, nullptr, cfg);
    auto r2 = train_predictor(s2.message_graph_train, s2, t2, nullptr, cfg);
    auto p1 = predict_batch(r1.predictor, s1.test_pos, t1, nullptr, s1.message_graph_train);
    auto p2 = predict_batch(r2.predictor, s2.test_pos, t2, nullptr, s2.message_graph_train);
    CHECK(p1 == p2);
}

TEST_CASE("ablation flags change the input width exactly") {
    auto base = fixtures::erdos_renyi(40, 0.12, 13);
    FeatureMatrix f;
    f.rows = 40;
    f.cols = 3;
    f.data.assign(120, 0.25f);
    auto g = Graph::from_edges(40, base.edges(), f);
    SplitConfig sp;
    sp.eval_negatives = 20;
    sp.seed = 8;
    auto split = make_splits(g, sp);
    SketchConfig scfg;
    auto t = propagate_sketches(split.message_graph_train, scfg, 2);
    auto z = propagate_features(split.message_graph_train, 2);

    PredictorConfig cfg;
    cfg.hidden_dims = {8};
    cfg.max_epochs = 2;
    cfg.patience = 5;
    cfg.eval_k = 10;
    cfg.seed = 9;

    auto both = train_predictor(split.message_graph_train, split, t, &z, cfg);
    CHECK(both.predictor.input_dim() == 3 * 3 + 8);

    cfg.use_node_features = false;
    auto sf_only = train_predictor(split.message_graph_train, split, t, &z, cfg);
    CHECK(sf_only.predictor.input_dim() == 8);

    cfg.use_node_features = true;
    cfg.use_structure_features = false;
    auto nf_only = train_predictor(split.message_graph_train, split, t, &z, cfg);
    CHECK(nf_only.predictor.input_dim() == 9);

    cfg.use_node_features = false;
    CHECK_THROWS_AS(train_predictor(split.message_graph_train, split, t, &z, cfg), ConfigError);
}

TEST_CASE("training is deterministic under the seed") {
    auto g = fixtures::erdos_renyi(60, 0.08, 41);
    SplitConfig sp;
    sp.eval_negatives = 25;
    sp.seed = 10;
    auto split = make_splits(g, sp);
    SketchConfig scfg;
    auto t = propagate_sketches(split.message_graph_train, scfg, 2);

    PredictorConfig cfg;
    cfg.use_node_features = false;
    cfg.hidden_dims = {16};
    cfg.max_epochs = 4;
    cfg.patience = 5;
    cfg.eval_k = 10;
    cfg.seed = 11;
    auto r1 = train_predictor(split.message_graph_train, split, t, nullptr, cfg);
    auto r2 = train_predictor(split.message_graph_train, split, t, nullptr, cfg);
    auto s1 = predict_batch(r1.predictor, split.test_pos, t, nullptr, split.message_graph_train);
    auto s2 = predict_batch(r2.predictor, split.test_pos, t, nullptr, split.message_graph_train);
    CHECK(s1 == s2);
    REQUIRE(r1.history.size() == r2.history.size());
    for (std::size_t i = 0; i < r1.history.size(); ++i)
        CHECK(r1.history[i].train_loss == r2.history[i].train_loss);
}

TEST_CASE("checkpoint round trip gives bit-identical eval predictions") {
    auto g = fixtures::erdos_renyi(60, 0.08, 51);
    SplitConfig sp;
    sp.eval_negatives = 25;
    sp.seed = 12;
    auto split = make_splits(g, sp);
    SketchConfig scfg;
    auto t = propagate_sketches(split.message_graph_train, scfg, 2);

    PredictorConfig cfg;
    cfg.use_node_features = false;
    cfg.hidden_dims = {16, 8};
    cfg.max_epochs = 3;
    cfg.patience = 5;
    cfg.eval_k = 10;
    cfg.seed = 13;
    auto r = train_predictor(split.message_graph_train, split, t, nullptr, cfg);

    auto path = testutil::temp_path("ckpt.bin");
    save_checkpoint(r.predictor, path, 0x1234);
    auto loaded = load_checkpoint(path, cfg, 0x1234);
    auto a = predict_batch(r.predictor, split.test_pos, t, nullptr, split.message_graph_train);
    auto b = predict_batch(loaded, split.test_pos, t, nullptr, split.message_graph_train);
    CHECK(a == b);
    CHECK_THROWS_AS(load_checkpoint(path, cfg, 0x9999), IncompatibleSketchError);
}
