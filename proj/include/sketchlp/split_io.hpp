#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "sketchlp/graph.hpp"
#include "sketchlp/splits.hpp"

namespace sketchlp {

namespace detail {

inline void write_edge_text(const EdgeList& edges, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw DataError("cannot write " + path);
    for (auto [u, v] : edges) os << u << ' ' << v << '\n';
}

inline EdgeList read_edge_text(const std::string& path) {
    auto raw = parse_edge_file(path);
    EdgeList out;
    out.reserve(raw.size());
    for (auto [a, b] : raw) out.emplace_back(static_cast<NodeId>(a), static_cast<NodeId>(b));
    return out;
}

}  // namespace detail

// Persists the split as edge-list text files plus a JSON manifest carrying
// seed, fractions and counts.
inline void save_split(const EdgeSplit& s, const SplitConfig& cfg, const std::string& dir) {
    std::filesystem::create_directories(dir);
    detail::write_edge_text(s.train_pos, dir + "/train_pos.txt");
    detail::write_edge_text(s.valid_pos, dir + "/valid_pos.txt");
    detail::write_edge_text(s.test_pos, dir + "/test_pos.txt");
    detail::write_edge_text(s.valid_neg, dir + "/valid_neg.txt");
    detail::write_edge_text(s.test_neg, dir + "/test_neg.txt");
    nlohmann::json manifest{
        {"seed", cfg.seed},
        {"fractions", {cfg.train_frac, cfg.valid_frac, cfg.test_frac}},
        {"eval_negatives", cfg.eval_negatives},
        {"valid_edges_in_eval_graph", cfg.valid_edges_in_eval_graph},
        {"counts",
         {{"train_pos", s.train_pos.size()},
          {"valid_pos", s.valid_pos.size()},
          {"test_pos", s.test_pos.size()},
          {"valid_neg", s.valid_neg.size()},
          {"test_neg", s.test_neg.size()}}},
    };
    std::ofstream os(dir + "/manifest.json");
    if (!os) throw DataError("cannot write split manifest in " + dir);
    os << manifest.dump(2) << '\n';
}

inline EdgeSplit load_split(const Graph& g, const std::string& dir) {
    std::ifstream ms(dir + "/manifest.json");
    if (!ms) throw DataError("missing split manifest: " + dir + "/manifest.json");
    nlohmann::json manifest = nlohmann::json::parse(ms);
    EdgeSplit s;
    s.train_pos = detail::read_edge_text(dir + "/train_pos.txt");
    s.valid_pos = detail::read_edge_text(dir + "/valid_pos.txt");
    s.test_pos = detail::read_edge_text(dir + "/test_pos.txt");
    s.valid_neg = detail::read_edge_text(dir + "/valid_neg.txt");
    s.test_neg = detail::read_edge_text(dir + "/test_neg.txt");
    for (const char* key : {"train_pos", "valid_pos", "test_pos", "valid_neg", "test_neg"}) {
        const std::size_t expected = manifest["counts"][key];
        const std::size_t actual = key == std::string("train_pos")   ? s.train_pos.size()
                                   : key == std::string("valid_pos") ? s.valid_pos.size()
                                   : key == std::string("test_pos")  ? s.test_pos.size()
                                   : key == std::string("valid_neg") ? s.valid_neg.size()
                                                                     : s.test_neg.size();
        if (expected != actual)
            throw DataError(std::string("split manifest count mismatch for ") + key + " in " + dir);
    }
    std::optional<FeatureMatrix> f_train, f_eval;
    if (g.has_features()) {
        f_train = g.features();
        f_eval = g.features();
    }
    s.message_graph_train = Graph::from_edges(g.num_nodes(), s.train_pos, std::move(f_train));
    EdgeList eval_edges = s.train_pos;
    if (manifest.value("valid_edges_in_eval_graph", true))
        eval_edges.insert(eval_edges.end(), s.valid_pos.begin(), s.valid_pos.end());
    s.message_graph_eval = Graph::from_edges(g.num_nodes(), eval_edges, std::move(f_eval));
    return s;
}

}  // namespace sketchlp
