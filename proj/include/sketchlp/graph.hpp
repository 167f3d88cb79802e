#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <fstream>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sketchlp/common.hpp"

namespace sketchlp {

using Edge = std::pair<NodeId, NodeId>;
using EdgeList = std::vector<Edge>;

inline Edge canonical(Edge e) {
    if (e.first > e.second) std::swap(e.first, e.second);
    return e;
}

// Dense node features, row-major.
struct FeatureMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<float> data;

    std::span<const float> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
    std::span<float> row(std::size_t i) { return {data.data() + i * cols, cols}; }
};

// Immutable undirected graph in compressed row form. Neighbor lists are
// sorted ascending, deduplicated, self-loop free.
class Graph {
public:
    Graph() = default;

    // Edges may be given in either orientation and with duplicates; the
    // constructor symmetrizes and cleans them.
    static Graph from_edges(NodeId num_nodes, const EdgeList& edges,
                            std::optional<FeatureMatrix> features = std::nullopt) {
        Graph g;
        g.n_ = num_nodes;
        EdgeList sym;
        sym.reserve(edges.size() * 2);
        for (auto [u, v] : edges) {
            if (u == v) continue;
            if (u >= num_nodes || v >= num_nodes) throw DataError("edge endpoint out of range");
            sym.emplace_back(u, v);
            sym.emplace_back(v, u);
        }
        std::sort(sym.begin(), sym.end());
        sym.erase(std::unique(sym.begin(), sym.end()), sym.end());

        g.offsets_.assign(num_nodes + 1, 0);
        for (auto [u, v] : sym) ++g.offsets_[u + 1];
        std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());
        g.neighbors_.reserve(sym.size());
        for (auto [u, v] : sym) g.neighbors_.push_back(v);

        if (features) {
            if (features->rows != num_nodes)
                throw DataError("feature row count " + std::to_string(features->rows) +
                                " != num_nodes " + std::to_string(num_nodes));
            g.features_ = std::move(*features);
        }
        return g;
    }

    NodeId num_nodes() const { return n_; }
    std::size_t num_edges() const { return neighbors_.size() / 2; }  // undirected count

    std::span<const NodeId> neighbors(NodeId u) const {
        return {neighbors_.data() + offsets_[u], neighbors_.data() + offsets_[u + 1]};
    }

    std::size_t degree(NodeId u) const { return offsets_[u + 1] - offsets_[u]; }

    bool has_edge(NodeId u, NodeId v) const {
        auto ns = neighbors(u);
        return std::binary_search(ns.begin(), ns.end(), v);
    }

    bool has_features() const { return features_.rows > 0; }
    const FeatureMatrix& features() const { return features_; }

    EdgeList edges() const {
        EdgeList out;
        out.reserve(num_edges());
        for (NodeId u = 0; u < n_; ++u)
            for (NodeId v : neighbors(u))
                if (u < v) out.emplace_back(u, v);
        return out;
    }

private:
    NodeId n_ = 0;
    std::vector<std::size_t> offsets_{0};
    std::vector<NodeId> neighbors_;
    FeatureMatrix features_;
};

// ---- truncated BFS -------------------------------------------------------

// Geodesic distances from `source`, truncated at `horizon`; kBeyond marks
// distance > horizon. Serialized externally as -1.
struct DistanceProfile {
    static constexpr std::int32_t kBeyond = -1;
    NodeId source = 0;
    std::vector<std::int32_t> dists;

    bool beyond(NodeId w) const { return dists[w] == kBeyond; }
};

inline DistanceProfile bfs_truncated(const Graph& g, NodeId source, int horizon) {
    if (source >= g.num_nodes()) throw DataError("bfs source out of range");
    if (horizon < 1) throw ConfigError("bfs horizon must be >= 1");
    DistanceProfile p;
    p.source = source;
    p.dists.assign(g.num_nodes(), DistanceProfile::kBeyond);
    p.dists[source] = 0;
    std::vector<NodeId> frontier{source}, next;
    for (int d = 1; d <= horizon && !frontier.empty(); ++d) {
        next.clear();
        for (NodeId u : frontier)
            for (NodeId v : g.neighbors(u))
                if (p.dists[v] == DistanceProfile::kBeyond) {
                    p.dists[v] = d;
                    next.push_back(v);
                }
        frontier.swap(next);
    }
    return p;
}

// dist(u,v) if <= cap, else DistanceProfile::kBeyond. Bidirectional,
// expanding the smaller frontier, so the cost tracks local degrees rather
// than graph size.
inline std::int32_t pair_distance_capped(const Graph& g, NodeId u, NodeId v, int cap) {
    if (u == v) return 0;
    // visited marks: level+1 from u side stored positive, from v side negative
    std::vector<std::int32_t> mark(g.num_nodes(), 0);
    std::vector<NodeId> fu{u}, fv{v}, next;
    mark[u] = 1;
    mark[v] = -1;
    int du = 0, dv = 0;
    while (du + dv < cap && (!fu.empty() || !fv.empty())) {
        const bool expand_u = !fu.empty() && (fv.empty() || fu.size() <= fv.size());
        auto& frontier = expand_u ? fu : fv;
        int& depth = expand_u ? du : dv;
        ++depth;
        next.clear();
        for (NodeId x : frontier)
            for (NodeId y : g.neighbors(x)) {
                if (expand_u ? mark[y] < 0 : mark[y] > 0) return du + dv;  // frontiers met
                if (mark[y] == 0) {
                    mark[y] = expand_u ? depth + 1 : -(depth + 1);
                    next.push_back(y);
                }
            }
        frontier.swap(next);
    }
    return DistanceProfile::kBeyond;
}

// ---- loading -------------------------------------------------------------

struct LoadResult {
    Graph graph;
    std::size_t dropped_self_loops = 0;
    std::size_t dropped_duplicates = 0;
    std::vector<std::uint64_t> id_map;  // dense id -> original id
};

struct LoadOptions {
    bool restrict_to_lcc = false;
    std::string feature_path;  // optional; text or binary (detected by header)
};

namespace detail {

inline std::vector<std::pair<std::uint64_t, std::uint64_t>> parse_edge_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open edge list: " + path);
    std::vector<std::pair<std::uint64_t, std::uint64_t>> raw;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        for (char& c : line)
            if (c == ',') c = ' ';
        std::istringstream ls(line);
        std::uint64_t a, b;
        if (!(ls >> a)) {
            std::string tok;
            std::istringstream probe(line);
            if (!(probe >> tok)) continue;  // blank line
            if (tok[0] == '#') continue;    // comment
            throw DataError("parse error at " + path + ":" + std::to_string(lineno));
        }
        if (!(ls >> b)) throw DataError("parse error at " + path + ":" + std::to_string(lineno));
        raw.emplace_back(a, b);
    }
    return raw;
}

inline FeatureMatrix load_feature_file(const std::string& path, std::size_t expected_rows) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw DataError("cannot open feature file: " + path);
    // Binary format: 8-byte header (u32 num_nodes, u32 dim), then f32 rows.
    // Heuristic: a text file of reals never starts with a plausible matching
    // header, so try binary first and validate the row count.
    std::uint32_t hn = 0, hd = 0;
    probe.read(reinterpret_cast<char*>(&hn), 4);
    probe.read(reinterpret_cast<char*>(&hd), 4);
    if (probe && hn == expected_rows && hd > 0) {
        FeatureMatrix f;
        f.rows = hn;
        f.cols = hd;
        f.data.resize(f.rows * f.cols);
        probe.read(reinterpret_cast<char*>(f.data.data()),
                   static_cast<std::streamsize>(f.data.size() * sizeof(float)));
        if (probe) return f;
    }
    // Text: one row of space-separated reals per node.
    std::ifstream is(path);
    FeatureMatrix f;
    std::string line;
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        std::vector<float> row;
        float x;
        while (ls >> x) row.push_back(x);
        if (row.empty()) continue;
        if (f.cols == 0) f.cols = row.size();
        if (row.size() != f.cols) throw DataError("ragged feature row in " + path);
        f.data.insert(f.data.end(), row.begin(), row.end());
        ++f.rows;
    }
    if (f.rows != expected_rows)
        throw DataError("feature row count " + std::to_string(f.rows) + " != num_nodes " +
                        std::to_string(expected_rows) + " in " + path);
    return f;
}

inline std::vector<NodeId> largest_component(const Graph& g) {
    std::vector<std::int32_t> comp(g.num_nodes(), -1);
    std::int32_t nc = 0;
    std::vector<std::size_t> sizes;
    std::vector<NodeId> stack;
    for (NodeId s = 0; s < g.num_nodes(); ++s) {
        if (comp[s] != -1) continue;
        comp[s] = nc;
        stack.assign(1, s);
        std::size_t size = 0;
        while (!stack.empty()) {
            NodeId u = stack.back();
            stack.pop_back();
            ++size;
            for (NodeId v : g.neighbors(u))
                if (comp[v] == -1) {
                    comp[v] = nc;
                    stack.push_back(v);
                }
        }
        sizes.push_back(size);
        ++nc;
    }
    const auto best = static_cast<std::int32_t>(
        std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
    std::vector<NodeId> keep;
    for (NodeId u = 0; u < g.num_nodes(); ++u)
        if (comp[u] == best) keep.push_back(u);
    return keep;
}

}  // namespace detail

// Loads a whitespace/comma separated edge list of non-negative integer ids.
// Ids are remapped to dense 0..n-1 (map returned); directed input is
// symmetrized; self loops and duplicates are dropped and counted.
inline LoadResult load_edge_list(const std::string& path, const LoadOptions& opts = {}) {
    auto raw = detail::parse_edge_file(path);

    std::vector<std::uint64_t> ids;
    ids.reserve(raw.size() * 2);
    for (auto [a, b] : raw) {
        ids.push_back(a);
        ids.push_back(b);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    auto dense = [&](std::uint64_t x) {
        return static_cast<NodeId>(std::lower_bound(ids.begin(), ids.end(), x) - ids.begin());
    };

    LoadResult res;
    EdgeList edges;
    edges.reserve(raw.size());
    for (auto [a, b] : raw) {
        if (a == b) {
            ++res.dropped_self_loops;
            continue;
        }
        edges.push_back(canonical({dense(a), dense(b)}));
    }
    std::sort(edges.begin(), edges.end());
    auto uniq = std::unique(edges.begin(), edges.end());
    res.dropped_duplicates = static_cast<std::size_t>(edges.end() - uniq);
    edges.erase(uniq, edges.end());

    auto n = static_cast<NodeId>(ids.size());
    Graph g = Graph::from_edges(n, edges);
    res.id_map = ids;

    if (opts.restrict_to_lcc) {
        auto keep = detail::largest_component(g);
        std::vector<NodeId> remap(n, n);
        for (NodeId i = 0; i < keep.size(); ++i) remap[keep[i]] = i;
        EdgeList lcc_edges;
        for (auto [u, v] : edges)
            if (remap[u] != n && remap[v] != n) lcc_edges.emplace_back(remap[u], remap[v]);
        std::vector<std::uint64_t> lcc_ids(keep.size());
        for (NodeId i = 0; i < keep.size(); ++i) lcc_ids[i] = res.id_map[keep[i]];
        res.id_map = std::move(lcc_ids);
        g = Graph::from_edges(static_cast<NodeId>(keep.size()), lcc_edges);
    }

    if (!opts.feature_path.empty()) {
        auto f = detail::load_feature_file(opts.feature_path, g.num_nodes());
        res.graph = Graph::from_edges(g.num_nodes(), g.edges(), std::move(f));
    } else {
        res.graph = std::move(g);
    }
    return res;
}

inline void save_feature_matrix(const FeatureMatrix& f, const std::string& path) {
    auto os = open_out(path);
    write_le<std::uint32_t>(os, static_cast<std::uint32_t>(f.rows));
    write_le<std::uint32_t>(os, static_cast<std::uint32_t>(f.cols));
    os.write(reinterpret_cast<const char*>(f.data.data()),
             static_cast<std::streamsize>(f.data.size() * sizeof(float)));
}

}  // namespace sketchlp
