#pragma once

#include <string>
#include <vector>

#include "sketchlp/common.hpp"
#include "sketchlp/graph.hpp"
#include "sketchlp/sketch.hpp"

namespace sketchlp {

// Per-node, per-hop sketches of closed d-hop neighborhoods
// (hop 0 = the node itself), with cached HLL cardinalities.
struct SketchTable {
    SketchConfig cfg;
    int hops = 0;
    // indexed [hop][node]
    std::vector<std::vector<HllSketch>> hll;
    std::vector<std::vector<MinhashSketch>> mh;
    std::vector<std::vector<double>> card;

    NodeId num_nodes() const { return hll.empty() ? 0 : static_cast<NodeId>(hll[0].size()); }
};

// Hop-concatenated diffused node features Z = [X(0) || ... || X(k)].
struct PropagatedFeatures {
    int hops = 0;
    std::size_t base_dim = 0;
    FeatureMatrix z;  // num_nodes x (hops+1)*base_dim

    std::span<const float> row(NodeId u) const { return z.row(u); }
};

// Hop d merges each node's own previous sketch with the previous sketches of
// its neighbors, giving distance-<=d (closed neighborhood) semantics.
inline SketchTable propagate_sketches(const Graph& g, const SketchConfig& cfg, int hops) {
    if (hops < 1) throw ConfigError("hops must be >= 1");
    Sketcher sk(cfg);
    SketchTable t;
    t.cfg = cfg;
    t.hops = hops;
    const NodeId n = g.num_nodes();
    t.hll.resize(hops + 1);
    t.mh.resize(hops + 1);
    t.card.assign(hops + 1, std::vector<double>(n, 0.0));

    t.hll[0].reserve(n);
    t.mh[0].reserve(n);
    for (NodeId u = 0; u < n; ++u) {
        SketchPair s = SketchPair::empty(cfg);
        sk.insert(s, u);
        t.card[0][u] = hll_cardinality(s.hll);
        t.hll[0].push_back(std::move(s.hll));
        t.mh[0].push_back(std::move(s.mh));
    }
    for (int d = 1; d <= hops; ++d) {
        t.hll[d].resize(n);
        t.mh[d].resize(n);
        for (NodeId u = 0; u < n; ++u) {
            HllSketch h = t.hll[d - 1][u];
            MinhashSketch m = t.mh[d - 1][u];
            for (NodeId v : g.neighbors(u)) {
                h.merge_in(t.hll[d - 1][v]);
                m.merge_in(t.mh[d - 1][v]);
            }
            t.card[d][u] = hll_cardinality(h);
            t.hll[d][u] = std::move(h);
            t.mh[d][u] = std::move(m);
        }
    }
    return t;
}

// Repeated open-neighborhood mean of the raw features; degree-0 nodes get
// zero vectors in hop blocks >= 1.
inline PropagatedFeatures propagate_features(const Graph& g, int hops) {
    if (!g.has_features()) throw ConfigError("graph has no node features to propagate");
    const NodeId n = g.num_nodes();
    const std::size_t d = g.features().cols;
    PropagatedFeatures out;
    out.hops = hops;
    out.base_dim = d;
    out.z.rows = n;
    out.z.cols = (hops + 1) * d;
    out.z.data.assign(out.z.rows * out.z.cols, 0.0f);

    std::vector<float> prev(g.features().data);
    for (NodeId u = 0; u < n; ++u)
        std::copy(prev.begin() + u * d, prev.begin() + (u + 1) * d, out.z.row(u).begin());

    std::vector<float> cur(n * d);
    for (int l = 1; l <= hops; ++l) {
        for (NodeId u = 0; u < n; ++u) {
            auto ns = g.neighbors(u);
            float* row = cur.data() + u * d;
            std::fill(row, row + d, 0.0f);
            if (ns.empty()) continue;
            for (NodeId v : ns) {
                const float* src = prev.data() + v * d;
                for (std::size_t j = 0; j < d; ++j) row[j] += src[j];
            }
            const float inv = 1.0f / static_cast<float>(ns.size());
            for (std::size_t j = 0; j < d; ++j) row[j] *= inv;
        }
        for (NodeId u = 0; u < n; ++u)
            std::copy(cur.begin() + u * d, cur.begin() + (u + 1) * d,
                      out.z.row(u).begin() + static_cast<std::size_t>(l) * d);
        prev.swap(cur);
    }
    return out;
}

// ---- persistence ----------------------------------------------------------

inline constexpr std::uint32_t kTableMagic = 0x534b5442;  // "SKTB"

inline void save_sketch_table(const SketchTable& t, const std::string& path) {
    auto os = open_out(path);
    write_le<std::uint32_t>(os, kTableMagic);
    write_sketch_header(os, t.cfg);
    write_le<std::int32_t>(os, t.hops);
    write_le<std::uint32_t>(os, t.num_nodes());
    for (int d = 0; d <= t.hops; ++d) {
        for (const auto& h : t.hll[d]) write_vec(os, h.registers);
        for (const auto& m : t.mh[d]) write_vec(os, m.signature);
        write_vec(os, t.card[d]);
    }
    if (!os) throw DataError("write failed: " + path);
}

inline SketchTable load_sketch_table(const std::string& path, const SketchConfig& expected) {
    auto is = open_in(path);
    if (read_le<std::uint32_t>(is) != kTableMagic) throw DataError("bad sketch table magic: " + path);
    SketchTable t;
    t.cfg = read_sketch_header(is);
    if (!(t.cfg == expected))
        throw IncompatibleSketchError("sketch table config mismatch in " + path);
    t.hops = read_le<std::int32_t>(is);
    const auto n = read_le<std::uint32_t>(is);
    t.hll.resize(t.hops + 1);
    t.mh.resize(t.hops + 1);
    t.card.resize(t.hops + 1);
    for (int d = 0; d <= t.hops; ++d) {
        t.hll[d].resize(n);
        t.mh[d].resize(n);
        for (auto& h : t.hll[d]) h.registers = read_vec<std::uint8_t>(is);
        for (auto& m : t.mh[d]) m.signature = read_vec<std::uint64_t>(is);
        t.card[d] = read_vec<double>(is);
    }
    return t;
}

inline void save_propagated_features(const PropagatedFeatures& z, const std::string& path) {
    auto os = open_out(path);
    write_le<std::int32_t>(os, z.hops);
    write_le<std::uint64_t>(os, z.base_dim);
    write_le<std::uint32_t>(os, static_cast<std::uint32_t>(z.z.rows));
    write_le<std::uint32_t>(os, static_cast<std::uint32_t>(z.z.cols));
    os.write(reinterpret_cast<const char*>(z.z.data.data()),
             static_cast<std::streamsize>(z.z.data.size() * sizeof(float)));
    if (!os) throw DataError("write failed: " + path);
}

inline PropagatedFeatures load_propagated_features(const std::string& path) {
    auto is = open_in(path);
    PropagatedFeatures z;
    z.hops = read_le<std::int32_t>(is);
    z.base_dim = read_le<std::uint64_t>(is);
    z.z.rows = read_le<std::uint32_t>(is);
    z.z.cols = read_le<std::uint32_t>(is);
    z.z.data.resize(z.z.rows * z.z.cols);
    is.read(reinterpret_cast<char*>(z.z.data.data()),
            static_cast<std::streamsize>(z.z.data.size() * sizeof(float)));
    if (!is) throw DataError("truncated feature file: " + path);
    return z;
}

}  // namespace sketchlp
