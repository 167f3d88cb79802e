#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "sketchlp/common.hpp"
#include "sketchlp/graph.hpp"
#include "sketchlp/propagation.hpp"

namespace sketchlp {

// The k(k+2) pairwise count features: a[d_u][d_v] counts nodes at exact
// distances (d_u, d_v) from the endpoints, b_u[d] / b_v[d] count nodes at
// exact distance d from one endpoint and beyond the horizon from the other.
// All counts are over V \ {u, v}.
struct StructureFeatureVector {
    int k = 0;
    std::vector<double> a;    // k*k, row-major [d_u-1][d_v-1]
    std::vector<double> b_u;  // k
    std::vector<double> b_v;  // k

    static StructureFeatureVector zeros(int k) {
        StructureFeatureVector s;
        s.k = k;
        s.a.assign(static_cast<std::size_t>(k) * k, 0.0);
        s.b_u.assign(k, 0.0);
        s.b_v.assign(k, 0.0);
        return s;
    }

    double& at(int du, int dv) { return a[static_cast<std::size_t>(du - 1) * k + (dv - 1)]; }
    double at(int du, int dv) const { return a[static_cast<std::size_t>(du - 1) * k + (dv - 1)]; }

    std::size_t size() const { return a.size() + b_u.size() + b_v.size(); }

    // Row layout for caches/predictor input: a row-major, then b_u, then b_v.
    std::vector<float> flatten() const {
        std::vector<float> out;
        out.reserve(size());
        for (double x : a) out.push_back(static_cast<float>(x));
        for (double x : b_u) out.push_back(static_cast<float>(x));
        for (double x : b_v) out.push_back(static_cast<float>(x));
        return out;
    }

    StructureFeatureVector swapped() const {
        StructureFeatureVector s = zeros(k);
        for (int i = 1; i <= k; ++i)
            for (int j = 1; j <= k; ++j) s.at(i, j) = at(j, i);
        s.b_u = b_v;
        s.b_v = b_u;
        return s;
    }
};

// J(m_u, m_v) * card(max(h_u, h_v)): estimated size of the closed-neighborhood
// intersection |N_{d_u}(u) ∩ N_{d_v}(v)|.
inline double estimate_intersection(const SketchTable& t, NodeId u, NodeId v, int d_u, int d_v) {
    if (d_u < 0 || d_u > t.hops || d_v < 0 || d_v > t.hops)
        throw ConfigError("hop out of range for sketch table");
    const double j = minhash_jaccard(t.mh[d_u][u], t.mh[d_v][v]);
    HllSketch un = t.hll[d_u][u];
    un.merge_in(t.hll[d_v][v]);
    return j * hll_cardinality(un);
}

namespace detail {

// Shared shell-peeling core. closed_intersection(x, y) must return
// |N_x(u) ∩ N_y(v)| for 1 <= x,y <= k; shell_size(d) must return
// |{w : dist(u,w) = d}| over all of V; duv is dist(u,v) capped at k
// (DistanceProfile::kBeyond when larger). Endpoint shells (index 0) are
// resolved exactly from duv, which is what corrects closed-set estimates
// down to counts over V \ {u, v}.
template <typename Intersect, typename ShellU, typename ShellV>
StructureFeatureVector peel_counts(int k, std::int32_t duv, Intersect&& closed_intersection,
                                   ShellU&& shell_u, ShellV&& shell_v, bool clamp) {
    auto s = StructureFeatureVector::zeros(k);
    // shell[x][y], x,y in 0..k: nodes at exact distances (x, y). Row/col 0
    // contain only the endpoints themselves.
    std::vector<std::vector<double>> shell(k + 1, std::vector<double>(k + 1, 0.0));
    for (int y = 1; y <= k; ++y) shell[0][y] = (duv == y) ? 1.0 : 0.0;
    for (int x = 1; x <= k; ++x) shell[x][0] = (duv == x) ? 1.0 : 0.0;
    for (int x = 1; x <= k; ++x)
        for (int y = 1; y <= k; ++y) {
            double rect = 0.0;
            for (int i = 0; i <= x; ++i)
                for (int j = 0; j <= y; ++j)
                    if (i != x || j != y) rect += shell[i][j];
            double val = closed_intersection(x, y) - rect;
            if (clamp && val < 0.0) val = 0.0;
            shell[x][y] = val;
            s.at(x, y) = val;
        }
    for (int d = 1; d <= k; ++d) {
        double row = 0.0, col = 0.0;
        for (int j = 1; j <= k; ++j) {
            row += s.at(d, j);
            col += s.at(j, d);
        }
        double bu = shell_u(d) - (duv == d ? 1.0 : 0.0) - row;
        double bv = shell_v(d) - (duv == d ? 1.0 : 0.0) - col;
        if (clamp) {
            bu = std::max(bu, 0.0);
            bv = std::max(bv, 0.0);
        }
        s.b_u[d - 1] = bu;
        s.b_v[d - 1] = bv;
    }
    return s;
}

}  // namespace detail

namespace detail {

inline StructureFeatureVector estimate_counts_impl(const SketchTable& t, const Graph& g, NodeId u,
                                                   NodeId v, bool clamp) {
    if (u == v) throw ConfigError("structure features undefined for u == v");
    // Canonicalize so that estimate_counts(v, u) is the exact transpose/swap
    // of estimate_counts(u, v), with no summation-order float drift.
    const bool flipped = u > v;
    const NodeId a = flipped ? v : u;
    const NodeId b = flipped ? u : v;
    const int k = t.hops;
    const std::int32_t dab = pair_distance_capped(g, a, b, k);

    // Closed intersections include the endpoints; the exact shell row/col 0
    // inside peel_counts peels their contribution back out.
    auto inter = [&](int x, int y) { return estimate_intersection(t, a, b, x, y); };
    auto shell_a = [&](int d) { return t.card[d][a] - t.card[d - 1][a]; };
    auto shell_b = [&](int d) { return t.card[d][b] - t.card[d - 1][b]; };
    auto s = peel_counts(k, dab, inter, shell_a, shell_b, clamp);
    return flipped ? s.swapped() : s;
}

}  // namespace detail

// Sketch-based estimate of the structure feature counts for pair (u, v),
// clamped at zero shell by shell.
inline StructureFeatureVector estimate_counts(const SketchTable& t, const Graph& g, NodeId u, NodeId v) {
    return detail::estimate_counts_impl(t, g, u, v, /*clamp=*/true);
}

// Unclamped variant; test support for checking that raw estimates stay
// within noise of the non-negative truth.
inline StructureFeatureVector estimate_counts_unclamped(const SketchTable& t, const Graph& g,
                                                        NodeId u, NodeId v) {
    return detail::estimate_counts_impl(t, g, u, v, /*clamp=*/false);
}

// Exact oracle: two truncated BFS runs and one pass over the joint labels.
inline StructureFeatureVector exact_counts(const Graph& g, NodeId u, NodeId v, int k) {
    if (u == v) throw ConfigError("structure features undefined for u == v");
    auto pu = bfs_truncated(g, u, k);
    auto pv = bfs_truncated(g, v, k);
    auto s = StructureFeatureVector::zeros(k);
    for (NodeId w = 0; w < g.num_nodes(); ++w) {
        if (w == u || w == v) continue;
        const auto du = pu.dists[w];
        const auto dv = pv.dists[w];
        if (du == DistanceProfile::kBeyond && dv == DistanceProfile::kBeyond) continue;
        if (du != DistanceProfile::kBeyond && dv != DistanceProfile::kBeyond && du >= 1 && dv >= 1)
            s.at(du, dv) += 1.0;
        else if (du != DistanceProfile::kBeyond && du >= 1 && dv == DistanceProfile::kBeyond)
            s.b_u[du - 1] += 1.0;
        else if (dv != DistanceProfile::kBeyond && dv >= 1 && du == DistanceProfile::kBeyond)
            s.b_v[dv - 1] += 1.0;
    }
    return s;
}

// Histogram of DE label pairs (d(u,w), d(v,w)) over V \ {u, v}, horizon k.
// Oracle companion to the counts above; (beyond, beyond) is excluded.
struct DeLabelHistogram {
    int k = 0;
    // index 0..k-1 for exact distances 1..k, index k for "beyond"
    std::vector<std::size_t> counts;  // (k+1) x (k+1) row-major

    std::size_t& at(int iu, int iv) { return counts[static_cast<std::size_t>(iu) * (k + 1) + iv]; }
    std::size_t at(int iu, int iv) const { return counts[static_cast<std::size_t>(iu) * (k + 1) + iv]; }
};

inline DeLabelHistogram de_label_histogram(const Graph& g, NodeId u, NodeId v, int k) {
    auto pu = bfs_truncated(g, u, k);
    auto pv = bfs_truncated(g, v, k);
    DeLabelHistogram h;
    h.k = k;
    h.counts.assign(static_cast<std::size_t>(k + 1) * (k + 1), 0);
    auto idx = [&](std::int32_t d) { return d == DistanceProfile::kBeyond ? k : static_cast<int>(d) - 1; };
    for (NodeId w = 0; w < g.num_nodes(); ++w) {
        if (w == u || w == v) continue;
        const auto du = pu.dists[w];
        const auto dv = pv.dists[w];
        if (du == DistanceProfile::kBeyond && dv == DistanceProfile::kBeyond) continue;
        if (du == 0 || dv == 0) continue;  // cannot happen for w != u,v
        h.at(idx(du), idx(dv)) += 1;
    }
    return h;
}

// DRNL label for a DE distance tuple. kBeyond (or any negative) on either
// side maps to 0.
inline int drnl_label(std::int32_t d_u, std::int32_t d_v) {
    if (d_u < 0 || d_v < 0) return 0;
    if ((d_u == 0 && d_v == 1) || (d_u == 1 && d_v == 0)) return 1;
    const int d = static_cast<int>(d_u + d_v);
    const int h = d / 2;
    return 1 + std::min(d_u, d_v) + h * (h + d % 2 - 1);
}

// ---- edge feature cache ----------------------------------------------------

inline constexpr std::uint32_t kCacheMagic = 0x53464543;  // "SFEC"

inline void write_edge_feature_cache(const std::string& path, const SketchTable& t, const Graph& g,
                                     const EdgeList& edges, std::uint64_t config_hash) {
    auto os = open_out(path);
    write_le<std::uint32_t>(os, kCacheMagic);
    write_le<std::int32_t>(os, t.hops);
    write_le<std::uint64_t>(os, edges.size());
    write_le<std::uint64_t>(os, config_hash);
    for (std::size_t i = 0; i < edges.size(); ++i) {
        auto [u, v] = edges[i];
        auto row = estimate_counts(t, g, u, v).flatten();
        os.write(reinterpret_cast<const char*>(row.data()),
                 static_cast<std::streamsize>(row.size() * sizeof(float)));
        if (!os) throw DataError("edge cache write failed at row " + std::to_string(i) + ": " + path);
    }
}

struct EdgeFeatureCache {
    int k = 0;
    std::uint64_t config_hash = 0;
    std::size_t row_len = 0;
    std::vector<float> rows;  // count x k(k+2)

    std::size_t count() const { return row_len == 0 ? 0 : rows.size() / row_len; }
    std::span<const float> row(std::size_t i) const { return {rows.data() + i * row_len, row_len}; }
};

inline EdgeFeatureCache read_edge_feature_cache(const std::string& path,
                                                std::uint64_t expected_hash) {
    auto is = open_in(path);
    if (read_le<std::uint32_t>(is) != kCacheMagic) throw DataError("bad edge cache magic: " + path);
    EdgeFeatureCache c;
    c.k = read_le<std::int32_t>(is);
    const auto count = read_le<std::uint64_t>(is);
    c.config_hash = read_le<std::uint64_t>(is);
    if (c.config_hash != expected_hash)
        throw IncompatibleSketchError("edge cache config hash mismatch: " + path);
    c.row_len = static_cast<std::size_t>(c.k) * (c.k + 2);
    c.rows.resize(count * c.row_len);
    is.read(reinterpret_cast<char*>(c.rows.data()),
            static_cast<std::streamsize>(c.rows.size() * sizeof(float)));
    if (!is) throw DataError("truncated edge cache at offset " +
                             std::to_string(is.gcount()) + ": " + path);
    return c;
}

}  // namespace sketchlp
