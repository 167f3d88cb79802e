#pragma once

#include <random>

#include "sketchlp/graph.hpp"

namespace sketchlp::fixtures {

// Chordless 6-cycle; nodes 0..5 in ring order.
inline Graph c6() {
    return Graph::from_edges(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 0}});
}

inline Graph complete(NodeId n) {
    EdgeList edges;
    for (NodeId u = 0; u < n; ++u)
        for (NodeId v = u + 1; v < n; ++v) edges.emplace_back(u, v);
    return Graph::from_edges(n, edges);
}

inline Graph path(NodeId n) {
    EdgeList edges;
    for (NodeId u = 0; u + 1 < n; ++u) edges.emplace_back(u, u + 1);
    return Graph::from_edges(n, edges);
}

inline Graph star(NodeId leaves) {
    EdgeList edges;
    for (NodeId i = 1; i <= leaves; ++i) edges.emplace_back(0, i);
    return Graph::from_edges(leaves + 1, edges);
}

// Eight-node worked example for pairwise counts at k=2. With 0-based ids the
// interesting pair is (5, 6): A[2][1] = 1 (common node 1) and B_u[2] = 1
// (node 3 is two hops from 5 but beyond the horizon from 6).
inline Graph example8() {
    // 1-based edges {1-2,1-6,2-3,2-7,3-5,4-5,5-6,6-8,7-8}
    return Graph::from_edges(
        8, {{0, 1}, {0, 5}, {1, 2}, {1, 6}, {2, 4}, {3, 4}, {4, 5}, {5, 7}, {6, 7}});
}

// Erdős–Rényi G(n, p), seeded.
inline Graph erdos_renyi(NodeId n, double p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(p);
    EdgeList edges;
    for (NodeId u = 0; u < n; ++u)
        for (NodeId v = u + 1; v < n; ++v)
            if (coin(rng)) edges.emplace_back(u, v);
    return Graph::from_edges(n, edges);
}

}  // namespace sketchlp::fixtures
