#pragma once

#include <cmath>

#include "sketchlp/common.hpp"
#include "sketchlp/graph.hpp"

namespace sketchlp {

namespace detail {

// Visits each common neighbor of (u, v) via sorted-list intersection.
template <typename Fn>
void for_each_common_neighbor(const Graph& g, NodeId u, NodeId v, Fn&& fn) {
    auto a = g.neighbors(u);
    auto b = g.neighbors(v);
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j]) ++i;
        else if (b[j] < a[i]) ++j;
        else {
            fn(a[i]);
            ++i;
            ++j;
        }
    }
}

}  // namespace detail

inline std::size_t common_neighbors(const Graph& g, NodeId u, NodeId v) {
    std::size_t count = 0;
    detail::for_each_common_neighbor(g, u, v, [&](NodeId) { ++count; });
    return count;
}

inline double adamic_adar(const Graph& g, NodeId u, NodeId v) {
    double score = 0.0;
    detail::for_each_common_neighbor(g, u, v, [&](NodeId w) {
        const auto deg = g.degree(w);
        if (deg < 2) throw DataError("degree-1 common neighbor: graph is internally inconsistent");
        score += 1.0 / std::log(static_cast<double>(deg));
    });
    return score;
}

inline double resource_allocation(const Graph& g, NodeId u, NodeId v) {
    double score = 0.0;
    detail::for_each_common_neighbor(g, u, v, [&](NodeId w) {
        const auto deg = g.degree(w);
        if (deg < 2) throw DataError("degree-1 common neighbor: graph is internally inconsistent");
        score += 1.0 / static_cast<double>(deg);
    });
    return score;
}

}  // namespace sketchlp
