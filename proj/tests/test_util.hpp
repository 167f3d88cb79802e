#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <queue>
#include <string>
#include <vector>

#include "sketchlp/graph.hpp"

namespace testutil {

// Writes content to a fresh temp file and returns its path.
inline std::string write_temp(const std::string& name, const std::string& content) {
    auto dir = std::filesystem::temp_directory_path() / "sketchlp_tests";
    std::filesystem::create_directories(dir);
    auto path = (dir / name).string();
    std::ofstream os(path);
    os << content;
    return path;
}

inline std::string temp_path(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "sketchlp_tests";
    std::filesystem::create_directories(dir);
    return (dir / name).string();
}

// Independent full BFS (no truncation); oracle for bfs_truncated.
inline std::vector<long> full_bfs(const sketchlp::Graph& g, sketchlp::NodeId source) {
    std::vector<long> dist(g.num_nodes(), -1);
    std::queue<sketchlp::NodeId> q;
    dist[source] = 0;
    q.push(source);
    while (!q.empty()) {
        auto u = q.front();
        q.pop();
        for (auto v : g.neighbors(u))
            if (dist[v] == -1) {
                dist[v] = dist[u] + 1;
                q.push(v);
            }
    }
    return dist;
}

}  // namespace testutil
