#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "sketchlp/common.hpp"

namespace sketchlp {

struct MetricReport {
    std::string metric;  // "hits@K" or "mrr"
    int k = 0;
    double value = 0.0;
    std::string split;
    std::uint64_t seed = 0;
    std::size_t num_pos = 0;
    std::size_t num_neg = 0;
};

// Fraction of positives scoring strictly above the K-th highest negative
// score; ties at the threshold count as misses (OGB-style).
inline double hits_at_k(std::span<const double> pos_scores, std::span<const double> neg_scores,
                        std::size_t K) {
    if (K == 0 || K > neg_scores.size())
        throw ConfigError("hits@K requires 1 <= K <= number of negatives");
    std::vector<double> neg(neg_scores.begin(), neg_scores.end());
    std::nth_element(neg.begin(), neg.begin() + (K - 1), neg.end(), std::greater<>());
    const double threshold = neg[K - 1];
    std::size_t hits = 0;
    for (double s : pos_scores)
        if (s > threshold) ++hits;
    return pos_scores.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(pos_scores.size());
}

// Mean reciprocal rank of each positive within its own negative list.
// Ties are handled by averaging the optimistic and pessimistic ranks.
inline double mrr(std::span<const double> pos_scores,
                  std::span<const std::vector<double>> per_pos_neg_scores) {
    if (pos_scores.size() != per_pos_neg_scores.size())
        throw ConfigError("mrr: positives and negative lists must align");
    double total = 0.0;
    for (std::size_t i = 0; i < pos_scores.size(); ++i) {
        const auto& negs = per_pos_neg_scores[i];
        if (negs.empty()) throw ConfigError("mrr: empty negative list");
        std::size_t greater = 0, equal = 0;
        for (double s : negs) {
            if (s > pos_scores[i]) ++greater;
            else if (s == pos_scores[i]) ++equal;
        }
        const double rank = 1.0 + static_cast<double>(greater) + static_cast<double>(equal) / 2.0;
        total += 1.0 / rank;
    }
    return pos_scores.empty() ? 0.0 : total / static_cast<double>(pos_scores.size());
}

// Convenience overload: every positive ranked against the same negative set.
inline double mrr_shared(std::span<const double> pos_scores, std::span<const double> neg_scores) {
    if (neg_scores.empty()) throw ConfigError("mrr: empty negative list");
    double total = 0.0;
    for (double p : pos_scores) {
        std::size_t greater = 0, equal = 0;
        for (double s : neg_scores) {
            if (s > p) ++greater;
            else if (s == p) ++equal;
        }
        total += 1.0 / (1.0 + static_cast<double>(greater) + static_cast<double>(equal) / 2.0);
    }
    return pos_scores.empty() ? 0.0 : total / static_cast<double>(pos_scores.size());
}

}  // namespace sketchlp
