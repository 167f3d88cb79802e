#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "sketchlp/common.hpp"

namespace sketchlp {

// 64-bit avalanche mixer (splitmix64 finalizer) keyed by an additive seed.
inline std::uint64_t mix64(std::uint64_t x, std::uint64_t seed) {
    x += seed + 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Universal-hash permutation family P_i(x) = (a_i*x + b_i) mod (2^61 - 1).
class PermutationFamily {
public:
    static constexpr std::uint64_t kPrime = (1ULL << 61) - 1;

    PermutationFamily(std::size_t count, std::uint64_t seed) {
        std::mt19937_64 rng(seed ^ 0xa5a5a5a5deadbeefULL);
        std::uniform_int_distribution<std::uint64_t> da(1, kPrime - 1);
        std::uniform_int_distribution<std::uint64_t> db(0, kPrime - 1);
        a_.reserve(count);
        b_.reserve(count);
        for (std::size_t i = 0; i < count; ++i) {
            a_.push_back(da(rng));
            b_.push_back(db(rng));
        }
    }

    std::size_t size() const { return a_.size(); }

    std::uint64_t apply(std::size_t i, std::uint64_t hash) const {
        unsigned __int128 t = static_cast<unsigned __int128>(a_[i]) * (hash % kPrime) + b_[i];
        std::uint64_t r = static_cast<std::uint64_t>(t % kPrime);
        return r;
    }

private:
    std::vector<std::uint64_t> a_, b_;
};

}  // namespace sketchlp
