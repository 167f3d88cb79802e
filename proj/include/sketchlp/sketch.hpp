#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "sketchlp/common.hpp"
#include "sketchlp/hashing.hpp"

namespace sketchlp {

struct SketchConfig {
    int hll_precision = 8;        // registers m = 2^p
    int minhash_perms = 128;
    std::uint64_t seed = 0;

    int registers() const { return 1 << hll_precision; }

    void validate() const {
        if (hll_precision < 4 || hll_precision > 16)
            throw ConfigError("hll precision must be in [4,16]");
        if (minhash_perms < 1) throw ConfigError("minhash permutations must be >= 1");
    }

    bool operator==(const SketchConfig&) const = default;

    std::uint64_t hash() const {
        std::uint64_t h = fnv1a64(&hll_precision, sizeof(hll_precision));
        h = fnv1a64(&minhash_perms, sizeof(minhash_perms), h);
        h = fnv1a64(&seed, sizeof(seed), h);
        return h;
    }
};

// Bias-correction constant for the raw HLL estimator.
inline double hll_alpha(int m) {
    switch (m) {
        case 16: return 0.673;
        case 32: return 0.697;
        case 64: return 0.709;
        default: return 0.7213 / (1.0 + 1.079 / m);
    }
}

// Max-leading-zero-count registers; merge by elementwise max.
struct HllSketch {
    std::vector<std::uint8_t> registers;

    static HllSketch empty(const SketchConfig& cfg) {
        HllSketch s;
        s.registers.assign(static_cast<std::size_t>(cfg.registers()), 0);
        return s;
    }

    void insert_hash(std::uint64_t h, int p) {
        const std::size_t idx = static_cast<std::size_t>(h >> (64 - p));
        const std::uint64_t w = h << p;  // remaining 64-p bits, left aligned
        const int zeros = w == 0 ? (64 - p) : std::countl_zero(w);
        const auto rho = static_cast<std::uint8_t>(zeros + 1);
        registers[idx] = std::max(registers[idx], rho);
    }

    void merge_in(const HllSketch& other) {
        if (registers.size() != other.registers.size())
            throw IncompatibleSketchError("hll register count mismatch");
        for (std::size_t i = 0; i < registers.size(); ++i)
            registers[i] = std::max(registers[i], other.registers[i]);
    }
};

// Raw harmonic-mean estimate with linear-counting fallback in the small range.
inline double hll_cardinality(const HllSketch& h) {
    const auto m = static_cast<double>(h.registers.size());
    double inv_sum = 0.0;
    std::size_t zeros = 0;
    for (std::uint8_t r : h.registers) {
        inv_sum += std::ldexp(1.0, -static_cast<int>(r));
        if (r == 0) ++zeros;
    }
    const double raw = hll_alpha(static_cast<int>(h.registers.size())) * m * m / inv_sum;
    if (raw <= 2.5 * m && zeros > 0) return m * std::log(m / static_cast<double>(zeros));
    return raw;
}

// Per-permutation minima; merge by elementwise min.
struct MinhashSketch {
    static constexpr std::uint64_t kEmpty = std::numeric_limits<std::uint64_t>::max();
    std::vector<std::uint64_t> signature;

    static MinhashSketch empty(const SketchConfig& cfg) {
        MinhashSketch s;
        s.signature.assign(static_cast<std::size_t>(cfg.minhash_perms), kEmpty);
        return s;
    }

    void insert_hash(std::uint64_t h, const PermutationFamily& perms) {
        for (std::size_t i = 0; i < signature.size(); ++i)
            signature[i] = std::min(signature[i], perms.apply(i, h));
    }

    void merge_in(const MinhashSketch& other) {
        if (signature.size() != other.signature.size())
            throw IncompatibleSketchError("minhash signature length mismatch");
        for (std::size_t i = 0; i < signature.size(); ++i)
            signature[i] = std::min(signature[i], other.signature[i]);
    }
};

inline double minhash_jaccard(const MinhashSketch& a, const MinhashSketch& b) {
    if (a.signature.size() != b.signature.size())
        throw IncompatibleSketchError("minhash signature length mismatch");
    std::size_t eq = 0;
    for (std::size_t i = 0; i < a.signature.size(); ++i)
        if (a.signature[i] == b.signature[i]) ++eq;
    return static_cast<double>(eq) / static_cast<double>(a.signature.size());
}

struct SketchPair {
    HllSketch hll;
    MinhashSketch mh;

    static SketchPair empty(const SketchConfig& cfg) { return {HllSketch::empty(cfg), MinhashSketch::empty(cfg)}; }

    void merge_in(const SketchPair& other) {
        hll.merge_in(other.hll);
        mh.merge_in(other.mh);
    }
};

inline SketchPair merge(const SketchPair& a, const SketchPair& b) {
    SketchPair out = a;
    out.merge_in(b);
    return out;
}

// Shared permutation tables per config; building 128 (a,b) pairs once is
// cheap but doing it per sketch_from_set call is not.
class Sketcher {
public:
    explicit Sketcher(const SketchConfig& cfg)
        : cfg_(cfg), perms_(static_cast<std::size_t>(cfg.minhash_perms), cfg.seed) {
        cfg.validate();
    }

    const SketchConfig& config() const { return cfg_; }
    const PermutationFamily& perms() const { return perms_; }

    void insert(SketchPair& s, std::uint64_t item) const {
        const std::uint64_t h = mix64(item, cfg_.seed);
        s.hll.insert_hash(h, cfg_.hll_precision);
        s.mh.insert_hash(h, perms_);
    }

    SketchPair from_items(std::span<const std::uint64_t> items) const {
        SketchPair s = SketchPair::empty(cfg_);
        for (auto x : items) insert(s, x);
        return s;
    }

private:
    SketchConfig cfg_;
    PermutationFamily perms_;
};

inline SketchPair sketch_from_set(std::span<const std::uint64_t> items, const SketchConfig& cfg) {
    return Sketcher(cfg).from_items(items);
}

// ---- serialization -------------------------------------------------------

inline constexpr std::uint32_t kSketchMagic = 0x534b5448;  // "SKTH"

inline void write_sketch_header(std::ostream& os, const SketchConfig& cfg) {
    write_le<std::uint32_t>(os, kSketchMagic);
    write_le<std::int32_t>(os, cfg.hll_precision);
    write_le<std::int32_t>(os, cfg.minhash_perms);
    write_le<std::uint64_t>(os, cfg.seed);
}

inline SketchConfig read_sketch_header(std::istream& is) {
    if (read_le<std::uint32_t>(is) != kSketchMagic) throw DataError("bad sketch file magic");
    SketchConfig cfg;
    cfg.hll_precision = read_le<std::int32_t>(is);
    cfg.minhash_perms = read_le<std::int32_t>(is);
    cfg.seed = read_le<std::uint64_t>(is);
    cfg.validate();
    return cfg;
}

inline void write_sketch_pair(std::ostream& os, const SketchPair& s) {
    write_vec(os, s.hll.registers);
    write_vec(os, s.mh.signature);
}

inline SketchPair read_sketch_pair(std::istream& is) {
    SketchPair s;
    s.hll.registers = read_vec<std::uint8_t>(is);
    s.mh.signature = read_vec<std::uint64_t>(is);
    return s;
}

}  // namespace sketchlp
