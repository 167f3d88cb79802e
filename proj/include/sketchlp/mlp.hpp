#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "sketchlp/common.hpp"

namespace sketchlp {

struct DenseLayer {
    std::size_t in_dim = 0, out_dim = 0;
    std::vector<float> w;  // out_dim x in_dim, row-major
    std::vector<float> b;  // out_dim
};

// Plain MLP: hidden layers with ReLU (+ inverted dropout in training mode),
// single-logit output.
class Mlp {
public:
    Mlp() = default;

    static Mlp create(std::size_t input_dim, std::span<const std::size_t> hidden,
                      std::uint64_t seed) {
        Mlp m;
        std::mt19937_64 rng(seed);
        std::size_t in = input_dim;
        for (std::size_t h : hidden) {
            m.layers_.push_back(init_layer(in, h, rng));
            in = h;
        }
        m.layers_.push_back(init_layer(in, 1, rng));
        m.layers_.back().b[0] = 0.0f;
        return m;
    }

    std::size_t input_dim() const { return layers_.front().in_dim; }
    const std::vector<DenseLayer>& layers() const { return layers_; }
    std::vector<DenseLayer>& layers() { return layers_; }

    struct Cache {
        // activations[l] = input to layer l (post ReLU/dropout), one batch
        std::vector<std::vector<float>> inputs;
        std::vector<std::vector<float>> pre;        // pre-activation per layer
        std::vector<std::vector<float>> drop_mask;  // scale per hidden unit (0 or 1/keep)
        std::size_t batch = 0;
    };

    // Row-major batch of inputs -> logits. In training mode dropout masks are
    // drawn from rng; in eval mode the pass is deterministic.
    std::vector<float> forward(std::span<const float> x, std::size_t batch, bool training,
                               float dropout, std::mt19937_64* rng, Cache* cache = nullptr) const {
        if (x.size() != batch * input_dim()) throw ConfigError("mlp: input size mismatch");
        std::vector<float> cur(x.begin(), x.end());
        if (cache) {
            cache->inputs.clear();
            cache->pre.clear();
            cache->drop_mask.clear();
            cache->batch = batch;
        }
        std::uniform_real_distribution<float> unif(0.0f, 1.0f);
        for (std::size_t l = 0; l < layers_.size(); ++l) {
            const auto& layer = layers_[l];
            if (cache) cache->inputs.push_back(cur);
            std::vector<float> next(batch * layer.out_dim);
            for (std::size_t i = 0; i < batch; ++i) {
                const float* in = cur.data() + i * layer.in_dim;
                float* out = next.data() + i * layer.out_dim;
                for (std::size_t o = 0; o < layer.out_dim; ++o) {
                    const float* wr = layer.w.data() + o * layer.in_dim;
                    float acc = layer.b[o];
                    for (std::size_t j = 0; j < layer.in_dim; ++j) acc += wr[j] * in[j];
                    out[o] = acc;
                }
            }
            if (cache) cache->pre.push_back(next);
            const bool is_hidden = l + 1 < layers_.size();
            if (is_hidden) {
                for (float& v : next) v = v > 0.0f ? v : 0.0f;
                std::vector<float> mask;
                if (training && dropout > 0.0f) {
                    if (!rng) throw ConfigError("mlp: training forward needs an rng for dropout");
                    mask.resize(next.size());
                    const float keep = 1.0f - dropout;
                    for (std::size_t i = 0; i < next.size(); ++i) {
                        mask[i] = unif(*rng) < dropout ? 0.0f : 1.0f / keep;
                        next[i] *= mask[i];
                    }
                } else {
                    mask.assign(next.size(), 1.0f);
                }
                if (cache) cache->drop_mask.push_back(std::move(mask));
            }
            cur.swap(next);
        }
        return cur;  // batch logits
    }

    struct Gradients {
        std::vector<std::vector<float>> dw, db;
    };

    Gradients zero_gradients() const {
        Gradients g;
        for (const auto& l : layers_) {
            g.dw.emplace_back(l.w.size(), 0.0f);
            g.db.emplace_back(l.b.size(), 0.0f);
        }
        return g;
    }

    // Backprop from dL/dlogit (one per batch row), using the cache from a
    // training-mode forward. Gradients are averaged over the batch by the
    // caller's choice of dlogit scaling.
    Gradients backward(const Cache& cache, std::span<const float> dlogits) const {
        Gradients g = zero_gradients();
        std::vector<float> delta(dlogits.begin(), dlogits.end());
        for (std::size_t li = layers_.size(); li-- > 0;) {
            const auto& layer = layers_[li];
            const auto& in = cache.inputs[li];
            auto& dw = g.dw[li];
            auto& db = g.db[li];
            std::vector<float> dprev(cache.batch * layer.in_dim, 0.0f);
            for (std::size_t i = 0; i < cache.batch; ++i) {
                const float* x = in.data() + i * layer.in_dim;
                const float* dout = delta.data() + i * layer.out_dim;
                float* dx = dprev.data() + i * layer.in_dim;
                for (std::size_t o = 0; o < layer.out_dim; ++o) {
                    const float d = dout[o];
                    if (d == 0.0f) continue;
                    float* dwr = dw.data() + o * layer.in_dim;
                    const float* wr = layer.w.data() + o * layer.in_dim;
                    for (std::size_t j = 0; j < layer.in_dim; ++j) {
                        dwr[j] += d * x[j];
                        dx[j] += d * wr[j];
                    }
                    db[o] += d;
                }
            }
            if (li > 0) {
                // through dropout and ReLU of the previous hidden layer
                const auto& mask = cache.drop_mask[li - 1];
                const auto& pre = cache.pre[li - 1];
                for (std::size_t i = 0; i < dprev.size(); ++i)
                    dprev[i] *= mask[i] * (pre[i] > 0.0f ? 1.0f : 0.0f);
            }
            delta.swap(dprev);
        }
        return g;
    }

private:
    static DenseLayer init_layer(std::size_t in, std::size_t out, std::mt19937_64& rng) {
        DenseLayer l;
        l.in_dim = in;
        l.out_dim = out;
        l.w.resize(in * out);
        l.b.assign(out, 0.0f);
        // He-style uniform init
        const float bound = std::sqrt(6.0f / static_cast<float>(in));
        std::uniform_real_distribution<float> u(-bound, bound);
        for (float& v : l.w) v = u(rng);
        return l;
    }

    std::vector<DenseLayer> layers_;
};

inline float sigmoid(float z) { return 1.0f / (1.0f + std::exp(-z)); }

// Numerically stable mean BCE-with-logits; also emits dL/dlogit per row.
inline double bce_with_logits(std::span<const float> logits, std::span<const float> labels,
                              std::vector<float>* dlogits = nullptr) {
    if (logits.size() != labels.size()) throw ConfigError("bce: logits/labels size mismatch");
    const auto n = static_cast<double>(logits.size());
    double loss = 0.0;
    if (dlogits) dlogits->assign(logits.size(), 0.0f);
    for (std::size_t i = 0; i < logits.size(); ++i) {
        const double z = logits[i], y = labels[i];
        loss += std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
        if (dlogits) (*dlogits)[i] = static_cast<float>((1.0 / (1.0 + std::exp(-z)) - y) / n);
    }
    return loss / n;
}

// Adam with plain L2 weight decay folded into the gradient.
class AdamOptimizer {
public:
    AdamOptimizer(const Mlp& model, double lr, double weight_decay = 0.0, double beta1 = 0.9,
                  double beta2 = 0.999, double eps = 1e-8)
        : lr_(lr), wd_(weight_decay), b1_(beta1), b2_(beta2), eps_(eps) {
        for (const auto& l : model.layers()) {
            mw_.emplace_back(l.w.size(), 0.0);
            vw_.emplace_back(l.w.size(), 0.0);
            mb_.emplace_back(l.b.size(), 0.0);
            vb_.emplace_back(l.b.size(), 0.0);
        }
    }

    void step(Mlp& model, const Mlp::Gradients& g) {
        ++t_;
        const double bc1 = 1.0 - std::pow(b1_, t_);
        const double bc2 = 1.0 - std::pow(b2_, t_);
        for (std::size_t l = 0; l < model.layers().size(); ++l) {
            update(model.layers()[l].w, g.dw[l], mw_[l], vw_[l], bc1, bc2, wd_);
            update(model.layers()[l].b, g.db[l], mb_[l], vb_[l], bc1, bc2, 0.0);
        }
    }

private:
    void update(std::vector<float>& p, const std::vector<float>& grad, std::vector<double>& m,
                std::vector<double>& v, double bc1, double bc2, double wd) {
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double gi = grad[i] + wd * p[i];
            m[i] = b1_ * m[i] + (1.0 - b1_) * gi;
            v[i] = b2_ * v[i] + (1.0 - b2_) * gi * gi;
            p[i] -= static_cast<float>(lr_ * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps_));
        }
    }

    double lr_, wd_, b1_, b2_, eps_;
    long t_ = 0;
    std::vector<std::vector<double>> mw_, vw_, mb_, vb_;
};

}  // namespace sketchlp
