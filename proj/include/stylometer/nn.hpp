#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "stylometer/common.hpp"

namespace stylo {
namespace nn {

// ---------------------------------------------------------------------------
// Layer specifications
// ---------------------------------------------------------------------------

enum class LayerKind { Dense, Dropout, Conv2d, MaxPool2d, Flatten };
enum class Activation { None, Relu, Softmax };
enum class Padding { Same, Valid };
enum class Mode { Train, Eval };

struct LayerSpec {
    LayerKind kind = LayerKind::Dense;
    int in_dim = 0, out_dim = 0;                    // dense
    Activation activation = Activation::None;       // dense, conv2d
    double rate = 0.0;                              // dropout
    int in_channels = 0, out_channels = 0;          // conv2d
    int kernel_h = 0, kernel_w = 0;
    Padding padding = Padding::Same;
    int pool_h = 0, pool_w = 0, stride = 0;         // maxpool2d

    static LayerSpec dense(int in, int out, Activation act) {
        LayerSpec s;
        s.kind = LayerKind::Dense;
        s.in_dim = in;
        s.out_dim = out;
        s.activation = act;
        return s;
    }
    static LayerSpec dropout(double rate) {
        LayerSpec s;
        s.kind = LayerKind::Dropout;
        s.rate = rate;
        return s;
    }
    static LayerSpec conv2d(int in_ch, int out_ch, int kh, int kw, Padding pad, Activation act) {
        LayerSpec s;
        s.kind = LayerKind::Conv2d;
        s.in_channels = in_ch;
        s.out_channels = out_ch;
        s.kernel_h = kh;
        s.kernel_w = kw;
        s.padding = pad;
        s.activation = act;
        return s;
    }
    static LayerSpec maxpool2d(int ph, int pw, int stride) {
        LayerSpec s;
        s.kind = LayerKind::MaxPool2d;
        s.pool_h = ph;
        s.pool_w = pw;
        s.stride = stride;
        return s;
    }
    static LayerSpec flatten() {
        LayerSpec s;
        s.kind = LayerKind::Flatten;
        return s;
    }
};

/// The fully connected network of the POS-tag experiment:
/// 11-20-18-16-15-8 with ReLU, heavy dropout, softmax output.
inline std::vector<LayerSpec> build_unigram_net() {
    return {
        LayerSpec::dense(11, 20, Activation::Relu),
        LayerSpec::dropout(0.6),
        LayerSpec::dense(20, 18, Activation::Relu),
        LayerSpec::dropout(0.5),
        LayerSpec::dense(18, 16, Activation::Relu),
        LayerSpec::dropout(0.5),
        LayerSpec::dense(16, 15, Activation::Relu),
        LayerSpec::dropout(0.5),
        LayerSpec::dense(15, 8, Activation::Softmax),
    };
}

/// The bigram-matrix CNN: two same-padded 3x3 conv blocks with 2x2 floor
/// pooling over the 11x11 input (11 -> 5 -> 2, flatten = 2*2*16 = 64),
/// then the dense tail 30-18-16-15-8 with dropout 0.3.
inline std::vector<LayerSpec> build_bigram_cnn() {
    return {
        LayerSpec::conv2d(1, 8, 3, 3, Padding::Same, Activation::Relu),
        LayerSpec::maxpool2d(2, 2, 2),
        LayerSpec::conv2d(8, 16, 3, 3, Padding::Same, Activation::Relu),
        LayerSpec::maxpool2d(2, 2, 2),
        LayerSpec::flatten(),
        LayerSpec::dense(64, 30, Activation::Relu),
        LayerSpec::dropout(0.3),
        LayerSpec::dense(30, 18, Activation::Relu),
        LayerSpec::dropout(0.3),
        LayerSpec::dense(18, 16, Activation::Relu),
        LayerSpec::dropout(0.3),
        LayerSpec::dense(16, 15, Activation::Relu),
        LayerSpec::dropout(0.3),
        LayerSpec::dense(15, 8, Activation::Softmax),
    };
}

// ---------------------------------------------------------------------------
// Tensors
// ---------------------------------------------------------------------------

/// Dense row-major tensor; dim 0 is the batch.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> data;

    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> shape_) : shape(std::move(shape_)) {
        data.assign(count(shape), 0.0);
    }

    static std::size_t count(const std::vector<std::size_t>& s) {
        if (s.empty()) return 0;  // no scalar tensors here, only absent ones
        std::size_t n = 1;
        for (std::size_t d : s) n *= d;
        return n;
    }
    std::size_t size() const { return data.size(); }
    bool empty() const { return data.empty(); }
};

inline std::string shape_str(const std::vector<std::size_t>& s) {
    std::string out = "(";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(s[i]);
    }
    return out + ")";
}

// ---------------------------------------------------------------------------
// Shape inference and validation
// ---------------------------------------------------------------------------

/// Walk the spec list and compute every per-example output shape, checking
/// composition rules: adjacent dimensions must agree, dropout rates lie in
/// (0,1), softmax appears only on the final layer.
inline std::vector<std::vector<std::size_t>> infer_shapes(const std::vector<LayerSpec>& specs,
                                                          std::vector<std::size_t> input) {
    std::vector<std::vector<std::size_t>> shapes;
    for (std::size_t li = 0; li < specs.size(); ++li) {
        const LayerSpec& s = specs[li];
        if (s.activation == Activation::Softmax && li + 1 != specs.size())
            throw ShapeMismatch("layer " + std::to_string(li) + ": softmax before the final layer");
        switch (s.kind) {
            case LayerKind::Dense: {
                if (input.size() != 1 || input[0] != static_cast<std::size_t>(s.in_dim))
                    throw ShapeMismatch("layer " + std::to_string(li) + ": dense expects (" +
                                        std::to_string(s.in_dim) + "), got " + shape_str(input));
                input = {static_cast<std::size_t>(s.out_dim)};
                break;
            }
            case LayerKind::Dropout: {
                if (!(s.rate > 0.0 && s.rate < 1.0))
                    throw ShapeMismatch("layer " + std::to_string(li) + ": dropout rate not in (0,1)");
                break;
            }
            case LayerKind::Conv2d: {
                if (input.size() != 3 || input[0] != static_cast<std::size_t>(s.in_channels))
                    throw ShapeMismatch("layer " + std::to_string(li) + ": conv2d expects (" +
                                        std::to_string(s.in_channels) + ",H,W), got " +
                                        shape_str(input));
                const std::size_t h = input[1], w = input[2];
                std::size_t oh, ow;
                if (s.padding == Padding::Same) {
                    oh = h;
                    ow = w;
                } else {
                    if (h < static_cast<std::size_t>(s.kernel_h) ||
                        w < static_cast<std::size_t>(s.kernel_w))
                        throw ShapeMismatch("layer " + std::to_string(li) +
                                            ": valid conv kernel larger than input");
                    oh = h - static_cast<std::size_t>(s.kernel_h) + 1;
                    ow = w - static_cast<std::size_t>(s.kernel_w) + 1;
                }
                input = {static_cast<std::size_t>(s.out_channels), oh, ow};
                break;
            }
            case LayerKind::MaxPool2d: {
                if (input.size() != 3)
                    throw ShapeMismatch("layer " + std::to_string(li) + ": maxpool2d expects (C,H,W)");
                if (s.stride < 1 || s.pool_h < 1 || s.pool_w < 1)
                    throw ShapeMismatch("layer " + std::to_string(li) + ": bad pool geometry");
                if (input[1] < static_cast<std::size_t>(s.pool_h) ||
                    input[2] < static_cast<std::size_t>(s.pool_w))
                    throw ShapeMismatch("layer " + std::to_string(li) + ": pool window larger than input");
                const std::size_t oh = (input[1] - static_cast<std::size_t>(s.pool_h)) /
                                           static_cast<std::size_t>(s.stride) + 1;
                const std::size_t ow = (input[2] - static_cast<std::size_t>(s.pool_w)) /
                                           static_cast<std::size_t>(s.stride) + 1;
                input = {input[0], oh, ow};
                break;
            }
            case LayerKind::Flatten: {
                std::size_t flat = 1;
                for (std::size_t d : input) flat *= d;
                input = {flat};
                break;
            }
        }
        shapes.push_back(input);
    }
    return shapes;
}

// ---------------------------------------------------------------------------
// Network state
// ---------------------------------------------------------------------------

struct NetworkState {
    std::vector<LayerSpec> specs;
    std::vector<std::size_t> input_shape;  // per-example, batch excluded
    std::vector<Tensor> weights;           // indexed by layer, empty when layer has none
    std::vector<Tensor> biases;
    std::vector<Tensor> m_w, v_w, m_b, v_b;  // Adam moments
    std::int64_t step = 0;
    std::uint64_t seed = 0;
};

/// Seeded He-style uniform init: weights ~ U(-sqrt(6/fan_in), +sqrt(6/fan_in)),
/// biases zero, Adam moments zero.
inline NetworkState init_network(const std::vector<LayerSpec>& specs,
                                 const std::vector<std::size_t>& input_shape, std::uint64_t seed) {
    infer_shapes(specs, input_shape);  // validates composition
    NetworkState st;
    st.specs = specs;
    st.input_shape = input_shape;
    st.seed = seed;
    Rng rng(seed);
    for (const LayerSpec& s : specs) {
        Tensor w, b;
        if (s.kind == LayerKind::Dense) {
            w = Tensor({static_cast<std::size_t>(s.in_dim), static_cast<std::size_t>(s.out_dim)});
            b = Tensor({static_cast<std::size_t>(s.out_dim)});
            const double limit = std::sqrt(6.0 / static_cast<double>(s.in_dim));
            for (double& x : w.data) x = uniform_real(rng, -limit, limit);
        } else if (s.kind == LayerKind::Conv2d) {
            w = Tensor({static_cast<std::size_t>(s.out_channels), static_cast<std::size_t>(s.in_channels),
                        static_cast<std::size_t>(s.kernel_h), static_cast<std::size_t>(s.kernel_w)});
            b = Tensor({static_cast<std::size_t>(s.out_channels)});
            const double fan_in = static_cast<double>(s.in_channels) * s.kernel_h * s.kernel_w;
            const double limit = std::sqrt(6.0 / fan_in);
            for (double& x : w.data) x = uniform_real(rng, -limit, limit);
        }
        st.weights.push_back(w);
        st.biases.push_back(b);
        st.m_w.emplace_back(Tensor(w.shape));
        st.v_w.emplace_back(Tensor(w.shape));
        st.m_b.emplace_back(Tensor(b.shape));
        st.v_b.emplace_back(Tensor(b.shape));
    }
    return st;
}

// ---------------------------------------------------------------------------
// Forward / backward
// ---------------------------------------------------------------------------

namespace detail {

struct LayerCache {
    Tensor input;                 // layer input
    Tensor pre_act;               // affine output before the nonlinearity
    Tensor mask;                  // dropout keep mask, already inverted-scaled
    std::vector<std::size_t> argmax;  // maxpool winner indices into the input
};

inline void softmax_rows(Tensor& t) {
    const std::size_t batch = t.shape[0];
    const std::size_t dim = t.size() / batch;
    for (std::size_t b = 0; b < batch; ++b) {
        double* row = t.data.data() + b * dim;
        double mx = row[0];
        for (std::size_t i = 1; i < dim; ++i) mx = std::max(mx, row[i]);
        double sum = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            row[i] = std::exp(row[i] - mx);
            sum += row[i];
        }
        for (std::size_t i = 0; i < dim; ++i) row[i] /= sum;
    }
}

inline Tensor dense_forward(const LayerSpec& s, const Tensor& x, const Tensor& w, const Tensor& b,
                            LayerCache& cache) {
    const std::size_t batch = x.shape[0];
    const auto in = static_cast<std::size_t>(s.in_dim);
    const auto out = static_cast<std::size_t>(s.out_dim);
    Tensor y({batch, out});
    for (std::size_t bi = 0; bi < batch; ++bi) {
        const double* xr = x.data.data() + bi * in;
        double* yr = y.data.data() + bi * out;
        for (std::size_t o = 0; o < out; ++o) yr[o] = b.data[o];
        for (std::size_t i = 0; i < in; ++i) {
            const double xi = xr[i];
            if (xi == 0.0) continue;
            const double* wr = w.data.data() + i * out;
            for (std::size_t o = 0; o < out; ++o) yr[o] += xi * wr[o];
        }
    }
    cache.pre_act = y;
    if (s.activation == Activation::Relu) {
        for (double& v : y.data) v = v > 0.0 ? v : 0.0;
    } else if (s.activation == Activation::Softmax) {
        softmax_rows(y);
    }
    return y;
}

inline void dense_backward(const LayerSpec& s, const LayerCache& cache, const Tensor& w,
                           const Tensor& grad_out, Tensor& dw, Tensor& db, Tensor& dx) {
    const std::size_t batch = cache.input.shape[0];
    const auto in = static_cast<std::size_t>(s.in_dim);
    const auto out = static_cast<std::size_t>(s.out_dim);
    // grad_out is already d(loss)/d(pre-activation) for this layer
    dw = Tensor(w.shape);
    db = Tensor({out});
    dx = Tensor(cache.input.shape);
    for (std::size_t bi = 0; bi < batch; ++bi) {
        const double* xr = cache.input.data.data() + bi * in;
        const double* gr = grad_out.data.data() + bi * out;
        double* dxr = dx.data.data() + bi * in;
        for (std::size_t o = 0; o < out; ++o) db.data[o] += gr[o];
        for (std::size_t i = 0; i < in; ++i) {
            const double xi = xr[i];
            double acc = 0.0;
            double* dwr = dw.data.data() + i * out;
            const double* wr = w.data.data() + i * out;
            for (std::size_t o = 0; o < out; ++o) {
                dwr[o] += xi * gr[o];
                acc += wr[o] * gr[o];
            }
            dxr[i] = acc;
        }
    }
}

inline Tensor conv2d_forward(const LayerSpec& s, const Tensor& x, const Tensor& w, const Tensor& b,
                             LayerCache& cache) {
    const std::size_t batch = x.shape[0];
    const std::size_t ci = x.shape[1], h = x.shape[2], wd = x.shape[3];
    const auto co = static_cast<std::size_t>(s.out_channels);
    const auto kh = static_cast<std::size_t>(s.kernel_h), kw = static_cast<std::size_t>(s.kernel_w);
    const std::ptrdiff_t pad_t = s.padding == Padding::Same ? (s.kernel_h - 1) / 2 : 0;
    const std::ptrdiff_t pad_l = s.padding == Padding::Same ? (s.kernel_w - 1) / 2 : 0;
    const std::size_t oh = s.padding == Padding::Same ? h : h - kh + 1;
    const std::size_t ow = s.padding == Padding::Same ? wd : wd - kw + 1;

    Tensor y({batch, co, oh, ow});
    for (std::size_t bi = 0; bi < batch; ++bi) {
        for (std::size_t o = 0; o < co; ++o) {
            for (std::size_t i = 0; i < oh; ++i) {
                for (std::size_t j = 0; j < ow; ++j) {
                    double acc = b.data[o];
                    for (std::size_t c = 0; c < ci; ++c) {
                        for (std::size_t u = 0; u < kh; ++u) {
                            const std::ptrdiff_t src_i =
                                static_cast<std::ptrdiff_t>(i + u) - pad_t;
                            if (src_i < 0 || src_i >= static_cast<std::ptrdiff_t>(h)) continue;
                            for (std::size_t v = 0; v < kw; ++v) {
                                const std::ptrdiff_t src_j =
                                    static_cast<std::ptrdiff_t>(j + v) - pad_l;
                                if (src_j < 0 || src_j >= static_cast<std::ptrdiff_t>(wd)) continue;
                                acc += x.data[((bi * ci + c) * h + static_cast<std::size_t>(src_i)) * wd +
                                              static_cast<std::size_t>(src_j)] *
                                       w.data[((o * ci + c) * kh + u) * kw + v];
                            }
                        }
                    }
                    y.data[((bi * co + o) * oh + i) * ow + j] = acc;
                }
            }
        }
    }
    cache.pre_act = y;
    if (s.activation == Activation::Relu)
        for (double& v : y.data) v = v > 0.0 ? v : 0.0;
    return y;
}

inline void conv2d_backward(const LayerSpec& s, const LayerCache& cache, const Tensor& w,
                            const Tensor& grad_out, Tensor& dw, Tensor& db, Tensor& dx) {
    const Tensor& x = cache.input;
    const std::size_t batch = x.shape[0];
    const std::size_t ci = x.shape[1], h = x.shape[2], wd = x.shape[3];
    const auto co = static_cast<std::size_t>(s.out_channels);
    const auto kh = static_cast<std::size_t>(s.kernel_h), kw = static_cast<std::size_t>(s.kernel_w);
    const std::ptrdiff_t pad_t = s.padding == Padding::Same ? (s.kernel_h - 1) / 2 : 0;
    const std::ptrdiff_t pad_l = s.padding == Padding::Same ? (s.kernel_w - 1) / 2 : 0;
    const std::size_t oh = grad_out.shape[2], ow = grad_out.shape[3];

    dw = Tensor(w.shape);
    db = Tensor({co});
    dx = Tensor(x.shape);
    for (std::size_t bi = 0; bi < batch; ++bi) {
        for (std::size_t o = 0; o < co; ++o) {
            for (std::size_t i = 0; i < oh; ++i) {
                for (std::size_t j = 0; j < ow; ++j) {
                    const double g = grad_out.data[((bi * co + o) * oh + i) * ow + j];
                    if (g == 0.0) continue;
                    db.data[o] += g;
                    for (std::size_t c = 0; c < ci; ++c) {
                        for (std::size_t u = 0; u < kh; ++u) {
                            const std::ptrdiff_t src_i = static_cast<std::ptrdiff_t>(i + u) - pad_t;
                            if (src_i < 0 || src_i >= static_cast<std::ptrdiff_t>(h)) continue;
                            for (std::size_t v = 0; v < kw; ++v) {
                                const std::ptrdiff_t src_j =
                                    static_cast<std::ptrdiff_t>(j + v) - pad_l;
                                if (src_j < 0 || src_j >= static_cast<std::ptrdiff_t>(wd)) continue;
                                const std::size_t xi =
                                    ((bi * ci + c) * h + static_cast<std::size_t>(src_i)) * wd +
                                    static_cast<std::size_t>(src_j);
                                dw.data[((o * ci + c) * kh + u) * kw + v] += x.data[xi] * g;
                                dx.data[xi] += w.data[((o * ci + c) * kh + u) * kw + v] * g;
                            }
                        }
                    }
                }
            }
        }
    }
}

inline Tensor maxpool_forward(const LayerSpec& s, const Tensor& x, LayerCache& cache) {
    const std::size_t batch = x.shape[0], c = x.shape[1], h = x.shape[2], wd = x.shape[3];
    const auto ph = static_cast<std::size_t>(s.pool_h), pw = static_cast<std::size_t>(s.pool_w);
    const auto stride = static_cast<std::size_t>(s.stride);
    const std::size_t oh = (h - ph) / stride + 1;
    const std::size_t ow = (wd - pw) / stride + 1;

    Tensor y({batch, c, oh, ow});
    cache.argmax.assign(y.size(), 0);
    for (std::size_t bi = 0; bi < batch; ++bi) {
        for (std::size_t ch = 0; ch < c; ++ch) {
            for (std::size_t i = 0; i < oh; ++i) {
                for (std::size_t j = 0; j < ow; ++j) {
                    double best = -std::numeric_limits<double>::infinity();
                    std::size_t best_idx = 0;
                    for (std::size_t u = 0; u < ph; ++u) {
                        for (std::size_t v = 0; v < pw; ++v) {
                            const std::size_t idx =
                                ((bi * c + ch) * h + i * stride + u) * wd + j * stride + v;
                            if (x.data[idx] > best) {
                                best = x.data[idx];
                                best_idx = idx;
                            }
                        }
                    }
                    const std::size_t oidx = ((bi * c + ch) * oh + i) * ow + j;
                    y.data[oidx] = best;
                    cache.argmax[oidx] = best_idx;
                }
            }
        }
    }
    return y;
}

inline Tensor dropout_forward(const LayerSpec& s, const Tensor& x, Mode mode, Rng* rng,
                              LayerCache& cache) {
    if (mode == Mode::Eval) return x;  // exact no-op in eval
    if (rng == nullptr) throw StyloError("dropout in train mode needs an rng");
    const double keep = 1.0 - s.rate;
    cache.mask = Tensor(x.shape);
    Tensor y(x.shape);
    for (std::size_t i = 0; i < x.size(); ++i) {
        // Inverted dropout: surviving units are scaled by 1/keep at train
        // time so eval mode needs no rescaling.
        const double m = uniform01(*rng) < keep ? 1.0 / keep : 0.0;
        cache.mask.data[i] = m;
        y.data[i] = x.data[i] * m;
    }
    return y;
}

}  // namespace detail

struct ForwardResult {
    std::vector<Tensor> activations;  // output of every layer, in order
    Tensor probs;                     // final output
};

namespace detail {

inline Tensor forward_impl(const NetworkState& st, const Tensor& batch, Mode mode, Rng* rng,
                           std::vector<LayerCache>* caches, std::vector<Tensor>* activations) {
    if (batch.shape.size() != st.input_shape.size() + 1)
        throw ShapeMismatch("forward: batch rank " + shape_str(batch.shape) + " does not match input " +
                            shape_str(st.input_shape));
    for (std::size_t i = 0; i < st.input_shape.size(); ++i)
        if (batch.shape[i + 1] != st.input_shape[i])
            throw ShapeMismatch("forward: batch shape " + shape_str(batch.shape) +
                                " does not match input " + shape_str(st.input_shape));

    Tensor x = batch;
    for (std::size_t li = 0; li < st.specs.size(); ++li) {
        const LayerSpec& s = st.specs[li];
        LayerCache local;
        LayerCache& cache = caches ? (*caches)[li] : local;
        if (caches) cache.input = x;
        Tensor y;
        switch (s.kind) {
            case LayerKind::Dense:
                y = dense_forward(s, x, st.weights[li], st.biases[li], cache);
                break;
            case LayerKind::Dropout:
                y = dropout_forward(s, x, mode, rng, cache);
                break;
            case LayerKind::Conv2d:
                y = conv2d_forward(s, x, st.weights[li], st.biases[li], cache);
                break;
            case LayerKind::MaxPool2d:
                y = maxpool_forward(s, x, cache);
                break;
            case LayerKind::Flatten: {
                y = x;
                std::size_t flat = 1;
                for (std::size_t d = 1; d < x.shape.size(); ++d) flat *= x.shape[d];
                y.shape = {x.shape[0], flat};
                break;
            }
        }
        x = std::move(y);
        if (activations) activations->push_back(x);
    }
    return x;
}

}  // namespace detail

/// Run the network. In train mode dropout draws masks from rng; eval mode is
/// deterministic and equals the network with dropout layers removed.
inline ForwardResult forward(const NetworkState& st, const Tensor& batch, Mode mode,
                             Rng* rng = nullptr) {
    ForwardResult res;
    res.probs = detail::forward_impl(st, batch, mode, rng, nullptr, &res.activations);
    return res;
}

struct Gradients {
    std::vector<Tensor> dw, db;  // per layer, empty where the layer has no params
};

struct LossResult {
    double loss = 0.0;
    Tensor probs;
    Gradients grads;
};

inline constexpr double kLogClamp = 1e-12;

/// Categorical cross-entropy of softmax outputs against one-hot labels. The
/// log argument is shifted by +1e-12 so exact zeros stay finite, and capped
/// at 1 so the loss keeps its zero lower bound.
inline double cross_entropy(const Tensor& probs, const Tensor& labels) {
    if (probs.shape != labels.shape)
        throw ShapeMismatch("cross_entropy: probs " + shape_str(probs.shape) + " vs labels " +
                            shape_str(labels.shape));
    const std::size_t batch = probs.shape[0];
    double loss = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (labels.data[i] != 0.0)
            loss -= labels.data[i] * std::log(std::min(probs.data[i] + kLogClamp, 1.0));
    }
    return loss / static_cast<double>(batch);
}

/// Forward plus backprop. Train mode reuses the dropout masks drawn during
/// the forward pass; eval mode treats dropout as identity (used by the
/// finite-difference checks).
inline LossResult loss_and_gradients(const NetworkState& st, const Tensor& batch,
                                     const Tensor& labels, Rng* rng, Mode mode = Mode::Train) {
    std::vector<detail::LayerCache> caches(st.specs.size());
    LossResult res;
    res.probs = detail::forward_impl(st, batch, mode, rng, &caches, nullptr);
    if (res.probs.shape != labels.shape)
        throw ShapeMismatch("loss_and_gradients: output " + shape_str(res.probs.shape) +
                            " vs labels " + shape_str(labels.shape));
    res.loss = cross_entropy(res.probs, labels);

    const std::size_t batch_n = batch.shape[0];
    const std::size_t n_layers = st.specs.size();
    res.grads.dw.resize(n_layers);
    res.grads.db.resize(n_layers);

    // Seed of the backward pass: dL/d(pre-softmax logits), pushed through the
    // clamped log exactly so finite differences agree to rounding error.
    Tensor grad;
    {
        const std::size_t classes = res.probs.size() / batch_n;
        grad = Tensor(res.probs.shape);
        for (std::size_t b = 0; b < batch_n; ++b) {
            const double* p = res.probs.data.data() + b * classes;
            const double* y = labels.data.data() + b * classes;
            double* g = grad.data.data() + b * classes;
            double dot = 0.0;
            for (std::size_t c = 0; c < classes; ++c) {
                // derivative of -y log(min(p + clamp, 1)): zero once capped
                const double dLdp = p[c] + kLogClamp < 1.0
                                        ? -y[c] / ((p[c] + kLogClamp) * static_cast<double>(batch_n))
                                        : 0.0;
                g[c] = dLdp;
                dot += dLdp * p[c];
            }
            for (std::size_t c = 0; c < classes; ++c) g[c] = p[c] * (g[c] - dot);
        }
    }

    for (std::size_t li = n_layers; li-- > 0;) {
        const LayerSpec& s = st.specs[li];
        detail::LayerCache& cache = caches[li];
        switch (s.kind) {
            case LayerKind::Dense: {
                if (s.activation == Activation::Relu) {
                    for (std::size_t i = 0; i < grad.size(); ++i)
                        if (cache.pre_act.data[i] <= 0.0) grad.data[i] = 0.0;
                }
                // Softmax: grad already holds dL/d(pre-activation).
                Tensor dx;
                detail::dense_backward(s, cache, st.weights[li], grad, res.grads.dw[li],
                                       res.grads.db[li], dx);
                grad = std::move(dx);
                break;
            }
            case LayerKind::Dropout: {
                if (mode == Mode::Train) {
                    for (std::size_t i = 0; i < grad.size(); ++i) grad.data[i] *= cache.mask.data[i];
                }
                break;
            }
            case LayerKind::Conv2d: {
                if (s.activation == Activation::Relu) {
                    for (std::size_t i = 0; i < grad.size(); ++i)
                        if (cache.pre_act.data[i] <= 0.0) grad.data[i] = 0.0;
                }
                Tensor dx;
                detail::conv2d_backward(s, cache, st.weights[li], grad, res.grads.dw[li],
                                        res.grads.db[li], dx);
                grad = std::move(dx);
                break;
            }
            case LayerKind::MaxPool2d: {
                Tensor dx(cache.input.shape);
                for (std::size_t oidx = 0; oidx < grad.size(); ++oidx)
                    dx.data[cache.argmax[oidx]] += grad.data[oidx];
                grad = std::move(dx);
                break;
            }
            case LayerKind::Flatten: {
                grad.shape = cache.input.shape;
                break;
            }
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// Adam
// ---------------------------------------------------------------------------

struct TrainConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::size_t batch_size = 16;
    int max_epochs = 500;
    int patience = 50;  // epochs of no validation-loss improvement before stopping
    std::uint64_t seed = 0;

    void validate() const {
        if (learning_rate <= 0 || beta1 <= 0 || beta2 <= 0 || eps <= 0 || batch_size == 0 ||
            max_epochs <= 0 || patience < 0)
            throw StyloError("train config: all values must be positive");
        if (beta1 >= 1.0 || beta2 >= 1.0) throw StyloError("train config: betas must be < 1");
        if (patience > max_epochs) throw StyloError("train config: patience > max_epochs");
    }
};

namespace detail {

inline void adam_update(Tensor& param, Tensor& m, Tensor& v, const Tensor& g,
                        const TrainConfig& cfg, double bias1, double bias2,
                        const std::string& where) {
    for (std::size_t i = 0; i < param.size(); ++i) {
        m.data[i] = cfg.beta1 * m.data[i] + (1.0 - cfg.beta1) * g.data[i];
        v.data[i] = cfg.beta2 * v.data[i] + (1.0 - cfg.beta2) * g.data[i] * g.data[i];
        const double mhat = m.data[i] / bias1;
        const double vhat = v.data[i] / bias2;
        param.data[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.eps);
        if (!std::isfinite(param.data[i]))
            throw NonFiniteUpdate("adam_step: non-finite parameter in " + where + " at index " +
                                  std::to_string(i));
    }
}

}  // namespace detail

/// One Adam step with bias correction. Throws NonFiniteUpdate if any
/// parameter leaves the finite range.
inline void adam_step(NetworkState& st, const Gradients& grads, const TrainConfig& cfg) {
    const std::int64_t t = st.step + 1;
    const double bias1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
    const double bias2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
    for (std::size_t li = 0; li < st.specs.size(); ++li) {
        if (st.weights[li].empty()) continue;
        if (grads.dw[li].shape != st.weights[li].shape || grads.db[li].shape != st.biases[li].shape)
            throw ShapeMismatch("adam_step: gradient shape mismatch at layer " + std::to_string(li));
        detail::adam_update(st.weights[li], st.m_w[li], st.v_w[li], grads.dw[li], cfg, bias1, bias2,
                            "layer " + std::to_string(li) + " weights");
        detail::adam_update(st.biases[li], st.m_b[li], st.v_b[li], grads.db[li], cfg, bias1, bias2,
                            "layer " + std::to_string(li) + " biases");
    }
    st.step = t;
}

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

struct Dataset {
    Tensor inputs;
    Tensor labels;  // one-hot, shape (N, classes)

    std::size_t size() const { return inputs.shape.empty() ? 0 : inputs.shape[0]; }
};

struct EpochStats {
    double train_loss = 0.0;
    double train_accuracy = 0.0;
    double val_loss = 0.0;
    double val_accuracy = 0.0;
};

struct TrainReport {
    std::vector<EpochStats> epochs;
    int best_epoch = 0;            // 1-based; 0 when no validation was used
    double final_test_accuracy = std::numeric_limits<double>::quiet_NaN();
    double chance_level = 0.0;
    TrainConfig config;
};

namespace detail {

inline Tensor select_rows(const Tensor& t, const std::vector<std::size_t>& idx) {
    std::vector<std::size_t> shape = t.shape;
    shape[0] = idx.size();
    Tensor out(shape);
    const std::size_t row = t.size() / t.shape[0];
    for (std::size_t k = 0; k < idx.size(); ++k)
        std::copy_n(t.data.begin() + static_cast<std::ptrdiff_t>(idx[k] * row), row,
                    out.data.begin() + static_cast<std::ptrdiff_t>(k * row));
    return out;
}

inline std::size_t argmax_row(const double* row, std::size_t n) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (row[i] > row[best]) best = i;  // ties keep the lowest index
    return best;
}

inline double accuracy_of(const Tensor& probs, const Tensor& labels) {
    const std::size_t batch = probs.shape[0];
    const std::size_t classes = probs.size() / batch;
    std::size_t correct = 0;
    for (std::size_t b = 0; b < batch; ++b) {
        const std::size_t p = argmax_row(probs.data.data() + b * classes, classes);
        const std::size_t y = argmax_row(labels.data.data() + b * classes, classes);
        if (p == y) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(batch);
}

}  // namespace detail

/// Accuracy (argmax ties resolved to the lowest class index) and mean
/// cross-entropy of eval-mode predictions.
inline std::pair<double, double> evaluate(const NetworkState& st, const Dataset& data) {
    if (data.size() == 0) throw StyloError("evaluate: empty dataset");
    const Tensor probs = detail::forward_impl(st, data.inputs, Mode::Eval, nullptr, nullptr, nullptr);
    return {detail::accuracy_of(probs, data.labels), cross_entropy(probs, data.labels)};
}

/// Eval-mode softmax outputs per example, in dataset order.
inline std::vector<std::vector<double>> embed(const NetworkState& st, const Tensor& inputs) {
    const Tensor probs = detail::forward_impl(st, inputs, Mode::Eval, nullptr, nullptr, nullptr);
    const std::size_t batch = probs.shape[0];
    const std::size_t classes = probs.size() / batch;
    std::vector<std::vector<double>> out(batch, std::vector<double>(classes));
    for (std::size_t b = 0; b < batch; ++b)
        std::copy_n(probs.data.begin() + static_cast<std::ptrdiff_t>(b * classes), classes,
                    out[b].begin());
    return out;
}

/// Mini-batch Adam training with seeded shuffling and early stopping on
/// validation loss (disabled when the validation set is empty). The
/// best-validation weights are restored before returning.
inline std::pair<NetworkState, TrainReport> train(const std::vector<LayerSpec>& specs,
                                                  const Dataset& train_set, const Dataset& val_set,
                                                  const TrainConfig& cfg) {
    cfg.validate();
    if (train_set.size() == 0) throw StyloError("train: empty training set");
    std::vector<std::size_t> input_shape(train_set.inputs.shape.begin() + 1,
                                         train_set.inputs.shape.end());
    NetworkState st = init_network(specs, input_shape, cfg.seed);
    Rng rng(mix_seed(cfg.seed, 0x747261696eULL));

    TrainReport report;
    report.config = cfg;
    report.chance_level = 1.0 / static_cast<double>(train_set.labels.shape[1]);

    const bool use_val = val_set.size() > 0;
    double best_val = std::numeric_limits<double>::infinity();
    std::vector<Tensor> best_weights, best_biases;
    int epochs_without_improvement = 0;

    std::vector<std::size_t> order(train_set.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        shuffle(order, rng);
        double loss_sum = 0.0;
        double acc_sum = 0.0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(order.size(), start + cfg.batch_size);
            const std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(start),
                                               order.begin() + static_cast<std::ptrdiff_t>(end));
            const Tensor bx = detail::select_rows(train_set.inputs, idx);
            const Tensor by = detail::select_rows(train_set.labels, idx);
            LossResult res = loss_and_gradients(st, bx, by, &rng, Mode::Train);
            adam_step(st, res.grads, cfg);
            loss_sum += res.loss * static_cast<double>(idx.size());
            acc_sum += detail::accuracy_of(res.probs, by) * static_cast<double>(idx.size());
        }

        EpochStats stats;
        stats.train_loss = loss_sum / static_cast<double>(train_set.size());
        stats.train_accuracy = acc_sum / static_cast<double>(train_set.size());
        if (use_val) {
            const auto [va, vl] = evaluate(st, val_set);
            stats.val_accuracy = va;
            stats.val_loss = vl;
        }
        report.epochs.push_back(stats);

        if (use_val) {
            if (stats.val_loss < best_val) {
                best_val = stats.val_loss;
                best_weights = st.weights;
                best_biases = st.biases;
                report.best_epoch = epoch;
                epochs_without_improvement = 0;
            } else {
                ++epochs_without_improvement;
                if (epochs_without_improvement > cfg.patience) break;
            }
        }
    }

    if (use_val && !best_weights.empty()) {
        st.weights = std::move(best_weights);
        st.biases = std::move(best_biases);
    }
    return {std::move(st), std::move(report)};
}

}  // namespace nn
}  // namespace stylo
