#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_map>
#include <vector>

#include "csent/errors.hpp"
#include "csent/matrix.hpp"
#include "csent/rng.hpp"

// Hand-written forward/backward kernels.  There is no autodiff graph: the
// model layer composes these in a fixed order and calls the backwards in
// reverse.  Every kernel is templated on the scalar so the same code runs
// at 32-bit for training and 64-bit for finite-difference checks.
namespace csent::nn {

template <typename S>
struct Parameter {
    Matrix<S> value;
    Matrix<S> grad;
    Matrix<S> adam_m;
    Matrix<S> adam_v;
    std::int64_t steps = 0;

    Parameter() = default;
    Parameter(std::size_t rows, std::size_t cols)
        : value(rows, cols),
          grad(rows, cols),
          adam_m(rows, cols),
          adam_v(rows, cols) {}

    void zero_grad() { grad.zero(); }
};

// Standard Adam with bias correction; the gradient is consumed (cleared)
// by the step so accumulation always starts from zero.
template <typename S>
void adam_step(Parameter<S>& p, double lr, double beta1 = 0.9,
               double beta2 = 0.999, double eps = 1e-8) {
    p.steps += 1;
    const double t = static_cast<double>(p.steps);
    const double corr1 = 1.0 - std::pow(beta1, t);
    const double corr2 = 1.0 - std::pow(beta2, t);
    S* value = p.value.data();
    S* grad = p.grad.data();
    S* m = p.adam_m.data();
    S* v = p.adam_v.data();
    const std::size_t n = p.value.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double g = static_cast<double>(grad[i]);
        const double mi = beta1 * static_cast<double>(m[i]) +
                          (1.0 - beta1) * g;
        const double vi = beta2 * static_cast<double>(v[i]) +
                          (1.0 - beta2) * g * g;
        m[i] = static_cast<S>(mi);
        v[i] = static_cast<S>(vi);
        const double update = lr * (mi / corr1) /
                              (std::sqrt(vi / corr2) + eps);
        value[i] = static_cast<S>(static_cast<double>(value[i]) - update);
        grad[i] = S(0);
    }
}

// C += A * B, plain i-k-j loops; inner loop runs over contiguous rows of
// both B and C so -O3 vectorizes it.
template <typename S>
void matmul_accumulate(const Matrix<S>& a, const Matrix<S>& b, Matrix<S>& c) {
    require_shape(c, a.rows(), b.cols(), "matmul output");
    if (a.cols() != b.rows()) throw ShapeError("matmul: inner dims differ");
    const std::size_t inner = a.cols();
    const std::size_t bc = b.cols();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const S* arow = a.row_ptr(i);
        S* crow = c.row_ptr(i);
        for (std::size_t k = 0; k < inner; ++k) {
            const S aik = arow[k];
            if (aik == S(0)) continue;
            const S* brow = b.row_ptr(k);
            for (std::size_t j = 0; j < bc; ++j) crow[j] += aik * brow[j];
        }
    }
}

// C += A^T * B (used for weight gradients).
template <typename S>
void matmul_at_b_accumulate(const Matrix<S>& a, const Matrix<S>& b,
                            Matrix<S>& c) {
    require_shape(c, a.cols(), b.cols(), "matmul A^T*B output");
    if (a.rows() != b.rows()) throw ShapeError("matmul A^T*B: row counts differ");
    const std::size_t bc = b.cols();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const S* arow = a.row_ptr(i);
        const S* brow = b.row_ptr(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const S aik = arow[k];
            if (aik == S(0)) continue;
            S* crow = c.row_ptr(k);
            for (std::size_t j = 0; j < bc; ++j) crow[j] += aik * brow[j];
        }
    }
}

// C += A * B^T (used for input gradients).
template <typename S>
void matmul_a_bt_accumulate(const Matrix<S>& a, const Matrix<S>& b,
                            Matrix<S>& c) {
    require_shape(c, a.rows(), b.rows(), "matmul A*B^T output");
    if (a.cols() != b.cols()) throw ShapeError("matmul A*B^T: col counts differ");
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const S* arow = a.row_ptr(i);
        S* crow = c.row_ptr(i);
        for (std::size_t j = 0; j < b.rows(); ++j) {
            const S* brow = b.row_ptr(j);
            S acc = S(0);
            for (std::size_t k = 0; k < a.cols(); ++k) acc += arow[k] * brow[k];
            crow[j] += acc;
        }
    }
}

// ---------------------------------------------------------------------------
// Temporal convolution (valid, ReLU fused after bias).
//
// Filters for window w over D-dim rows are stored as a (w*D) x F matrix;
// the forward im2rows the input into (T-w+1) x (w*D) and multiplies.
// ---------------------------------------------------------------------------

template <typename S>
struct ConvCache {
    Matrix<S> rows;  // im2row view of the input, (T-w+1) x (w*D)
    Matrix<S> pre;   // pre-activation (post-bias, pre-ReLU)
    std::size_t window = 0;
    std::size_t input_rows = 0;
    std::size_t input_cols = 0;
};

template <typename S>
Matrix<S> temporal_conv_forward(const Matrix<S>& input, std::size_t window,
                                const Matrix<S>& filters,
                                const Matrix<S>& bias, ConvCache<S>& cache) {
    const std::size_t t = input.rows();
    const std::size_t d = input.cols();
    if (window == 0 || t < window) {
        throw ShapeError("temporal_conv: input shorter than window");
    }
    if (filters.rows() != window * d) {
        throw ShapeError("temporal_conv: filters expect width " +
                         std::to_string(filters.rows()) + ", input gives " +
                         std::to_string(window * d));
    }
    const std::size_t f = filters.cols();
    require_shape(bias, 1, f, "temporal_conv bias");

    const std::size_t out_t = t - window + 1;
    cache.window = window;
    cache.input_rows = t;
    cache.input_cols = d;
    cache.rows = Matrix<S>(out_t, window * d);
    for (std::size_t r = 0; r < out_t; ++r) {
        S* dst = cache.rows.row_ptr(r);
        for (std::size_t i = 0; i < window; ++i) {
            const S* src = input.row_ptr(r + i);
            std::copy(src, src + d, dst + i * d);
        }
    }

    cache.pre = Matrix<S>(out_t, f);
    for (std::size_t r = 0; r < out_t; ++r) {
        S* row = cache.pre.row_ptr(r);
        const S* b = bias.row_ptr(0);
        std::copy(b, b + f, row);
    }
    matmul_accumulate(cache.rows, filters, cache.pre);

    Matrix<S> out(out_t, f);
    for (std::size_t i = 0; i < cache.pre.size(); ++i) {
        out.data()[i] = std::max(cache.pre.data()[i], S(0));
    }
    return out;
}

// Returns the input gradient; filter/bias gradients are accumulated (+=)
// so a weight-shared encoder can sum contributions across applications.
// ReLU uses the subgradient 0 at exactly zero.
template <typename S>
Matrix<S> temporal_conv_backward(const Matrix<S>& grad_out,
                                 const ConvCache<S>& cache,
                                 const Matrix<S>& filters,
                                 Matrix<S>& grad_filters,
                                 Matrix<S>& grad_bias) {
    const std::size_t out_t = cache.pre.rows();
    const std::size_t f = cache.pre.cols();
    require_shape(grad_out, out_t, f, "temporal_conv grad_out");
    require_shape(grad_filters, filters.rows(), filters.cols(),
                  "temporal_conv grad_filters");
    require_shape(grad_bias, 1, f, "temporal_conv grad_bias");

    Matrix<S> grad_pre(out_t, f);
    for (std::size_t i = 0; i < grad_pre.size(); ++i) {
        grad_pre.data()[i] =
            cache.pre.data()[i] > S(0) ? grad_out.data()[i] : S(0);
    }
    for (std::size_t r = 0; r < out_t; ++r) {
        const S* row = grad_pre.row_ptr(r);
        S* gb = grad_bias.row_ptr(0);
        for (std::size_t j = 0; j < f; ++j) gb[j] += row[j];
    }
    matmul_at_b_accumulate(cache.rows, grad_pre, grad_filters);

    Matrix<S> grad_rows(out_t, filters.rows());
    matmul_a_bt_accumulate(grad_pre, filters, grad_rows);
    Matrix<S> grad_input(cache.input_rows, cache.input_cols);
    const std::size_t d = cache.input_cols;
    for (std::size_t r = 0; r < out_t; ++r) {
        const S* src = grad_rows.row_ptr(r);
        for (std::size_t i = 0; i < cache.window; ++i) {
            S* dst = grad_input.row_ptr(r + i);
            for (std::size_t k = 0; k < d; ++k) dst[k] += src[i * d + k];
        }
    }
    return grad_input;
}

// ---------------------------------------------------------------------------
// Max-pool over time: T' x F -> 1 x F, gradient routed to the (earliest)
// argmax row of each column.
// ---------------------------------------------------------------------------

struct PoolCache {
    std::vector<std::size_t> argmax;  // one per column
    std::size_t rows = 0;
};

template <typename S>
Matrix<S> max_pool_forward(const Matrix<S>& map, PoolCache& cache) {
    if (map.rows() == 0 || map.cols() == 0) {
        throw ShapeError("max_pool_over_time: empty map");
    }
    cache.rows = map.rows();
    cache.argmax.assign(map.cols(), 0);
    Matrix<S> out(1, map.cols());
    for (std::size_t j = 0; j < map.cols(); ++j) {
        S best = map(0, j);
        std::size_t best_r = 0;
        for (std::size_t r = 1; r < map.rows(); ++r) {
            if (map(r, j) > best) {  // strict: ties keep the earliest row
                best = map(r, j);
                best_r = r;
            }
        }
        out(0, j) = best;
        cache.argmax[j] = best_r;
    }
    return out;
}

template <typename S>
Matrix<S> max_pool_backward(const Matrix<S>& grad_out, const PoolCache& cache) {
    require_shape(grad_out, 1, cache.argmax.size(), "max_pool grad_out");
    Matrix<S> grad_map(cache.rows, cache.argmax.size());
    for (std::size_t j = 0; j < cache.argmax.size(); ++j) {
        grad_map(cache.argmax[j], j) = grad_out(0, j);
    }
    return grad_map;
}

// Smallest gap between a column's maximum and its runner-up; the
// gradient-check harness treats a tiny gap as a tie about to flip under
// perturbation and resamples.  Single-row maps have no runner-up.
template <typename S>
double pool_margin(const Matrix<S>& map) {
    double margin = std::numeric_limits<double>::infinity();
    if (map.rows() < 2) return margin;
    for (std::size_t j = 0; j < map.cols(); ++j) {
        S best = map(0, j);
        S second = std::numeric_limits<S>::lowest();
        for (std::size_t r = 1; r < map.rows(); ++r) {
            if (map(r, j) > best) {
                second = best;
                best = map(r, j);
            } else if (map(r, j) > second) {
                second = map(r, j);
            }
        }
        margin = std::min(margin, static_cast<double>(best) -
                                      static_cast<double>(second));
    }
    return margin;
}

template <typename S>
double min_abs(const Matrix<S>& m) {
    double v = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m.size(); ++i) {
        v = std::min(v, std::abs(static_cast<double>(m.data()[i])));
    }
    return v;
}

// ---------------------------------------------------------------------------
// Affine layer: (N x In) * (In x Out) + bias.
// ---------------------------------------------------------------------------

template <typename S>
struct LinearCache {
    Matrix<S> input;
};

template <typename S>
Matrix<S> linear_forward(const Matrix<S>& input, const Matrix<S>& weight,
                         const Matrix<S>& bias, LinearCache<S>& cache) {
    if (input.cols() != weight.rows()) {
        throw ShapeError("linear: input width " + std::to_string(input.cols()) +
                         " vs weight height " + std::to_string(weight.rows()));
    }
    require_shape(bias, 1, weight.cols(), "linear bias");
    cache.input = input;
    Matrix<S> out(input.rows(), weight.cols());
    for (std::size_t r = 0; r < out.rows(); ++r) {
        const S* b = bias.row_ptr(0);
        std::copy(b, b + out.cols(), out.row_ptr(r));
    }
    matmul_accumulate(input, weight, out);
    return out;
}

template <typename S>
Matrix<S> linear_backward(const Matrix<S>& grad_out,
                          const LinearCache<S>& cache, const Matrix<S>& weight,
                          Matrix<S>& grad_weight, Matrix<S>& grad_bias) {
    require_shape(grad_out, cache.input.rows(), weight.cols(),
                  "linear grad_out");
    matmul_at_b_accumulate(cache.input, grad_out, grad_weight);
    for (std::size_t r = 0; r < grad_out.rows(); ++r) {
        const S* row = grad_out.row_ptr(r);
        S* gb = grad_bias.row_ptr(0);
        for (std::size_t j = 0; j < grad_out.cols(); ++j) gb[j] += row[j];
    }
    Matrix<S> grad_input(cache.input.rows(), cache.input.cols());
    matmul_a_bt_accumulate(grad_out, weight, grad_input);
    return grad_input;
}

template <typename S>
Matrix<S> relu_forward(const Matrix<S>& x, Matrix<S>& pre_cache) {
    pre_cache = x;
    Matrix<S> out(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.size(); ++i) {
        out.data()[i] = std::max(x.data()[i], S(0));
    }
    return out;
}

template <typename S>
Matrix<S> relu_backward(const Matrix<S>& grad_out, const Matrix<S>& pre_cache) {
    require_shape(grad_out, pre_cache.rows(), pre_cache.cols(),
                  "relu grad_out");
    Matrix<S> grad(pre_cache.rows(), pre_cache.cols());
    for (std::size_t i = 0; i < grad.size(); ++i) {
        grad.data()[i] =
            pre_cache.data()[i] > S(0) ? grad_out.data()[i] : S(0);
    }
    return grad;
}

// ---------------------------------------------------------------------------
// Softmax cross-entropy over a 1 x C logit row.
// ---------------------------------------------------------------------------

template <typename S>
Matrix<S> softmax(const Matrix<S>& logits) {
    Matrix<S> out(logits.rows(), logits.cols());
    for (std::size_t r = 0; r < logits.rows(); ++r) {
        const S* in = logits.row_ptr(r);
        S* dst = out.row_ptr(r);
        S m = in[0];
        for (std::size_t j = 1; j < logits.cols(); ++j) m = std::max(m, in[j]);
        double z = 0.0;
        for (std::size_t j = 0; j < logits.cols(); ++j) {
            const double e = std::exp(static_cast<double>(in[j] - m));
            dst[j] = static_cast<S>(e);
            z += e;
        }
        for (std::size_t j = 0; j < logits.cols(); ++j) {
            dst[j] = static_cast<S>(static_cast<double>(dst[j]) / z);
        }
    }
    return out;
}

// Returns the loss; grad_logits gets softmax(logits) - onehot(label).
template <typename S>
double softmax_cross_entropy(const Matrix<S>& logits, int label,
                             Matrix<S>& grad_logits) {
    require_shape(logits, 1, logits.cols(), "softmax logits");
    if (label < 0 || static_cast<std::size_t>(label) >= logits.cols()) {
        throw LabelRangeError("label " + std::to_string(label) +
                              " outside [0, " + std::to_string(logits.cols()) +
                              ")");
    }
    const S* in = logits.row_ptr(0);
    S m = in[0];
    for (std::size_t j = 1; j < logits.cols(); ++j) m = std::max(m, in[j]);
    double z = 0.0;
    for (std::size_t j = 0; j < logits.cols(); ++j) {
        z += std::exp(static_cast<double>(in[j] - m));
    }
    const double log_z = std::log(z) + static_cast<double>(m);
    const double loss = log_z - static_cast<double>(in[label]);

    grad_logits = Matrix<S>(1, logits.cols());
    for (std::size_t j = 0; j < logits.cols(); ++j) {
        double p = std::exp(static_cast<double>(in[j]) - log_z);
        grad_logits(0, j) = static_cast<S>(
            p - (static_cast<std::size_t>(label) == j ? 1.0 : 0.0));
    }
    return loss;
}

// ---------------------------------------------------------------------------
// Regularizers.  All are identity when inactive; the caches remember the
// multiplicative factors so the backward is a pointwise product.
// ---------------------------------------------------------------------------

struct RegularizerConfig {
    double fc_dropout_p = 0.5;
    double embedding_dropout_p = 0.1;
    std::size_t dropblock_size = 5;  // odd
    double dropblock_rate = 0.1;
    bool shared_dropblock_mask = false;

    void validate() const {
        auto prob = [](double p, const char* what) {
            if (!(p >= 0.0 && p < 1.0)) {
                throw ConfigError(std::string(what) + " must be in [0,1)");
            }
        };
        prob(fc_dropout_p, "fc_dropout_p");
        prob(embedding_dropout_p, "embedding_dropout_p");
        prob(dropblock_rate, "dropblock_rate");
        if (dropblock_size < 1 || dropblock_size % 2 == 0) {
            throw ConfigError("dropblock_size must be odd and >= 1");
        }
    }
};

// Word-type dropout: a token id is either dropped everywhere in the commit
// or kept everywhere, decided once.  Factors are 0 or 1/(1-p).
template <typename S>
class EmbeddingDropoutMask {
public:
    // Call once per commit with every id the forward will look up.
    void build(const std::vector<int>& ids, double p, bool train, Rng& rng) {
        factors_.clear();
        active_ = train && p > 0.0;
        if (!active_) return;
        const S keep_scale = static_cast<S>(1.0 / (1.0 - p));
        for (int id : ids) {
            if (factors_.contains(id)) continue;
            factors_.emplace(id, rng.bernoulli(p) ? S(0) : keep_scale);
        }
    }

    S factor(int id) const {
        if (!active_) return S(1);
        auto it = factors_.find(id);
        return it == factors_.end() ? S(1) : it->second;
    }

    bool active() const { return active_; }

private:
    std::unordered_map<int, S> factors_;
    bool active_ = false;
};

template <typename S>
struct MaskCache {
    Matrix<S> factor;
    bool active = false;
};

// DropBlock for 1-D feature maps.  Seeds are Bernoulli(gamma) on rows
// where a block of `block_size` rows fits entirely inside the map, with
//   gamma = (drop_rate / block_size) * (T' / (T' - block_size + 1)),
// the zeroed region is the block centred on each seed, and the surviving
// entries are rescaled by total/kept over the whole map.  Masks are drawn
// per feature column unless shared_mask is set.
template <typename S>
Matrix<S> dropblock_1d(const Matrix<S>& map, std::size_t block_size,
                       double drop_rate, bool train, bool shared_mask,
                       Rng& rng, MaskCache<S>& cache) {
    if (block_size > map.rows()) {
        throw ShapeError("dropblock_1d: block_size " +
                         std::to_string(block_size) + " exceeds map rows " +
                         std::to_string(map.rows()));
    }
    cache.active = train && drop_rate > 0.0;
    if (!cache.active) return map;

    const std::size_t t = map.rows();
    const std::size_t f = map.cols();
    const std::size_t half = block_size / 2;
    const std::size_t valid = t - block_size + 1;
    const double gamma = (drop_rate / static_cast<double>(block_size)) *
                         (static_cast<double>(t) / static_cast<double>(valid));

    // dropped[r][j] true when row r of column j falls in a zeroed block.
    Matrix<S> keep(t, f);
    keep.fill(S(1));
    auto seed_column = [&](std::size_t j_begin, std::size_t j_end) {
        for (std::size_t c = half; c < half + valid; ++c) {
            if (!rng.bernoulli(gamma)) continue;
            for (std::size_t r = c - half; r <= c + half; ++r) {
                for (std::size_t j = j_begin; j < j_end; ++j) {
                    keep(r, j) = S(0);
                }
            }
        }
    };
    if (shared_mask) {
        seed_column(0, f);
    } else {
        for (std::size_t j = 0; j < f; ++j) seed_column(j, j + 1);
    }

    std::size_t kept = 0;
    for (std::size_t i = 0; i < keep.size(); ++i) {
        if (keep.data()[i] != S(0)) ++kept;
    }
    // When everything was dropped there is nothing to rescale; the map is
    // zero for this step.
    const S scale =
        kept == 0 ? S(0)
                  : static_cast<S>(static_cast<double>(keep.size()) /
                                   static_cast<double>(kept));
    cache.factor = Matrix<S>(t, f);
    Matrix<S> out(t, f);
    for (std::size_t i = 0; i < keep.size(); ++i) {
        const S factor = keep.data()[i] * scale;
        cache.factor.data()[i] = factor;
        out.data()[i] = map.data()[i] * factor;
    }
    return out;
}

// Standard inverted unit dropout.
template <typename S>
Matrix<S> fc_dropout(const Matrix<S>& x, double p, bool train, Rng& rng,
                     MaskCache<S>& cache) {
    cache.active = train && p > 0.0;
    if (!cache.active) return x;
    const S keep_scale = static_cast<S>(1.0 / (1.0 - p));
    cache.factor = Matrix<S>(x.rows(), x.cols());
    Matrix<S> out(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const S factor = rng.bernoulli(p) ? S(0) : keep_scale;
        cache.factor.data()[i] = factor;
        out.data()[i] = x.data()[i] * factor;
    }
    return out;
}

template <typename S>
Matrix<S> mask_backward(const Matrix<S>& grad_out, const MaskCache<S>& cache) {
    if (!cache.active) return grad_out;
    require_shape(grad_out, cache.factor.rows(), cache.factor.cols(),
                  "mask grad_out");
    Matrix<S> grad(grad_out.rows(), grad_out.cols());
    for (std::size_t i = 0; i < grad.size(); ++i) {
        grad.data()[i] = grad_out.data()[i] * cache.factor.data()[i];
    }
    return grad;
}

}  // namespace csent::nn
