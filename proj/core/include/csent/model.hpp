#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "csent/embed.hpp"
#include "csent/errors.hpp"
#include "csent/featurize.hpp"
#include "csent/nn.hpp"
#include "csent/records.hpp"
#include "csent/rng.hpp"
#include "csent/vocab.hpp"

namespace csent {

enum class ModelVariant {
    DiffHcnn,
    DiffHrcnn,
    PairedHcnn,
    PairedHrcnn,
    LrBaseline,
};

inline const char* variant_name(ModelVariant v) {
    switch (v) {
        case ModelVariant::DiffHcnn: return "diff-hcnn";
        case ModelVariant::DiffHrcnn: return "diff-hrcnn";
        case ModelVariant::PairedHcnn: return "paired-hcnn";
        case ModelVariant::PairedHrcnn: return "paired-hrcnn";
        case ModelVariant::LrBaseline: return "lr-baseline";
    }
    throw ConfigError("unknown model variant");
}

inline ModelVariant variant_from_name(const std::string& name) {
    if (name == "diff-hcnn") return ModelVariant::DiffHcnn;
    if (name == "diff-hrcnn") return ModelVariant::DiffHrcnn;
    if (name == "paired-hcnn") return ModelVariant::PairedHcnn;
    if (name == "paired-hrcnn") return ModelVariant::PairedHrcnn;
    if (name == "lr-baseline") return ModelVariant::LrBaseline;
    throw ConfigError("unknown model variant '" + name + "'");
}

inline bool variant_is_paired(ModelVariant v) {
    return v == ModelVariant::PairedHcnn || v == ModelVariant::PairedHrcnn;
}

inline bool variant_is_regularized(ModelVariant v) {
    return v == ModelVariant::DiffHrcnn || v == ModelVariant::PairedHrcnn;
}

enum class EmbeddingInit { Random, PreTrained };

struct HcnnConfig {
    std::size_t embedding_dim = kEmbeddingDim;
    std::vector<std::size_t> window_sizes = {3, 5, 7};
    std::size_t filters_per_window = 100;   // F1
    std::size_t commit_level_window = 3;
    std::size_t commit_level_filters = 128; // F2
    std::size_t hidden_fc_dim = 128;
    std::size_t classes = 2;
    nn::RegularizerConfig regularizers;
    EmbeddingInit embedding_init = EmbeddingInit::Random;
    // 0 picks the convention for the embedding init: 16 when random,
    // 8 when pre-trained.
    std::size_t batch_size = 0;
    double learning_rate = 0.001;
    bool freeze_embeddings = false;

    std::size_t resolved_batch_size() const {
        if (batch_size != 0) return batch_size;
        return embedding_init == EmbeddingInit::PreTrained ? 8 : 16;
    }

    void validate() const {
        if (embedding_dim == 0) throw ConfigError("embedding_dim must be > 0");
        if (window_sizes.empty()) {
            throw ConfigError("window_sizes must be non-empty");
        }
        for (std::size_t w : window_sizes) {
            if (w == 0) throw ConfigError("window sizes must be >= 1");
        }
        if (filters_per_window == 0 || commit_level_filters == 0 ||
            hidden_fc_dim == 0) {
            throw ConfigError("filter/hidden dimensions must be > 0");
        }
        if (commit_level_window == 0) {
            throw ConfigError("commit_level_window must be >= 1");
        }
        if (classes != 2) throw ConfigError("this classifier is binary");
        if (!(learning_rate > 0.0)) {
            throw ConfigError("learning_rate must be > 0");
        }
        regularizers.validate();
    }
};

struct Prediction {
    double probability_security = 0.0;  // P(class 1)
    int label = 0;                      // argmax; exact tie -> class 0
};

using TokenSeq = std::vector<int>;

struct DiffInput {
    std::vector<TokenSeq> files;  // one <ADD>/<DEL> stream per file
};

struct PairedInput {
    std::vector<TokenSeq> before;  // parallel arrays, one entry per file
    std::vector<TokenSeq> after;
};

DiffInput encode_diff_input(const CommitRecord& record, const Vocabulary& vocab,
                            const FeaturizeOptions& opts = {});
PairedInput encode_paired_input(const CommitRecord& record,
                                const Vocabulary& vocab,
                                const FeaturizeOptions& opts = {});
// Flat stream for the bag-of-tokens baseline.
std::vector<int> encode_flat_input(const CommitRecord& record,
                                   const Vocabulary& vocab,
                                   const FeaturizeOptions& opts = {});

// Numeric health of one forward pass, used by the gradient-check harness:
// a pre-activation at a ReLU kink or a near-tied max-pool column makes
// finite differences meaningless, so such runs are resampled.
struct KinkStats {
    double min_abs_preact = std::numeric_limits<double>::infinity();
    double min_pool_margin = std::numeric_limits<double>::infinity();
};

template <typename S>
class HierarchicalCnn {
public:
    struct FileCache {
        std::vector<int> padded;
        Matrix<S> x;  // embedded input after embedding dropout
        std::vector<nn::ConvCache<S>> conv;
        std::vector<nn::MaskCache<S>> block;
        std::vector<nn::PoolCache> pool;
    };
    struct CommitCache {
        Matrix<S> stacked;  // max(N, commit_window) x 3*F1, zero-padded
        std::size_t n_files = 0;
        nn::ConvCache<S> conv;
        nn::PoolCache pool;
    };
    struct Workspace {
        nn::EmbeddingDropoutMask<S> embdrop;
        std::vector<FileCache> files;        // diff stream, or paired-before
        std::vector<FileCache> files_after;  // paired-after
        CommitCache commit;                  // diff, or paired-before
        CommitCache commit_after;
        nn::MaskCache<S> head_drop;
        nn::LinearCache<S> l1, l2;
        Matrix<S> relu_pre;
        KinkStats stats;
    };

    HierarchicalCnn(ModelVariant variant, HcnnConfig config,
                    std::size_t vocab_size, std::string vocab_fingerprint)
        : variant_(variant),
          cfg_(std::move(config)),
          vocab_size_(vocab_size),
          fingerprint_(std::move(vocab_fingerprint)) {
        if (variant_ == ModelVariant::LrBaseline) {
            throw ConfigError("LrBaseline is not a HierarchicalCnn variant");
        }
        cfg_.validate();
        if (vocab_size_ <= static_cast<std::size_t>(Vocabulary::kNumSpecials)) {
            throw ConfigError("vocabulary too small for a model");
        }
        paired_ = variant_is_paired(variant_);
        hr_ = variant_is_regularized(variant_);
        max_window_ = *std::max_element(cfg_.window_sizes.begin(),
                                        cfg_.window_sizes.end());

        const std::size_t d = cfg_.embedding_dim;
        const std::size_t f1 = cfg_.filters_per_window;
        const std::size_t f2 = cfg_.commit_level_filters;
        emb_ = nn::Parameter<S>(vocab_size_, d);
        for (std::size_t w : cfg_.window_sizes) {
            conv_w_.emplace_back(w * d, f1);
            conv_b_.emplace_back(1, f1);
        }
        const std::size_t file_vec_dim = cfg_.window_sizes.size() * f1;
        cconv_w_ = nn::Parameter<S>(cfg_.commit_level_window * file_vec_dim, f2);
        cconv_b_ = nn::Parameter<S>(1, f2);
        if (paired_) {
            fc_w_ = nn::Parameter<S>(2 * f2, cfg_.classes);
            fc_b_ = nn::Parameter<S>(1, cfg_.classes);
        } else {
            fc1_w_ = nn::Parameter<S>(f2, cfg_.hidden_fc_dim);
            fc1_b_ = nn::Parameter<S>(1, cfg_.hidden_fc_dim);
            fc2_w_ = nn::Parameter<S>(cfg_.hidden_fc_dim, cfg_.classes);
            fc2_b_ = nn::Parameter<S>(1, cfg_.classes);
        }
    }

    ModelVariant variant() const { return variant_; }
    const HcnnConfig& config() const { return cfg_; }
    std::size_t vocab_size() const { return vocab_size_; }
    const std::string& vocab_fingerprint() const { return fingerprint_; }
    bool paired() const { return paired_; }

    // Embeddings uniform in ±0.5/D with a zero <PAD> row; weight matrices
    // Xavier-uniform; biases zero.  Draw order is fixed, so a seed pins
    // every parameter.
    void init_random(Rng& rng) {
        const double half = 0.5 / static_cast<double>(cfg_.embedding_dim);
        fill_uniform(emb_.value, rng, half);
        zero_row(emb_.value, Vocabulary::kPadId);
        for (std::size_t j = 0; j < conv_w_.size(); ++j) {
            xavier(conv_w_[j], rng);
            conv_b_[j].value.zero();
        }
        xavier(cconv_w_, rng);
        cconv_b_.value.zero();
        if (paired_) {
            xavier(fc_w_, rng);
            fc_b_.value.zero();
        } else {
            xavier(fc1_w_, rng);
            fc1_b_.value.zero();
            xavier(fc2_w_, rng);
            fc2_b_.value.zero();
        }
    }

    void set_pretrained_embeddings(const EmbeddingMatrix& matrix) {
        if (matrix.vocab_fingerprint != fingerprint_) {
            throw FingerprintMismatch(
                "pre-trained embeddings were built for a different "
                "vocabulary");
        }
        if (matrix.vectors.rows() != vocab_size_ ||
            matrix.vectors.cols() != cfg_.embedding_dim) {
            throw ConfigError("pre-trained embedding shape " +
                              std::to_string(matrix.vectors.rows()) + "x" +
                              std::to_string(matrix.vectors.cols()) +
                              " does not fit model");
        }
        for (std::size_t i = 0; i < matrix.vectors.size(); ++i) {
            emb_.value.data()[i] = static_cast<S>(matrix.vectors.data()[i]);
        }
        zero_row(emb_.value, Vocabulary::kPadId);
    }

    std::vector<std::pair<std::string, nn::Parameter<S>*>> parameters() {
        std::vector<std::pair<std::string, nn::Parameter<S>*>> out;
        out.emplace_back("embeddings", &emb_);
        for (std::size_t j = 0; j < conv_w_.size(); ++j) {
            const std::string w = std::to_string(cfg_.window_sizes[j]);
            out.emplace_back("conv" + w + "_w", &conv_w_[j]);
            out.emplace_back("conv" + w + "_b", &conv_b_[j]);
        }
        out.emplace_back("commit_conv_w", &cconv_w_);
        out.emplace_back("commit_conv_b", &cconv_b_);
        if (paired_) {
            out.emplace_back("fc_w", &fc_w_);
            out.emplace_back("fc_b", &fc_b_);
        } else {
            out.emplace_back("fc1_w", &fc1_w_);
            out.emplace_back("fc1_b", &fc1_b_);
            out.emplace_back("fc2_w", &fc2_w_);
            out.emplace_back("fc2_b", &fc2_b_);
        }
        return out;
    }

    // --- forward / backward ------------------------------------------------

    // rng is required when train is true (dropout draws); the workspace
    // holds every cache the matching backward() needs.
    Matrix<S> forward(const DiffInput& input, bool train, Rng* rng,
                      Workspace& ws) const {
        require_diff();
        if (input.files.empty()) {
            throw EmptyCommitError("commit has no files to encode");
        }
        build_embdrop(collect_ids(input.files), train, rng, ws);
        Matrix<S> file_vecs = encode_files(input.files, train, rng, ws.files, ws);
        Matrix<S> commit_vec =
            encode_commit_forward(file_vecs, train, ws.commit, ws);
        return diff_head_forward(commit_vec, train, rng, ws);
    }

    Matrix<S> forward(const PairedInput& input, bool train, Rng* rng,
                      Workspace& ws) const {
        require_paired();
        if (input.before.empty() || input.before.size() != input.after.size()) {
            throw EmptyCommitError(
                "paired commit needs parallel before/after streams");
        }
        std::vector<TokenSeq> all = input.before;
        all.insert(all.end(), input.after.begin(), input.after.end());
        build_embdrop(collect_ids(all), train, rng, ws);
        Matrix<S> before_vecs =
            encode_files(input.before, train, rng, ws.files, ws);
        Matrix<S> after_vecs =
            encode_files(input.after, train, rng, ws.files_after, ws);
        Matrix<S> bvec = encode_commit_forward(before_vecs, train, ws.commit, ws);
        Matrix<S> avec =
            encode_commit_forward(after_vecs, train, ws.commit_after, ws);
        Matrix<S> concat(1, bvec.cols() + avec.cols());
        std::copy(bvec.row_ptr(0), bvec.row_ptr(0) + bvec.cols(),
                  concat.row_ptr(0));
        std::copy(avec.row_ptr(0), avec.row_ptr(0) + avec.cols(),
                  concat.row_ptr(0) + bvec.cols());
        Matrix<S> dropped = nn::fc_dropout(concat, cfg_.regularizers.fc_dropout_p,
                                           train, *rng_or_dummy(rng, train),
                                           ws.head_drop);
        return nn::linear_forward(dropped, fc_w_.value, fc_b_.value, ws.l1);
    }

    void backward(const Matrix<S>& grad_logits, Workspace& ws) {
        if (paired_) {
            Matrix<S> grad_concat = nn::linear_backward(
                grad_logits, ws.l1, fc_w_.value, fc_w_.grad, fc_b_.grad);
            grad_concat = nn::mask_backward(grad_concat, ws.head_drop);
            const std::size_t f2 = cfg_.commit_level_filters;
            Matrix<S> grad_b(1, f2), grad_a(1, f2);
            std::copy(grad_concat.row_ptr(0), grad_concat.row_ptr(0) + f2,
                      grad_b.row_ptr(0));
            std::copy(grad_concat.row_ptr(0) + f2,
                      grad_concat.row_ptr(0) + 2 * f2, grad_a.row_ptr(0));
            Matrix<S> before_grads = encode_commit_backward(grad_b, ws.commit);
            Matrix<S> after_grads =
                encode_commit_backward(grad_a, ws.commit_after);
            decode_files_backward(before_grads, ws.files, ws);
            decode_files_backward(after_grads, ws.files_after, ws);
        } else {
            Matrix<S> grad_h = nn::linear_backward(
                grad_logits, ws.l2, fc2_w_.value, fc2_w_.grad, fc2_b_.grad);
            grad_h = nn::relu_backward(grad_h, ws.relu_pre);
            Matrix<S> grad_drop = nn::linear_backward(
                grad_h, ws.l1, fc1_w_.value, fc1_w_.grad, fc1_b_.grad);
            Matrix<S> grad_commit = nn::mask_backward(grad_drop, ws.head_drop);
            Matrix<S> file_grads = encode_commit_backward(grad_commit, ws.commit);
            decode_files_backward(file_grads, ws.files, ws);
        }
    }

    // --- conveniences ------------------------------------------------------

    template <typename Input>
    Prediction predict(const Input& input) const {
        Workspace ws;
        Matrix<S> logits = forward(input, /*train=*/false, nullptr, ws);
        return prediction_from_logits(logits);
    }

    template <typename Input>
    double eval_loss(const Input& input, int label) const {
        Workspace ws;
        Matrix<S> logits = forward(input, false, nullptr, ws);
        Matrix<S> grad;
        return nn::softmax_cross_entropy(logits, label, grad);
    }

    // Forward + backward with gradients scaled by `scale` (batch averaging
    // and class weights fold in here); returns the unscaled loss.
    template <typename Input>
    double train_step(const Input& input, int label, Rng& rng,
                      double scale = 1.0) {
        Workspace ws;
        Matrix<S> logits = forward(input, /*train=*/true, &rng, ws);
        Matrix<S> grad_logits;
        double loss = nn::softmax_cross_entropy(logits, label, grad_logits);
        if (scale != 1.0) {
            for (std::size_t i = 0; i < grad_logits.size(); ++i) {
                grad_logits.data()[i] =
                    static_cast<S>(grad_logits.data()[i] *
                                   static_cast<S>(scale));
            }
        }
        backward(grad_logits, ws);
        return loss;
    }

    static Prediction prediction_from_logits(const Matrix<S>& logits) {
        Matrix<S> probs = nn::softmax(logits);
        Prediction p;
        p.probability_security = static_cast<double>(probs(0, 1));
        p.label = probs(0, 1) > probs(0, 0) ? 1 : 0;
        return p;
    }

private:
    static void fill_uniform(Matrix<S>& m, Rng& rng, double half) {
        for (std::size_t i = 0; i < m.size(); ++i) {
            m.data()[i] = static_cast<S>(rng.uniform(-half, half));
        }
    }
    static void zero_row(Matrix<S>& m, int row) {
        S* p = m.row_ptr(static_cast<std::size_t>(row));
        std::fill(p, p + m.cols(), S(0));
    }
    static void xavier(nn::Parameter<S>& p, Rng& rng) {
        const double limit = std::sqrt(
            6.0 / static_cast<double>(p.value.rows() + p.value.cols()));
        fill_uniform(p.value, rng, limit);
    }

    void require_diff() const {
        if (paired_) {
            throw ConfigError("diff input fed to a paired-code model");
        }
    }
    void require_paired() const {
        if (!paired_) {
            throw ConfigError("paired input fed to a diff model");
        }
    }

    static Rng* rng_or_dummy(Rng* rng, bool train) {
        if (train && rng == nullptr) {
            throw ConfigError("training-mode forward needs an rng");
        }
        static Rng dummy(0);  // never drawn from: masks inactive in eval
        return rng == nullptr ? &dummy : rng;
    }

    std::vector<int> collect_ids(const std::vector<TokenSeq>& seqs) const {
        std::vector<int> ids;
        for (const TokenSeq& s : seqs) {
            ids.insert(ids.end(), s.begin(), s.end());
        }
        return ids;
    }

    void build_embdrop(const std::vector<int>& ids, bool train, Rng* rng,
                       Workspace& ws) const {
        const double p = hr_ ? cfg_.regularizers.embedding_dropout_p : 0.0;
        ws.embdrop.build(ids, p, train, *rng_or_dummy(rng, train));
    }

    // Per-file encoder; returns the stacked file vectors (N x 3*F1).
    Matrix<S> encode_files(const std::vector<TokenSeq>& seqs, bool train,
                           Rng* rng, std::vector<FileCache>& caches,
                           Workspace& ws) const {
        const std::size_t f1 = cfg_.filters_per_window;
        const std::size_t nw = cfg_.window_sizes.size();
        Matrix<S> out(seqs.size(), nw * f1);
        caches.assign(seqs.size(), FileCache{});
        for (std::size_t i = 0; i < seqs.size(); ++i) {
            Matrix<S> vec = encode_file_forward(seqs[i], train, rng,
                                                caches[i], ws);
            std::copy(vec.row_ptr(0), vec.row_ptr(0) + vec.cols(),
                      out.row_ptr(i));
        }
        return out;
    }

    Matrix<S> encode_file_forward(const TokenSeq& ids, bool train, Rng* rng,
                                  FileCache& fc, Workspace& ws) const {
        fc.padded = ids;
        while (fc.padded.size() < max_window_) {
            fc.padded.push_back(Vocabulary::kPadId);
        }
        const std::size_t t = fc.padded.size();
        const std::size_t d = cfg_.embedding_dim;
        fc.x = Matrix<S>(t, d);
        for (std::size_t r = 0; r < t; ++r) {
            const int id = fc.padded[r];
            check_id(id);
            const S factor = ws.embdrop.factor(id);
            const S* src = emb_.value.row_ptr(static_cast<std::size_t>(id));
            S* dst = fc.x.row_ptr(r);
            for (std::size_t k = 0; k < d; ++k) dst[k] = src[k] * factor;
        }

        const std::size_t nw = cfg_.window_sizes.size();
        const std::size_t f1 = cfg_.filters_per_window;
        fc.conv.assign(nw, {});
        fc.block.assign(nw, {});
        fc.pool.assign(nw, {});
        Matrix<S> vec(1, nw * f1);
        for (std::size_t j = 0; j < nw; ++j) {
            Matrix<S> act = nn::temporal_conv_forward(
                fc.x, cfg_.window_sizes[j], conv_w_[j].value, conv_b_[j].value,
                fc.conv[j]);
            ws.stats.min_abs_preact = std::min(ws.stats.min_abs_preact,
                                               nn::min_abs(fc.conv[j].pre));
            // A map shorter than the block has nowhere to seed; leave it
            // intact rather than failing short files.
            if (hr_ && train &&
                cfg_.regularizers.dropblock_size <= act.rows()) {
                act = nn::dropblock_1d(act, cfg_.regularizers.dropblock_size,
                                       cfg_.regularizers.dropblock_rate, true,
                                       cfg_.regularizers.shared_dropblock_mask,
                                       *rng_or_dummy(rng, train), fc.block[j]);
            } else {
                fc.block[j].active = false;
            }
            ws.stats.min_pool_margin =
                std::min(ws.stats.min_pool_margin, nn::pool_margin(act));
            Matrix<S> pooled = nn::max_pool_forward(act, fc.pool[j]);
            std::copy(pooled.row_ptr(0), pooled.row_ptr(0) + f1,
                      vec.row_ptr(0) + j * f1);
        }
        return vec;
    }

    void encode_file_backward(const Matrix<S>& grad_vec, FileCache& fc,
                              Workspace& ws) {
        const std::size_t nw = cfg_.window_sizes.size();
        const std::size_t f1 = cfg_.filters_per_window;
        const std::size_t t = fc.padded.size();
        const std::size_t d = cfg_.embedding_dim;
        Matrix<S> grad_x(t, d);
        for (std::size_t j = 0; j < nw; ++j) {
            Matrix<S> grad_pooled(1, f1);
            std::copy(grad_vec.row_ptr(0) + j * f1,
                      grad_vec.row_ptr(0) + (j + 1) * f1,
                      grad_pooled.row_ptr(0));
            Matrix<S> grad_map = nn::max_pool_backward(grad_pooled, fc.pool[j]);
            grad_map = nn::mask_backward(grad_map, fc.block[j]);
            Matrix<S> grad_in = nn::temporal_conv_backward(
                grad_map, fc.conv[j], conv_w_[j].value, conv_w_[j].grad,
                conv_b_[j].grad);
            for (std::size_t i = 0; i < grad_x.size(); ++i) {
                grad_x.data()[i] += grad_in.data()[i];
            }
        }
        // <PAD> embeddings stay zero: their gradient is dropped.
        for (std::size_t r = 0; r < t; ++r) {
            const int id = fc.padded[r];
            if (id == Vocabulary::kPadId) continue;
            const S factor = ws.embdrop.factor(id);
            if (factor == S(0)) continue;
            S* dst = emb_.grad.row_ptr(static_cast<std::size_t>(id));
            const S* src = grad_x.row_ptr(r);
            for (std::size_t k = 0; k < d; ++k) dst[k] += src[k] * factor;
        }
    }

    Matrix<S> encode_commit_forward(const Matrix<S>& file_vecs, bool train,
                                    CommitCache& cc, Workspace& ws) const {
        (void)train;
        cc.n_files = file_vecs.rows();
        const std::size_t rows =
            std::max(cc.n_files, cfg_.commit_level_window);
        cc.stacked = Matrix<S>(rows, file_vecs.cols());
        for (std::size_t r = 0; r < cc.n_files; ++r) {
            std::copy(file_vecs.row_ptr(r),
                      file_vecs.row_ptr(r) + file_vecs.cols(),
                      cc.stacked.row_ptr(r));
        }
        Matrix<S> act = nn::temporal_conv_forward(
            cc.stacked, cfg_.commit_level_window, cconv_w_.value,
            cconv_b_.value, cc.conv);
        ws.stats.min_abs_preact =
            std::min(ws.stats.min_abs_preact, nn::min_abs(cc.conv.pre));
        ws.stats.min_pool_margin =
            std::min(ws.stats.min_pool_margin, nn::pool_margin(act));
        return nn::max_pool_forward(act, cc.pool);
    }

    // Returns gradients for the real (unpadded) file-vector rows.
    Matrix<S> encode_commit_backward(const Matrix<S>& grad_commit,
                                     CommitCache& cc) {
        Matrix<S> grad_map = nn::max_pool_backward(grad_commit, cc.pool);
        Matrix<S> grad_stacked = nn::temporal_conv_backward(
            grad_map, cc.conv, cconv_w_.value, cconv_w_.grad, cconv_b_.grad);
        Matrix<S> out(cc.n_files, grad_stacked.cols());
        for (std::size_t r = 0; r < cc.n_files; ++r) {
            std::copy(grad_stacked.row_ptr(r),
                      grad_stacked.row_ptr(r) + grad_stacked.cols(),
                      out.row_ptr(r));
        }
        return out;
    }

    void decode_files_backward(const Matrix<S>& file_grads,
                               std::vector<FileCache>& caches, Workspace& ws) {
        for (std::size_t i = 0; i < caches.size(); ++i) {
            Matrix<S> grad_vec(1, file_grads.cols());
            std::copy(file_grads.row_ptr(i),
                      file_grads.row_ptr(i) + file_grads.cols(),
                      grad_vec.row_ptr(0));
            encode_file_backward(grad_vec, caches[i], ws);
        }
    }

    Matrix<S> diff_head_forward(const Matrix<S>& commit_vec, bool train,
                                Rng* rng, Workspace& ws) const {
        Matrix<S> dropped =
            nn::fc_dropout(commit_vec, cfg_.regularizers.fc_dropout_p, train,
                           *rng_or_dummy(rng, train), ws.head_drop);
        Matrix<S> h =
            nn::linear_forward(dropped, fc1_w_.value, fc1_b_.value, ws.l1);
        ws.stats.min_abs_preact =
            std::min(ws.stats.min_abs_preact, nn::min_abs(h));
        Matrix<S> act = nn::relu_forward(h, ws.relu_pre);
        return nn::linear_forward(act, fc2_w_.value, fc2_b_.value, ws.l2);
    }

    void check_id(int id) const {
        if (id < 0 || static_cast<std::size_t>(id) >= vocab_size_) {
            throw ShapeError("token id " + std::to_string(id) +
                             " outside vocabulary of " +
                             std::to_string(vocab_size_));
        }
    }

    ModelVariant variant_;
    HcnnConfig cfg_;
    std::size_t vocab_size_;
    std::string fingerprint_;
    bool paired_ = false;
    bool hr_ = false;
    std::size_t max_window_ = 0;

    nn::Parameter<S> emb_;
    std::vector<nn::Parameter<S>> conv_w_;
    std::vector<nn::Parameter<S>> conv_b_;
    nn::Parameter<S> cconv_w_;
    nn::Parameter<S> cconv_b_;
    // diff head
    nn::Parameter<S> fc1_w_, fc1_b_, fc2_w_, fc2_b_;
    // paired head
    nn::Parameter<S> fc_w_, fc_b_;
};

// Logistic regression over binary token-presence features.  Duplicate
// tokens in a commit contribute once; the L2 penalty (lambda/2)*||w||^2
// applies to the weights, not the bias.
template <typename S>
class LrBaseline {
public:
    LrBaseline(std::size_t vocab_size, std::string vocab_fingerprint,
               double l2_lambda = 1e-4)
        : vocab_size_(vocab_size),
          fingerprint_(std::move(vocab_fingerprint)),
          lambda_(l2_lambda),
          weight_(vocab_size, 1),
          bias_(1, 1) {
        if (vocab_size_ == 0) throw ConfigError("empty vocabulary");
        if (lambda_ < 0.0) throw ConfigError("l2_lambda must be >= 0");
    }

    std::size_t vocab_size() const { return vocab_size_; }
    const std::string& vocab_fingerprint() const { return fingerprint_; }
    double l2_lambda() const { return lambda_; }

    std::vector<std::pair<std::string, nn::Parameter<S>*>> parameters() {
        return {{"weight", &weight_}, {"bias", &bias_}};
    }

    Prediction predict(const std::vector<int>& token_ids) const {
        const double z = logit(token_ids);
        Prediction p;
        p.probability_security = 1.0 / (1.0 + std::exp(-z));
        p.label = p.probability_security > 0.5 ? 1 : 0;
        return p;
    }

    double eval_loss(const std::vector<int>& token_ids, int label) const {
        return loss_at(logit(token_ids), label);
    }

    double train_step(const std::vector<int>& token_ids, int label,
                      double scale = 1.0) {
        std::vector<int> present = distinct(token_ids);
        double z = 0.0;
        for (int id : present) {
            z += static_cast<double>(
                weight_.value(static_cast<std::size_t>(id), 0));
        }
        z += static_cast<double>(bias_.value(0, 0));
        const double p = 1.0 / (1.0 + std::exp(-z));
        const double g = (p - static_cast<double>(label)) * scale;
        for (int id : present) {
            weight_.grad(static_cast<std::size_t>(id), 0) += static_cast<S>(g);
        }
        bias_.grad(0, 0) += static_cast<S>(g);
        for (std::size_t i = 0; i < vocab_size_; ++i) {
            weight_.grad(i, 0) += static_cast<S>(
                lambda_ * static_cast<double>(weight_.value(i, 0)) * scale);
        }
        return loss_at(z, label);
    }

    Matrix<S>& weight_values() { return weight_.value; }
    const Matrix<S>& weight_values() const { return weight_.value; }
    Matrix<S>& bias_values() { return bias_.value; }
    const Matrix<S>& bias_values() const { return bias_.value; }

private:
    std::vector<int> distinct(const std::vector<int>& ids) const {
        std::vector<int> out = ids;
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        for (int id : out) {
            if (id < 0 || static_cast<std::size_t>(id) >= vocab_size_) {
                throw ShapeError("token id outside vocabulary");
            }
        }
        return out;
    }

    double logit(const std::vector<int>& ids) const {
        double z = static_cast<double>(bias_.value(0, 0));
        for (int id : distinct(ids)) {
            z += static_cast<double>(
                weight_.value(static_cast<std::size_t>(id), 0));
        }
        return z;
    }

    double loss_at(double z, int label) const {
        if (label != 0 && label != 1) {
            throw LabelRangeError("binary label expected");
        }
        // Stable -[y ln p + (1-y) ln(1-p)] = ln(1+e^z) - y z.
        const double softplus =
            z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
        double l2 = 0.0;
        for (std::size_t i = 0; i < vocab_size_; ++i) {
            const double w = static_cast<double>(weight_.value(i, 0));
            l2 += w * w;
        }
        return softplus - static_cast<double>(label) * z +
               0.5 * lambda_ * l2;
    }

    std::size_t vocab_size_;
    std::string fingerprint_;
    double lambda_;
    nn::Parameter<S> weight_;
    nn::Parameter<S> bias_;
};

}  // namespace csent
