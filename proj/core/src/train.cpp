#include "csent/train.hpp"

#include <array>
#include <numeric>
#include <type_traits>

#include "csent/errors.hpp"
#include "csent/eval.hpp"
#include "csent/model.hpp"

namespace csent {

namespace {

std::vector<int> labels_of(const std::vector<CommitRecord>& records) {
    std::vector<int> out;
    out.reserve(records.size());
    for (const CommitRecord& r : records) {
        out.push_back(r.label == Label::SecurityRelevant ? 1 : 0);
    }
    return out;
}

std::array<double, 2> class_weights(const std::vector<int>& labels,
                                    bool enabled) {
    if (!enabled) return {1.0, 1.0};
    double pos = 0.0;
    for (int y : labels) pos += y;
    const double total = static_cast<double>(labels.size());
    const double neg = total - pos;
    return {total / (2.0 * std::max(neg, 1.0)),
            total / (2.0 * std::max(pos, 1.0))};
}

// Shared epoch/batch/early-stopping loop; the two model families differ
// only in their train_step signature.
template <typename Model, typename Input>
TrainOutcome train_loop(Model& model, const std::vector<Input>& train_x,
                        const std::vector<int>& train_y,
                        const std::vector<Input>& val_x,
                        const std::vector<int>& val_y, double lr,
                        std::size_t batch_size, bool freeze_embeddings,
                        const TrainOptions& opts, Rng& rng) {
    constexpr bool is_lr = std::is_same_v<Model, LrBaseline<float>>;
    const std::array<double, 2> weights =
        class_weights(train_y, opts.class_weighting);

    TrainOutcome outcome;
    outcome.best_val_f1 = -1.0;
    int since_improve = 0;

    std::vector<std::size_t> order(train_x.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (int epoch = 1; epoch <= opts.max_epochs; ++epoch) {
        rng.shuffle(order);
        double loss_sum = 0.0;
        for (std::size_t start = 0; start < order.size();
             start += batch_size) {
            const std::size_t end =
                std::min(order.size(), start + batch_size);
            const double inv_batch = 1.0 / static_cast<double>(end - start);
            for (std::size_t k = start; k < end; ++k) {
                const std::size_t i = order[k];
                const int y = train_y[i];
                const double scale = weights[y] * inv_batch;
                if constexpr (is_lr) {
                    loss_sum += model.train_step(train_x[i], y, scale);
                } else {
                    loss_sum += model.train_step(train_x[i], y, rng, scale);
                }
            }
            for (auto& [name, param] : model.parameters()) {
                if (!is_lr && freeze_embeddings && name == "embeddings") {
                    param->zero_grad();
                } else {
                    nn::adam_step(*param, lr);
                }
            }
        }

        std::vector<int> val_pred;
        val_pred.reserve(val_x.size());
        for (const Input& x : val_x) val_pred.push_back(model.predict(x).label);
        const double val_f1 = compute_metrics(val_pred, val_y).f1;

        outcome.epoch_train_loss.push_back(
            loss_sum / static_cast<double>(train_x.size()));
        outcome.epoch_val_f1.push_back(val_f1);
        outcome.epochs_run = epoch;
        if (opts.on_epoch) {
            opts.on_epoch(epoch, outcome.epoch_train_loss.back(), val_f1);
        }

        if (val_f1 > outcome.best_val_f1) {
            outcome.best_val_f1 = val_f1;
            since_improve = 0;
            TrainMetadata md;
            md.epochs_run = epoch;
            md.best_val_f1 = val_f1;
            md.seed = opts.seed;
            outcome.checkpoint = make_checkpoint(model, md);
        } else if (++since_improve >= opts.patience) {
            break;
        }
    }
    outcome.checkpoint.metadata.epochs_run = outcome.epochs_run;
    return outcome;
}

}  // namespace

TrainOutcome train_model(ModelVariant variant, const SplitSet& splits,
                         const Vocabulary& vocab, HcnnConfig config,
                         const EmbeddingMatrix* pretrained,
                         const TrainOptions& opts) {
    if (splits.train.empty()) throw ConfigError("training split is empty");
    if (splits.validation.empty()) {
        throw ConfigError("validation split is empty");
    }
    const bool wants_pretrained =
        config.embedding_init == EmbeddingInit::PreTrained &&
        variant != ModelVariant::LrBaseline;
    if (wants_pretrained && pretrained == nullptr) {
        throw ConfigError(
            "config asks for pre-trained embeddings but none were given");
    }
    if (!wants_pretrained && pretrained != nullptr &&
        variant != ModelVariant::LrBaseline) {
        throw ConfigError(
            "embeddings supplied but config says embedding_init=random");
    }
    if (wants_pretrained &&
        pretrained->vocab_fingerprint != vocab.fingerprint()) {
        throw ConfigError(
            "pre-trained embeddings were built for a different vocabulary");
    }

    const std::vector<int> train_y = labels_of(splits.train);
    const std::vector<int> val_y = labels_of(splits.validation);
    const std::size_t batch = config.resolved_batch_size();
    Rng rng(opts.seed);

    if (variant == ModelVariant::LrBaseline) {
        std::vector<std::vector<int>> train_x, val_x;
        train_x.reserve(splits.train.size());
        for (const CommitRecord& r : splits.train) {
            train_x.push_back(encode_flat_input(r, vocab, opts.featurize));
        }
        val_x.reserve(splits.validation.size());
        for (const CommitRecord& r : splits.validation) {
            val_x.push_back(encode_flat_input(r, vocab, opts.featurize));
        }
        LrBaseline<float> model(vocab.size(), vocab.fingerprint(),
                                opts.l2_lambda);
        return train_loop(model, train_x, train_y, val_x, val_y,
                          config.learning_rate, batch, false, opts, rng);
    }

    HierarchicalCnn<float> model(variant, config, vocab.size(),
                                 vocab.fingerprint());
    model.init_random(rng);
    if (wants_pretrained) model.set_pretrained_embeddings(*pretrained);

    if (variant_is_paired(variant)) {
        std::vector<PairedInput> train_x, val_x;
        train_x.reserve(splits.train.size());
        for (const CommitRecord& r : splits.train) {
            train_x.push_back(encode_paired_input(r, vocab, opts.featurize));
        }
        val_x.reserve(splits.validation.size());
        for (const CommitRecord& r : splits.validation) {
            val_x.push_back(encode_paired_input(r, vocab, opts.featurize));
        }
        return train_loop(model, train_x, train_y, val_x, val_y,
                          config.learning_rate, batch,
                          config.freeze_embeddings, opts, rng);
    }

    std::vector<DiffInput> train_x, val_x;
    train_x.reserve(splits.train.size());
    for (const CommitRecord& r : splits.train) {
        train_x.push_back(encode_diff_input(r, vocab, opts.featurize));
    }
    val_x.reserve(splits.validation.size());
    for (const CommitRecord& r : splits.validation) {
        val_x.push_back(encode_diff_input(r, vocab, opts.featurize));
    }
    return train_loop(model, train_x, train_y, val_x, val_y,
                      config.learning_rate, batch, config.freeze_embeddings,
                      opts, rng);
}

}  // namespace csent
