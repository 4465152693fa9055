#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "csent/checkpoint.hpp"
#include "csent/embed.hpp"
#include "csent/featurize.hpp"
#include "csent/split.hpp"
#include "csent/vocab.hpp"

namespace csent {

struct TrainOptions {
    int max_epochs = 100;
    int patience = 10;  // epochs without validation-F1 improvement
    std::uint64_t seed = 0;
    // Weight each sample's loss by the inverse frequency of its class.
    bool class_weighting = false;
    double l2_lambda = 1e-4;  // lr-baseline only
    FeaturizeOptions featurize;
    // Progress hook (epoch, mean train loss, validation F1); may be empty.
    std::function<void(int, double, double)> on_epoch;
};

struct TrainOutcome {
    Checkpoint checkpoint;  // best-validation snapshot
    int epochs_run = 0;
    double best_val_f1 = 0.0;
    std::vector<double> epoch_train_loss;
    std::vector<double> epoch_val_f1;
};

// Mini-batch Adam over the training split with per-epoch validation F1,
// early stopping, and a best-validation checkpoint.  Deterministic for a
// given seed.  `pretrained` is required exactly when the config says
// embedding_init is pre-trained (ignored by the lr-baseline).
TrainOutcome train_model(ModelVariant variant, const SplitSet& splits,
                         const Vocabulary& vocab, HcnnConfig config,
                         const EmbeddingMatrix* pretrained,
                         const TrainOptions& opts = {});

}  // namespace csent
