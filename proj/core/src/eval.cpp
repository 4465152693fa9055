#include "csent/eval.hpp"

#include "csent/errors.hpp"
#include "csent/model.hpp"
#include "csent/util.hpp"

namespace csent {

double f1_score(double precision, double recall) {
    const double denom = precision + recall;
    return denom == 0.0 ? 0.0 : 2.0 * precision * recall / denom;
}

Metrics compute_metrics(const std::vector<int>& predictions,
                        const std::vector<int>& labels) {
    if (predictions.size() != labels.size()) {
        throw LengthMismatchError(
            std::to_string(predictions.size()) + " predictions vs " +
            std::to_string(labels.size()) + " labels");
    }
    if (predictions.empty()) {
        throw EmptyInputError("metrics need at least one sample");
    }
    Metrics m;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const bool pred = predictions[i] != 0;
        const bool truth = labels[i] != 0;
        if (pred && truth) ++m.tp;
        else if (pred && !truth) ++m.fp;
        else if (!pred && truth) ++m.fn;
        else ++m.tn;
    }
    const std::uint64_t total = m.tp + m.fp + m.fn + m.tn;
    m.accuracy = static_cast<double>(m.tp + m.tn) / static_cast<double>(total);
    m.precision = m.tp + m.fp == 0
                      ? 0.0
                      : static_cast<double>(m.tp) /
                            static_cast<double>(m.tp + m.fp);
    m.recall = m.tp + m.fn == 0 ? 0.0
                                : static_cast<double>(m.tp) /
                                      static_cast<double>(m.tp + m.fn);
    m.f1 = f1_score(m.precision, m.recall);
    return m;
}

EvalResult evaluate(const Checkpoint& checkpoint,
                    const std::vector<CommitRecord>& records,
                    const Vocabulary& vocab, const FeaturizeOptions& opts) {
    if (checkpoint.vocab_fingerprint != vocab.fingerprint()) {
        throw FingerprintMismatch("checkpoint fingerprint " +
                                  checkpoint.vocab_fingerprint +
                                  " does not match vocabulary " +
                                  vocab.fingerprint());
    }
    if (records.empty()) {
        throw EmptyInputError("nothing to evaluate");
    }

    EvalResult result;
    result.scores.resize(records.size());
    auto score_one = [&](const CommitRecord& rec,
                         const Prediction& p) -> RecordScore {
        return {rec.repo, rec.sha, p.probability_security, p.label,
                rec.label == Label::SecurityRelevant ? 1 : 0};
    };

    // Loaded models are frozen; scoring fans out safely.
    if (checkpoint.variant == ModelVariant::LrBaseline) {
        const LrBaseline<float> model = lr_from_checkpoint<float>(checkpoint);
        parallel_for(records.size(), [&](std::size_t i) {
            Prediction p =
                model.predict(encode_flat_input(records[i], vocab, opts));
            result.scores[i] = score_one(records[i], p);
        });
    } else if (variant_is_paired(checkpoint.variant)) {
        const HierarchicalCnn<float> model =
            hcnn_from_checkpoint<float>(checkpoint);
        parallel_for(records.size(), [&](std::size_t i) {
            Prediction p =
                model.predict(encode_paired_input(records[i], vocab, opts));
            result.scores[i] = score_one(records[i], p);
        });
    } else {
        const HierarchicalCnn<float> model =
            hcnn_from_checkpoint<float>(checkpoint);
        parallel_for(records.size(), [&](std::size_t i) {
            Prediction p =
                model.predict(encode_diff_input(records[i], vocab, opts));
            result.scores[i] = score_one(records[i], p);
        });
    }

    std::vector<int> predictions(records.size());
    std::vector<int> labels(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        predictions[i] = result.scores[i].predicted;
        labels[i] = result.scores[i].label;
    }
    result.metrics = compute_metrics(predictions, labels);
    return result;
}

}  // namespace csent
