#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "csent/checkpoint.hpp"
#include "csent/featurize.hpp"
#include "csent/records.hpp"
#include "csent/vocab.hpp"

namespace csent {

// Positive class = security-relevant.  Any metric whose denominator is
// zero is reported as 0 (degenerate splits stay NaN-free).
struct Metrics {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
};

double f1_score(double precision, double recall);

Metrics compute_metrics(const std::vector<int>& predictions,
                        const std::vector<int>& labels);

struct RecordScore {
    std::string repo;
    std::string sha;
    double probability_security = 0.0;
    int predicted = 0;
    int label = 0;
};

struct EvalResult {
    Metrics metrics;
    std::vector<RecordScore> scores;  // one per record, input order
};

// Evaluation-mode scoring of every record with an argmax decision; the
// checkpoint must have been trained against this vocabulary.
EvalResult evaluate(const Checkpoint& checkpoint,
                    const std::vector<CommitRecord>& records,
                    const Vocabulary& vocab,
                    const FeaturizeOptions& opts = {});

}  // namespace csent
