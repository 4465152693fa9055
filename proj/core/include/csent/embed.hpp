#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "csent/matrix.hpp"
#include "csent/vocab.hpp"

namespace csent {

// The pipeline trains 300-dimensional token vectors; tests may shrink the
// dimension through CbowConfig, the tools always use this value.
inline constexpr std::size_t kEmbeddingDim = 300;

struct CbowConfig {
    int window = 5;       // context positions each side, clipped at edges
    int negatives = 5;    // k sampled negatives per position
    int epochs = 5;
    double learning_rate = 0.025;  // decays linearly to 1e-4 of itself
    double unigram_power = 0.75;
    bool subsample = false;        // frequent-token subsampling, off by default
    double subsample_threshold = 1e-3;
    std::uint64_t seed = 0;
    std::size_t dim = kEmbeddingDim;
};

// Cumulative unigram^power distribution over sampleable token ids.
// Specials (<PAD>, <UNK>, <NUM>, <ADD>, <DEL>, <SEP>) never appear as
// negatives; they carry structure, not co-occurrence signal.
class NegativeSamplingTable {
public:
    NegativeSamplingTable(const Vocabulary& vocab, double power);

    // Inverse-CDF draw; u must be in [0, 1).
    int sample(double u) const;
    double probability_of(int id) const;  // 0 for non-sampleable ids
    std::size_t support_size() const { return ids_.size(); }

private:
    std::vector<int> ids_;
    std::vector<double> cumulative_;  // parallel to ids_, last entry 1.0
};

struct EmbeddingMatrix {
    Matrix<double> vectors;         // input/context table; what gets exported
    Matrix<double> output_vectors;  // target table; dropped at save time
    std::string vocab_fingerprint;
};

// One CBOW/negative-sampling position: h = mean of context input vectors,
// loss = -ln s(h.v_t) - sum_n ln s(-h.v_n).  Both tables take an exact
// gradient step scaled by lr.  <PAD> contexts are excluded from the mean
// and its row is never touched; returns the loss (0 if nothing to do).
double cbow_step(EmbeddingMatrix& matrix,
                 const std::vector<int>& context_ids, int target_id,
                 const std::vector<int>& negative_ids, double lr);

// Full training pass over a corpus of id sequences; deterministic for a
// given config.  Throws EmptyCorpusError when there are no tokens and
// EmptyVocabError when nothing is sampleable as a negative.
EmbeddingMatrix train_cbow(const std::vector<std::vector<int>>& corpus,
                           const CbowConfig& config, const Vocabulary& vocab);

// Text format: `<vocab_size> <dim>` header, one `<token> <v1> ... <vD>`
// row per id (6-decimal components), trailing `#fingerprint <hex>` line.
void save_embeddings(const std::string& path, const EmbeddingMatrix& matrix,
                     const Vocabulary& vocab);
EmbeddingMatrix load_embeddings(const std::string& path);
// Same, but also checks the file was written for this exact vocabulary.
EmbeddingMatrix load_embeddings(const std::string& path,
                                const Vocabulary& vocab);

double cosine_similarity(const double* a, const double* b, std::size_t n);

}  // namespace csent
