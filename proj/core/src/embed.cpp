#include "csent/embed.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "csent/errors.hpp"
#include "csent/rng.hpp"
#include "csent/util.hpp"

namespace csent {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

double cosine_similarity(const double* a, const double* b, std::size_t n) {
    double ab = dot(a, b, n);
    double aa = dot(a, a, n);
    double bb = dot(b, b, n);
    if (aa == 0.0 || bb == 0.0) return 0.0;
    return ab / (std::sqrt(aa) * std::sqrt(bb));
}

NegativeSamplingTable::NegativeSamplingTable(const Vocabulary& vocab,
                                            double power) {
    double total = 0.0;
    for (int id = 0; id < static_cast<int>(vocab.size()); ++id) {
        if (vocab.is_special(id)) continue;
        ids_.push_back(id);
        total += std::pow(static_cast<double>(vocab.count_of(id)), power);
    }
    if (ids_.empty()) {
        throw EmptyVocabError(
            "negative sampling needs at least one non-special token");
    }
    cumulative_.reserve(ids_.size());
    double acc = 0.0;
    for (int id : ids_) {
        acc += std::pow(static_cast<double>(vocab.count_of(id)), power) / total;
        cumulative_.push_back(acc);
    }
    cumulative_.back() = 1.0;  // clamp accumulated rounding
}

int NegativeSamplingTable::sample(double u) const {
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return ids_[static_cast<std::size_t>(it - cumulative_.begin())];
}

double NegativeSamplingTable::probability_of(int id) const {
    auto it = std::find(ids_.begin(), ids_.end(), id);
    if (it == ids_.end()) return 0.0;
    std::size_t i = static_cast<std::size_t>(it - ids_.begin());
    return i == 0 ? cumulative_[0] : cumulative_[i] - cumulative_[i - 1];
}

double cbow_step(EmbeddingMatrix& matrix, const std::vector<int>& context_ids,
                 int target_id, const std::vector<int>& negative_ids,
                 double lr) {
    const std::size_t dim = matrix.vectors.cols();
    if (target_id == Vocabulary::kPadId) return 0.0;

    // h = mean of non-PAD context input vectors.
    std::vector<double> h(dim, 0.0);
    std::size_t m = 0;
    for (int c : context_ids) {
        if (c == Vocabulary::kPadId) continue;
        const double* row = matrix.vectors.row_ptr(static_cast<std::size_t>(c));
        for (std::size_t d = 0; d < dim; ++d) h[d] += row[d];
        ++m;
    }
    if (m == 0) return 0.0;
    for (std::size_t d = 0; d < dim; ++d) h[d] /= static_cast<double>(m);

    // All gradients are evaluated at the pre-step tables and applied
    // afterwards, so the update is the exact gradient of the stated loss
    // even when the sampler repeats a negative id.
    std::vector<double> grad_h(dim, 0.0);
    std::vector<std::pair<int, double>> output_coeffs;  // (row, dL/d(h.v))
    output_coeffs.reserve(negative_ids.size() + 1);
    double loss = 0.0;

    // Positive term: -ln s(h.v_t); d/d(h.v_t) = s - 1.
    {
        const double* vt = matrix.output_vectors.row_ptr(
            static_cast<std::size_t>(target_id));
        double s = sigmoid(dot(h.data(), vt, dim));
        loss -= std::log(std::max(s, 1e-300));
        double g = s - 1.0;
        for (std::size_t d = 0; d < dim; ++d) grad_h[d] += g * vt[d];
        output_coeffs.emplace_back(target_id, g);
    }
    // Negative terms: -ln s(-h.v_n); d/d(h.v_n) = s(h.v_n).
    for (int n : negative_ids) {
        const double* vn =
            matrix.output_vectors.row_ptr(static_cast<std::size_t>(n));
        double s = sigmoid(dot(h.data(), vn, dim));
        loss -= std::log(std::max(1.0 - s, 1e-300));
        for (std::size_t d = 0; d < dim; ++d) grad_h[d] += s * vn[d];
        output_coeffs.emplace_back(n, s);
    }

    for (const auto& [row_id, g] : output_coeffs) {
        double* row =
            matrix.output_vectors.row_ptr(static_cast<std::size_t>(row_id));
        for (std::size_t d = 0; d < dim; ++d) row[d] -= lr * g * h[d];
    }
    // Each contributing context vector receives grad_h / m.
    const double scale = lr / static_cast<double>(m);
    for (int c : context_ids) {
        if (c == Vocabulary::kPadId) continue;
        double* row = matrix.vectors.row_ptr(static_cast<std::size_t>(c));
        for (std::size_t d = 0; d < dim; ++d) row[d] -= scale * grad_h[d];
    }
    return loss;
}

EmbeddingMatrix train_cbow(const std::vector<std::vector<int>>& corpus,
                           const CbowConfig& config, const Vocabulary& vocab) {
    std::size_t total_positions = 0;
    for (const auto& seq : corpus) total_positions += seq.size();
    if (total_positions == 0) {
        throw EmptyCorpusError("cbow training corpus has no tokens");
    }

    NegativeSamplingTable table(vocab, config.unigram_power);

    EmbeddingMatrix matrix;
    matrix.vocab_fingerprint = vocab.fingerprint();
    matrix.vectors = Matrix<double>(vocab.size(), config.dim);
    matrix.output_vectors = Matrix<double>(vocab.size(), config.dim);

    Rng rng(config.seed);
    // Input table starts small and uniform, output table at zero; the
    // first step through any id then sees all-zero dot products.
    const double half = 0.5 / static_cast<double>(config.dim);
    for (std::size_t r = 0; r < matrix.vectors.rows(); ++r) {
        if (static_cast<int>(r) == Vocabulary::kPadId) continue;
        for (std::size_t d = 0; d < config.dim; ++d) {
            matrix.vectors(r, d) = rng.uniform(-half, half);
        }
    }

    // Subsampling discards frequent tokens with the standard
    // 1 - (sqrt(t/f) + t/f) probability, f measured on vocabulary counts.
    std::vector<double> keep_prob;
    if (config.subsample) {
        double corpus_total = 0.0;
        for (std::size_t id = 0; id < vocab.size(); ++id) {
            corpus_total += static_cast<double>(vocab.count_of(
                static_cast<int>(id)));
        }
        keep_prob.assign(vocab.size(), 1.0);
        for (std::size_t id = 0; id < vocab.size(); ++id) {
            double f = static_cast<double>(vocab.count_of(
                            static_cast<int>(id))) /
                       std::max(corpus_total, 1.0);
            if (f <= 0.0) continue;
            double t = config.subsample_threshold;
            keep_prob[id] = std::min(1.0, std::sqrt(t / f) + t / f);
        }
    }

    const double lr0 = config.learning_rate;
    const double lr_floor = lr0 * 1e-4;
    const std::size_t total_steps =
        total_positions * static_cast<std::size_t>(config.epochs);
    std::size_t processed = 0;

    std::vector<int> context;
    std::vector<int> negatives;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        for (const std::vector<int>& seq : corpus) {
            const std::size_t n = seq.size();
            for (std::size_t pos = 0; pos < n; ++pos) {
                double lr = lr0 * (1.0 - static_cast<double>(processed) /
                                             static_cast<double>(total_steps));
                lr = std::max(lr, lr_floor);
                ++processed;

                int target = seq[pos];
                if (target == Vocabulary::kPadId) continue;
                if (config.subsample &&
                    !rng.bernoulli(keep_prob[static_cast<std::size_t>(
                        target)])) {
                    continue;
                }

                context.clear();
                const std::size_t w =
                    static_cast<std::size_t>(config.window);
                std::size_t lo = pos > w ? pos - w : 0;
                std::size_t hi = std::min(n, pos + w + 1);
                for (std::size_t j = lo; j < hi; ++j) {
                    if (j != pos) context.push_back(seq[j]);
                }
                if (context.empty()) continue;

                negatives.clear();
                for (int k = 0; k < config.negatives; ++k) {
                    // A negative equal to the target carries no signal;
                    // resample, give up after a bounded number of tries.
                    for (int attempt = 0; attempt < 100; ++attempt) {
                        int cand = table.sample(rng.uniform());
                        if (cand != target) {
                            negatives.push_back(cand);
                            break;
                        }
                    }
                }
                cbow_step(matrix, context, target, negatives, lr);
            }
        }
    }
    return matrix;
}

void save_embeddings(const std::string& path, const EmbeddingMatrix& matrix,
                     const Vocabulary& vocab) {
    if (matrix.vectors.rows() != vocab.size()) {
        throw FormatError("embedding rows do not match vocabulary size");
    }
    if (matrix.vocab_fingerprint != vocab.fingerprint()) {
        throw FingerprintMismatch(
            "embedding matrix was built for a different vocabulary");
    }
    std::string out;
    out.reserve(matrix.vectors.rows() * (matrix.vectors.cols() * 10 + 16));
    char buf[64];
    std::snprintf(buf, sizeof buf, "%zu %zu\n", matrix.vectors.rows(),
                  matrix.vectors.cols());
    out += buf;
    for (std::size_t r = 0; r < matrix.vectors.rows(); ++r) {
        out += vocab.token_of(static_cast<int>(r));
        for (std::size_t d = 0; d < matrix.vectors.cols(); ++d) {
            std::snprintf(buf, sizeof buf, " %.6f", matrix.vectors(r, d));
            out += buf;
        }
        out += '\n';
    }
    out += "#fingerprint " + matrix.vocab_fingerprint + "\n";
    write_file(path, out);
}

namespace {

// Token text may contain spaces (string literals keep their contents), so
// rows are parsed right-to-left: the last `dim` fields are components,
// everything before them is the token.
void parse_embedding_row(const std::string& line, std::size_t dim,
                         std::size_t row, Matrix<double>& vectors,
                         std::string& token_out) {
    std::size_t end = line.size();
    std::vector<double> comps(dim);
    for (std::size_t k = 0; k < dim; ++k) {
        std::size_t sp = line.rfind(' ', end == 0 ? 0 : end - 1);
        if (sp == std::string::npos || sp + 1 >= end) {
            throw FormatError("embedding row " + std::to_string(row) +
                              ": expected " + std::to_string(dim) +
                              " components");
        }
        const char* first = line.data() + sp + 1;
        const char* last = line.data() + end;
        double value = 0.0;
        auto [p, ec] = std::from_chars(first, last, value);
        if (ec != std::errc() || p != last) {
            throw FormatError("embedding row " + std::to_string(row) +
                              ": bad component");
        }
        comps[dim - 1 - k] = value;
        end = sp;
    }
    if (end == 0) {
        throw FormatError("embedding row " + std::to_string(row) +
                          ": missing token");
    }
    token_out = line.substr(0, end);
    for (std::size_t d = 0; d < dim; ++d) vectors(row, d) = comps[d];
}

}  // namespace

EmbeddingMatrix load_embeddings(const std::string& path) {
    std::string content = read_file(path);
    std::vector<std::string> lines = split_lines(content);
    if (!lines.empty() && lines.back().empty()) lines.pop_back();
    if (lines.size() < 2) throw FormatError("embedding file too short");

    std::size_t size = 0, dim = 0;
    {
        const char* first = lines[0].data();
        const char* last = first + lines[0].size();
        auto [p1, e1] = std::from_chars(first, last, size);
        if (e1 != std::errc() || p1 == last || *p1 != ' ') {
            throw FormatError("bad embedding header: " + lines[0]);
        }
        auto [p2, e2] = std::from_chars(p1 + 1, last, dim);
        if (e2 != std::errc() || p2 != last) {
            throw FormatError("bad embedding header: " + lines[0]);
        }
    }
    if (size == 0 || dim == 0) {
        throw FormatError("embedding header declares an empty matrix");
    }
    if (lines.size() != size + 2) {
        throw FormatError("embedding file has " +
                          std::to_string(lines.size() - 2) +
                          " rows, header declares " + std::to_string(size));
    }
    const std::string& tail = lines.back();
    const std::string prefix = "#fingerprint ";
    if (tail.rfind(prefix, 0) != 0 || tail.size() <= prefix.size()) {
        throw FormatError("embedding file missing fingerprint line");
    }

    EmbeddingMatrix matrix;
    matrix.vocab_fingerprint = tail.substr(prefix.size());
    matrix.vectors = Matrix<double>(size, dim);
    std::string token;
    for (std::size_t r = 0; r < size; ++r) {
        parse_embedding_row(lines[r + 1], dim, r, matrix.vectors, token);
    }
    return matrix;
}

EmbeddingMatrix load_embeddings(const std::string& path,
                                const Vocabulary& vocab) {
    EmbeddingMatrix matrix = load_embeddings(path);
    if (matrix.vocab_fingerprint != vocab.fingerprint()) {
        throw FingerprintMismatch("embedding file fingerprint " +
                                  matrix.vocab_fingerprint +
                                  " does not match vocabulary " +
                                  vocab.fingerprint());
    }
    if (matrix.vectors.rows() != vocab.size()) {
        throw FingerprintMismatch(
            "embedding row count does not match vocabulary size");
    }
    return matrix;
}

}  // namespace csent
