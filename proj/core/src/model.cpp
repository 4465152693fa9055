#include "csent/model.hpp"

namespace csent {

DiffInput encode_diff_input(const CommitRecord& record, const Vocabulary& vocab,
                            const FeaturizeOptions& opts) {
    DiffFeatures features = featurize_diff(record.files, opts);
    DiffInput input;
    input.files.reserve(features.files.size());
    for (const FileTokens& ft : features.files) {
        input.files.push_back(encode_texts(ft.tokens, vocab));
    }
    return input;
}

PairedInput encode_paired_input(const CommitRecord& record,
                                const Vocabulary& vocab,
                                const FeaturizeOptions& opts) {
    PairedFeatures features = featurize_paired(record.files, opts);
    PairedInput input;
    input.before.reserve(features.files.size());
    input.after.reserve(features.files.size());
    for (const PairedFileTokens& pft : features.files) {
        input.before.push_back(encode_texts(pft.before, vocab));
        input.after.push_back(encode_texts(pft.after, vocab));
    }
    return input;
}

std::vector<int> encode_flat_input(const CommitRecord& record,
                                   const Vocabulary& vocab,
                                   const FeaturizeOptions& opts) {
    DiffFeatures features = featurize_diff(record.files, opts);
    return encode_texts(flatten_with_separators(features), vocab);
}

}  // namespace csent
