#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "csent/records.hpp"

namespace csent {

// Caps keep pathological commits (vendored blobs, generated code) from
// swamping a batch.  Truncation keeps the head of each sequence.
struct FeaturizeOptions {
    std::size_t max_files = 16;
    std::size_t max_tokens_per_side = 2000;
};

// One file's worth of change, as token text sequences.
struct FileTokens {
    std::vector<std::string> tokens;  // diff view: <ADD> a... <DEL> r...
};

// Diff view of a commit: one token sequence per changed file.
struct DiffFeatures {
    std::vector<FileTokens> files;
};

// Paired view: before/after token sequences per file.  An empty side is
// represented by a single <PAD> token so downstream shapes stay non-empty.
struct PairedFileTokens {
    std::vector<std::string> before;
    std::vector<std::string> after;
};

struct PairedFeatures {
    std::vector<PairedFileTokens> files;
};

// Feature extraction sees only the file changes, never the commit message:
// messages drive mining and must not leak into the classifier input.
DiffFeatures featurize_diff(const std::vector<FileChange>& files,
                            const FeaturizeOptions& opts = {});
PairedFeatures featurize_paired(const std::vector<FileChange>& files,
                                const FeaturizeOptions& opts = {});

// Flat view for bag-of-words consumers: per-file sequences joined by <SEP>.
std::vector<std::string> flatten_with_separators(const DiffFeatures& features);

}  // namespace csent
