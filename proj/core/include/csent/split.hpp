#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "csent/records.hpp"

namespace csent {

// Repo-disjoint dataset partition: no repository contributes commits to more
// than one of train/validation/test, and mined records only ever land in
// train.
struct SplitSet {
    std::vector<CommitRecord> train;
    std::vector<CommitRecord> validation;
    std::vector<CommitRecord> test;
    std::uint64_t seed = 0;

    std::unordered_set<std::string> repos(const std::vector<CommitRecord>& part) const;
};

struct SplitRatios {
    double train = 0.6;
    double validation = 0.2;
    double test = 0.2;
};

// Shuffles repositories (not commits) with the seed, then assigns each repo
// to the split with the largest remaining deficit relative to its target
// commit count. Ground-truth records follow their repo; mined records are
// kept only when their repo landed in train (or appears nowhere in the
// ground truth), per the evaluation-project discard rule.
SplitSet split_by_repository(const std::vector<CommitRecord>& records, SplitRatios ratios,
                             std::uint64_t seed);

// Commit-message regex mining. Matching records come back relabeled
// security-relevant with mined provenance. Matching is case-insensitive;
// repos listed in exclude_repos are skipped.
std::vector<CommitRecord> mine_security_commits(
    const std::vector<CommitRecord>& records, const std::vector<std::string>& patterns,
    const std::unordered_set<std::string>& exclude_repos = {});

// High-precision keyword set used when no pattern file is given.
const std::vector<std::string>& default_mining_patterns();

// Uniformly sample negatives-per-positive unlabeled commits from the same
// repos as `positives`, labeling them not-security-relevant.
std::vector<CommitRecord> sample_negatives(const std::vector<CommitRecord>& unlabeled,
                                           const std::vector<CommitRecord>& positives,
                                           double ratio, std::uint64_t seed);

} // namespace csent
