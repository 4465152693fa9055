#include "csent/split.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <regex>
#include <unordered_map>

#include "csent/errors.hpp"
#include "csent/rng.hpp"

namespace csent {

std::unordered_set<std::string> SplitSet::repos(const std::vector<CommitRecord>& part) const {
    std::unordered_set<std::string> out;
    for (const CommitRecord& r : part) out.insert(r.repo);
    return out;
}

SplitSet split_by_repository(const std::vector<CommitRecord>& records, SplitRatios ratios,
                             std::uint64_t seed) {
    if (ratios.train <= 0 || ratios.validation <= 0 || ratios.test <= 0)
        throw SplitError("split ratios must all be positive");
    double sum = ratios.train + ratios.validation + ratios.test;
    if (std::abs(sum - 1.0) > 1e-9)
        throw SplitError("split ratios must sum to 1");

    // std::map keeps repo iteration deterministic before the seeded shuffle.
    std::map<std::string, std::size_t> ground_truth_sizes;
    std::size_t total = 0;
    for (const CommitRecord& r : records) {
        if (r.provenance == Provenance::GroundTruth) {
            ++ground_truth_sizes[r.repo];
            ++total;
        }
    }
    if (ground_truth_sizes.empty())
        throw SplitError("no ground-truth records to split");

    std::vector<std::string> repos;
    repos.reserve(ground_truth_sizes.size());
    for (const auto& [repo, n] : ground_truth_sizes) repos.push_back(repo);
    Rng rng(seed);
    rng.shuffle(repos);

    const std::array<double, 3> targets = {ratios.train * total, ratios.validation * total,
                                           ratios.test * total};
    std::array<double, 3> assigned = {0, 0, 0};
    std::unordered_map<std::string, int> repo_slot;
    for (const std::string& repo : repos) {
        // Deficit relative to target; an untouched split always has deficit 1
        // and wins over any split that already holds commits.
        int best = 0;
        double best_deficit = -1e300;
        for (int s = 0; s < 3; ++s) {
            double deficit = (targets[s] - assigned[s]) / targets[s];
            if (deficit > best_deficit + 1e-12) {
                best = s;
                best_deficit = deficit;
            }
        }
        repo_slot[repo] = best;
        assigned[best] += static_cast<double>(ground_truth_sizes[repo]);
    }

    SplitSet out;
    out.seed = seed;
    for (const CommitRecord& r : records) {
        auto it = repo_slot.find(r.repo);
        if (r.provenance == Provenance::Mined) {
            // Mined commits from evaluation repos are discarded outright.
            if (it == repo_slot.end() || it->second == 0) out.train.push_back(r);
            continue;
        }
        switch (it->second) {
        case 0: out.train.push_back(r); break;
        case 1: out.validation.push_back(r); break;
        default: out.test.push_back(r); break;
        }
    }
    if (out.train.empty() || out.validation.empty() || out.test.empty())
        throw SplitError("a split would be empty; need ground-truth commits from >= 3 repositories");
    return out;
}

const std::vector<std::string>& default_mining_patterns() {
    static const std::vector<std::string> patterns = {
        "vulnerab",
        "security",
        R"(\bCVE-\d{4}-\d+\b)",
        R"(\bXSS\b)",
        R"(\bCSRF\b)",
        "denial of service",
        "remote code execution",
        R"(\bRCE\b)",
        "buffer overflow",
        "injection",
        "directory traversal",
    };
    return patterns;
}

std::vector<CommitRecord> mine_security_commits(
    const std::vector<CommitRecord>& records, const std::vector<std::string>& patterns,
    const std::unordered_set<std::string>& exclude_repos) {
    std::vector<std::regex> compiled;
    compiled.reserve(patterns.size());
    for (const std::string& p : patterns) {
        try {
            compiled.emplace_back(p, std::regex::ECMAScript | std::regex::icase);
        } catch (const std::regex_error& e) {
            throw PatternError("invalid mining pattern '" + p + "': " + e.what());
        }
    }

    std::vector<CommitRecord> mined;
    for (const CommitRecord& r : records) {
        if (exclude_repos.contains(r.repo)) continue;
        bool hit = std::any_of(compiled.begin(), compiled.end(), [&](const std::regex& re) {
            return std::regex_search(r.message, re);
        });
        if (!hit) continue;
        CommitRecord m = r;
        m.label = Label::SecurityRelevant;
        m.provenance = Provenance::Mined;
        mined.push_back(std::move(m));
    }
    return mined;
}

std::vector<CommitRecord> sample_negatives(const std::vector<CommitRecord>& unlabeled,
                                           const std::vector<CommitRecord>& positives,
                                           double ratio, std::uint64_t seed) {
    std::unordered_set<std::string> repos;
    std::unordered_set<std::string> positive_shas;
    for (const CommitRecord& r : positives) {
        repos.insert(r.repo);
        positive_shas.insert(r.sha);
    }
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < unlabeled.size(); ++i) {
        if (repos.contains(unlabeled[i].repo) && !positive_shas.contains(unlabeled[i].sha))
            pool.push_back(i);
    }
    Rng rng(seed);
    rng.shuffle(pool);
    std::size_t want = static_cast<std::size_t>(ratio * static_cast<double>(positives.size()));
    if (pool.size() > want) pool.resize(want);
    std::sort(pool.begin(), pool.end()); // keep input order in the output

    std::vector<CommitRecord> out;
    out.reserve(pool.size());
    for (std::size_t i : pool) {
        CommitRecord r = unlabeled[i];
        r.label = Label::NotSecurityRelevant;
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace csent
