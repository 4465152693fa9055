#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "csent/lex.hpp"

namespace csent {

// Token counts for one or more streams. Count maps may be filled on worker
// threads, one per file, and merged by a single writer.
struct TokenCounts {
    std::unordered_map<std::string, std::uint64_t> counts;

    void add(const TokenStream& stream);
    void merge(const TokenCounts& other);
};

// Dense token -> id map with reserved ids 0..5 for the special tokens.
// Non-special entries are the most frequent corpus tokens with count >=
// min_count, capped at max_size total entries; ids follow descending count
// with lexicographic tie-break, so the same corpus always yields the same
// vocabulary, byte for byte.
class Vocabulary {
public:
    static constexpr int kPadId = 0;
    static constexpr int kUnkId = 1;
    static constexpr int kNumId = 2;
    static constexpr int kAddId = 3;
    static constexpr int kDelId = 4;
    static constexpr int kSepId = 5;
    static constexpr int kNumSpecials = 6;

    static const std::vector<std::string>& specials();

    Vocabulary();

    int size() const { return static_cast<int>(id_to_token_.size()); }
    int non_special_count() const { return size() - kNumSpecials; }

    // -1 when the token is not present.
    int id_of(std::string_view token) const;
    const std::string& token_of(int id) const { return id_to_token_[id]; }
    std::uint64_t count_of(int id) const { return id_to_count_[id]; }
    static bool is_special(int id) { return id < kNumSpecials; }

    std::uint64_t min_count() const { return min_count_; }
    std::uint64_t max_size() const { return max_size_; }

    std::string serialize() const;
    // FNV-1a over the serialized bytes; binds embeddings and checkpoints to
    // the exact vocabulary they were trained with.
    std::string fingerprint() const;

    friend Vocabulary build_vocabulary(const TokenCounts&, std::uint64_t, std::uint64_t);
    friend Vocabulary parse_vocabulary(std::string_view text);

private:
    std::vector<std::string> id_to_token_;
    std::vector<std::uint64_t> id_to_count_;
    std::unordered_map<std::string, int> token_to_id_;
    std::uint64_t min_count_ = 3;
    std::uint64_t max_size_ = 100000;
};

Vocabulary build_vocabulary(const TokenCounts& counts, std::uint64_t min_count,
                            std::uint64_t max_size);
Vocabulary build_vocabulary(std::span<const TokenStream> streams, std::uint64_t min_count,
                            std::uint64_t max_size);

// In-vocabulary tokens map to their id, everything else to <UNK>.
std::vector<int> encode(const TokenStream& stream, const Vocabulary& vocab);
std::vector<int> encode_texts(std::span<const std::string> texts, const Vocabulary& vocab);
std::vector<std::string> decode(std::span<const int> ids, const Vocabulary& vocab);

void save_vocabulary(const Vocabulary& vocab, const std::string& path);
Vocabulary load_vocabulary(const std::string& path);
Vocabulary parse_vocabulary(std::string_view text);

std::uint64_t fnv1a64(std::string_view bytes);

} // namespace csent
