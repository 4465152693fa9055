#include "csent/vocab.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "csent/errors.hpp"

namespace csent {

void TokenCounts::add(const TokenStream& stream) {
    for (const Token& t : stream.tokens) ++counts[t.text];
}

void TokenCounts::merge(const TokenCounts& other) {
    for (const auto& [token, n] : other.counts) counts[token] += n;
}

const std::vector<std::string>& Vocabulary::specials() {
    static const std::vector<std::string> s = {
        std::string(kPadToken), std::string(kUnkToken), std::string(kNumToken),
        std::string(kAddToken), std::string(kDelToken), std::string(kSepToken),
    };
    return s;
}

Vocabulary::Vocabulary() {
    for (const std::string& t : specials()) {
        token_to_id_.emplace(t, static_cast<int>(id_to_token_.size()));
        id_to_token_.push_back(t);
        id_to_count_.push_back(0);
    }
}

int Vocabulary::id_of(std::string_view token) const {
    auto it = token_to_id_.find(std::string(token));
    return it == token_to_id_.end() ? -1 : it->second;
}

Vocabulary build_vocabulary(const TokenCounts& counts, std::uint64_t min_count,
                            std::uint64_t max_size) {
    if (min_count < 1) throw Error("build_vocabulary: min_count must be >= 1");
    if (max_size < static_cast<std::uint64_t>(Vocabulary::kNumSpecials))
        throw Error("build_vocabulary: max_size smaller than the special token set");

    Vocabulary vocab;
    vocab.min_count_ = min_count;
    vocab.max_size_ = max_size;

    // Specials keep their observed corpus counts but are exempt from the
    // threshold and the cap.
    for (int id = 0; id < Vocabulary::kNumSpecials; ++id) {
        auto it = counts.counts.find(vocab.id_to_token_[id]);
        if (it != counts.counts.end()) vocab.id_to_count_[id] = it->second;
    }

    struct Entry {
        std::string_view token;
        std::uint64_t count;
    };
    std::vector<Entry> candidates;
    candidates.reserve(counts.counts.size());
    for (const auto& [token, n] : counts.counts) {
        if (n < min_count) continue;
        if (std::find(Vocabulary::specials().begin(), Vocabulary::specials().end(), token) !=
            Vocabulary::specials().end())
            continue;
        candidates.push_back({token, n});
    }
    std::sort(candidates.begin(), candidates.end(), [](const Entry& a, const Entry& b) {
        if (a.count != b.count) return a.count > b.count;
        return a.token < b.token;
    });

    std::size_t room = static_cast<std::size_t>(max_size) - Vocabulary::kNumSpecials;
    if (candidates.size() > room) candidates.resize(room);

    for (const Entry& e : candidates) {
        vocab.token_to_id_.emplace(std::string(e.token), vocab.size());
        vocab.id_to_token_.emplace_back(e.token);
        vocab.id_to_count_.push_back(e.count);
    }
    return vocab;
}

Vocabulary build_vocabulary(std::span<const TokenStream> streams, std::uint64_t min_count,
                            std::uint64_t max_size) {
    TokenCounts counts;
    for (const TokenStream& s : streams) counts.add(s);
    return build_vocabulary(counts, min_count, max_size);
}

std::vector<int> encode(const TokenStream& stream, const Vocabulary& vocab) {
    std::vector<int> ids;
    ids.reserve(stream.tokens.size());
    for (const Token& t : stream.tokens) {
        int id = vocab.id_of(t.text);
        ids.push_back(id < 0 ? Vocabulary::kUnkId : id);
    }
    return ids;
}

std::vector<int> encode_texts(std::span<const std::string> texts, const Vocabulary& vocab) {
    std::vector<int> ids;
    ids.reserve(texts.size());
    for (const std::string& t : texts) {
        int id = vocab.id_of(t);
        ids.push_back(id < 0 ? Vocabulary::kUnkId : id);
    }
    return ids;
}

std::vector<std::string> decode(std::span<const int> ids, const Vocabulary& vocab) {
    std::vector<std::string> texts;
    texts.reserve(ids.size());
    for (int id : ids) {
        if (id < 0 || id >= vocab.size())
            throw Error("decode: id " + std::to_string(id) + " out of range");
        texts.push_back(vocab.token_of(id));
    }
    return texts;
}

std::string Vocabulary::serialize() const {
    std::ostringstream out;
    out << "CSENT-VOCAB 1 " << min_count_ << " " << max_size_ << "\n";
    for (int id = 0; id < size(); ++id)
        out << id_to_token_[id] << "\t" << id << "\t" << id_to_count_[id] << "\n";
    return out.str();
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string Vocabulary::fingerprint() const {
    std::uint64_t h = fnv1a64(serialize());
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void save_vocabulary(const Vocabulary& vocab, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open vocabulary file for writing: " + path);
    out << vocab.serialize();
    if (!out) throw Error("failed writing vocabulary file: " + path);
}

namespace {

std::uint64_t parse_u64(std::string_view s, const char* what) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw FormatError(std::string("vocabulary: bad ") + what + " field '" + std::string(s) + "'");
    return v;
}

} // namespace

Vocabulary parse_vocabulary(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string header;
    if (!std::getline(in, header)) throw FormatError("vocabulary: empty file");

    std::istringstream hs(header);
    std::string magic;
    std::string version, min_count, max_size;
    if (!(hs >> magic >> version >> min_count >> max_size) || magic != "CSENT-VOCAB")
        throw FormatError("vocabulary: bad header '" + header + "'");
    if (version != "1") throw FormatError("vocabulary: unsupported version " + version);

    Vocabulary vocab;
    vocab.min_count_ = parse_u64(min_count, "min_count");
    vocab.max_size_ = parse_u64(max_size, "max_size");

    std::string line;
    int expected_id = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        // Right-anchored split: token text may itself contain tabs (string
        // literals keep their contents verbatim).
        std::size_t t2 = line.rfind('\t');
        std::size_t t1 = t2 == std::string::npos || t2 == 0
                             ? std::string::npos
                             : line.rfind('\t', t2 - 1);
        if (t1 == std::string::npos || t2 == std::string::npos || t1 == 0)
            throw FormatError("vocabulary: bad entry line '" + line + "'");
        std::string token = line.substr(0, t1);
        int id = static_cast<int>(parse_u64(line.substr(t1 + 1, t2 - t1 - 1), "id"));
        std::uint64_t count = parse_u64(line.substr(t2 + 1), "count");
        if (id != expected_id)
            throw FormatError("vocabulary: non-dense id " + std::to_string(id));
        if (id < Vocabulary::kNumSpecials) {
            if (token != Vocabulary::specials()[id])
                throw FormatError("vocabulary: special slot " + std::to_string(id) +
                                  " holds '" + token + "'");
            vocab.id_to_count_[id] = count;
        } else {
            if (vocab.token_to_id_.contains(token))
                throw FormatError("vocabulary: duplicate token '" + token + "'");
            vocab.token_to_id_.emplace(token, id);
            vocab.id_to_token_.push_back(token);
            vocab.id_to_count_.push_back(count);
        }
        ++expected_id;
    }
    if (expected_id < Vocabulary::kNumSpecials)
        throw FormatError("vocabulary: missing special token rows");
    return vocab;
}

Vocabulary load_vocabulary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open vocabulary file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_vocabulary(ss.str());
}

} // namespace csent
