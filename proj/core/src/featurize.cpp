#include "csent/featurize.hpp"

#include <algorithm>

#include "csent/lex.hpp"

namespace csent {

namespace {

// Changed lines arrive as raw source fragments; lex them leniently so a
// truncated hunk or unterminated literal degrades to a warning, not a
// hard failure for the whole commit.  The cap bounds the side's content
// tokens (markers are structural and not counted); truncation keeps the
// head of the sequence.
std::vector<std::string> lex_lines(const std::vector<std::string>& lines,
                                   std::size_t cap) {
    LexOptions opts;
    opts.recover = true;
    std::vector<std::string> out;
    for (const std::string& line : lines) {
        if (out.size() >= cap) break;
        TokenStream stream = tokenize(line, "", opts);
        for (Token& tok : stream.tokens) {
            if (out.size() >= cap) break;
            out.push_back(std::move(tok.text));
        }
    }
    return out;
}

std::vector<std::string> lex_side(const std::string& source, std::size_t cap) {
    LexOptions opts;
    opts.recover = true;
    TokenStream stream = tokenize(source, "", opts);
    std::vector<std::string> out;
    out.reserve(std::min(cap, stream.tokens.size()));
    for (Token& tok : stream.tokens) {
        if (out.size() >= cap) break;
        out.push_back(std::move(tok.text));
    }
    return out;
}

}  // namespace

DiffFeatures featurize_diff(const std::vector<FileChange>& files,
                            const FeaturizeOptions& opts) {
    DiffFeatures out;
    for (const FileChange& file : files) {
        if (out.files.size() >= opts.max_files) break;
        FileTokens ft;
        // Markers are always present, even for a one-sided change, so the
        // model can tell "nothing added" from "nothing removed".
        std::vector<std::string> added =
            lex_lines(file.added_lines, opts.max_tokens_per_side);
        std::vector<std::string> removed =
            lex_lines(file.removed_lines, opts.max_tokens_per_side);
        ft.tokens.reserve(added.size() + removed.size() + 2);
        ft.tokens.push_back(std::string(kAddToken));
        ft.tokens.insert(ft.tokens.end(),
                         std::make_move_iterator(added.begin()),
                         std::make_move_iterator(added.end()));
        ft.tokens.push_back(std::string(kDelToken));
        ft.tokens.insert(ft.tokens.end(),
                         std::make_move_iterator(removed.begin()),
                         std::make_move_iterator(removed.end()));
        out.files.push_back(std::move(ft));
    }
    return out;
}

PairedFeatures featurize_paired(const std::vector<FileChange>& files,
                                const FeaturizeOptions& opts) {
    PairedFeatures out;
    for (const FileChange& file : files) {
        if (out.files.size() >= opts.max_files) break;
        PairedFileTokens pft;
        pft.before = lex_side(file.before_source, opts.max_tokens_per_side);
        pft.after = lex_side(file.after_source, opts.max_tokens_per_side);
        // Added and deleted files have one genuinely empty side; a lone
        // <PAD> keeps the sequence non-empty without adding signal.
        if (pft.before.empty()) pft.before.push_back(std::string(kPadToken));
        if (pft.after.empty()) pft.after.push_back(std::string(kPadToken));
        out.files.push_back(std::move(pft));
    }
    return out;
}

std::vector<std::string> flatten_with_separators(const DiffFeatures& features) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < features.files.size(); ++i) {
        if (i > 0) out.push_back(std::string(kSepToken));
        const FileTokens& ft = features.files[i];
        out.insert(out.end(), ft.tokens.begin(), ft.tokens.end());
    }
    return out;
}

}  // namespace csent
