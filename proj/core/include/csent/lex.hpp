#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "csent/errors.hpp"

namespace csent {

enum class TokenKind {
    Keyword,
    Identifier,
    Operator,
    Separator,
    LiteralNumber, // text is always "<NUM>"
    LiteralString,
    LiteralChar,
    Reserved, // <PAD> <UNK> <NUM> <ADD> <DEL> <SEP> spelled out in the input
};

const char* token_kind_name(TokenKind kind);

struct Token {
    std::string text;
    TokenKind kind;

    bool operator==(const Token&) const = default;
};

struct LexWarning {
    std::size_t byte_offset;
    std::string message;
};

// Ordered tokens for one source text or one diff side. Comments and
// whitespace never appear; no token text is empty or 64+ bytes long.
struct TokenStream {
    std::vector<Token> tokens;
    std::string origin;
    std::vector<LexWarning> warnings;

    std::vector<std::string> texts() const;
};

struct LexOptions {
    // Strict mode throws LexError on unterminated string/char literals and
    // block comments. Recovery keeps the partial token and continues, which
    // is what diff hunks with clipped context lines need.
    bool recover = false;
};

// Tokens at or above this many bytes are dropped before emission.
inline constexpr std::size_t kMaxTokenLength = 64;

// Reserved token spellings. A literal occurrence of one of these in the
// source lexes to a single Reserved token, which keeps tokenize idempotent
// over detokenized output.
inline constexpr std::string_view kPadToken = "<PAD>";
inline constexpr std::string_view kUnkToken = "<UNK>";
inline constexpr std::string_view kNumToken = "<NUM>";
inline constexpr std::string_view kAddToken = "<ADD>";
inline constexpr std::string_view kDelToken = "<DEL>";
inline constexpr std::string_view kSepToken = "<SEP>";

// Lex a Java fragment: strips comments and whitespace, folds every numeric
// literal to <NUM>, keeps string/char literals verbatim (quotes included),
// drops tokens of 64+ bytes, and skips unknown bytes with a warning.
TokenStream tokenize(std::string_view source, std::string origin = "", LexOptions opts = {});

// Space-join of token texts; tokenize(detokenize(tokenize(s))) reproduces
// the token text sequence of tokenize(s) for comment-free input.
std::string detokenize(const TokenStream& stream);

bool is_java_keyword(std::string_view word);

} // namespace csent
