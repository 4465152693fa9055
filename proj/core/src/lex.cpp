#include "csent/lex.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace csent {

namespace {

// Java 8 keywords plus the reserved literals true/false/null.
constexpr std::array<std::string_view, 53> kKeywords = {
    "abstract", "assert",       "boolean",  "break",      "byte",   "case",   "catch",
    "char",     "class",        "const",    "continue",   "default", "do",    "double",
    "else",     "enum",         "extends",  "false",      "final",  "finally", "float",
    "for",      "goto",         "if",       "implements", "import", "instanceof",
    "int",      "interface",    "long",     "native",     "new",    "null",   "package",
    "private",  "protected",    "public",   "return",     "short",  "static", "strictfp",
    "super",    "switch",       "synchronized", "this",   "throw",  "throws", "transient",
    "true",     "try",          "void",     "volatile",   "while",
};

// Multi-character operators and separators, longest first so maximal munch
// falls out of a linear scan. "->" and "::" are single tokens (Java 8).
struct Punct {
    std::string_view text;
    TokenKind kind;
};

constexpr std::array<Punct, 40> kPuncts = {{
    {">>>=", TokenKind::Operator},
    {">>>", TokenKind::Operator},
    {"<<=", TokenKind::Operator},
    {">>=", TokenKind::Operator},
    {"...", TokenKind::Separator},
    {"->", TokenKind::Operator},
    {"::", TokenKind::Separator},
    {"==", TokenKind::Operator},
    {"!=", TokenKind::Operator},
    {"<=", TokenKind::Operator},
    {">=", TokenKind::Operator},
    {"&&", TokenKind::Operator},
    {"||", TokenKind::Operator},
    {"++", TokenKind::Operator},
    {"--", TokenKind::Operator},
    {"+=", TokenKind::Operator},
    {"-=", TokenKind::Operator},
    {"*=", TokenKind::Operator},
    {"/=", TokenKind::Operator},
    {"&=", TokenKind::Operator},
    {"|=", TokenKind::Operator},
    {"^=", TokenKind::Operator},
    {"%=", TokenKind::Operator},
    {"<<", TokenKind::Operator},
    {">>", TokenKind::Operator},
    {"+", TokenKind::Operator},
    {"-", TokenKind::Operator},
    {"*", TokenKind::Operator},
    {"/", TokenKind::Operator},
    {"%", TokenKind::Operator},
    {"&", TokenKind::Operator},
    {"|", TokenKind::Operator},
    {"^", TokenKind::Operator},
    {"!", TokenKind::Operator},
    {"~", TokenKind::Operator},
    {"=", TokenKind::Operator},
    {"<", TokenKind::Operator},
    {">", TokenKind::Operator},
    {"?", TokenKind::Operator},
    {":", TokenKind::Operator},
}};

constexpr std::array<std::string_view, 6> kReservedSpellings = {
    kPadToken, kUnkToken, kNumToken, kAddToken, kDelToken, kSepToken,
};

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f';
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_hex_digit(char c) { return is_digit(c) || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F'); }

// Bytes >= 0x80 are UTF-8 continuation of identifier characters; Java allows
// unicode identifiers and we never need to decode them.
bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == '$' ||
           static_cast<unsigned char>(c) >= 0x80;
}

bool is_ident_part(char c) { return is_ident_start(c) || is_digit(c); }

class Scanner {
public:
    Scanner(std::string_view src, std::string origin, LexOptions opts)
        : src_(src), opts_(opts) {
        out_.origin = std::move(origin);
    }

    TokenStream run() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (is_space(c)) {
                ++pos_;
            } else if (c == '/' && peek(1) == '/') {
                skip_line_comment();
            } else if (c == '/' && peek(1) == '*') {
                skip_block_comment();
            } else if (c == '"') {
                lex_quoted('"', TokenKind::LiteralString, "unterminated string literal");
            } else if (c == '\'') {
                lex_quoted('\'', TokenKind::LiteralChar, "unterminated char literal");
            } else if (is_digit(c) || (c == '.' && is_digit(peek(1)))) {
                lex_number();
            } else if (is_ident_start(c)) {
                lex_word();
            } else if (c == '<' && lex_reserved_marker()) {
                // emitted inside lex_reserved_marker
            } else if (lex_punct()) {
                // emitted inside lex_punct
            } else {
                out_.warnings.push_back({pos_, std::string("skipped unknown byte 0x") + hex_byte(c)});
                ++pos_;
            }
        }
        return std::move(out_);
    }

private:
    char peek(std::size_t ahead) const {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }

    static std::string hex_byte(char c) {
        static const char* digits = "0123456789abcdef";
        unsigned char u = static_cast<unsigned char>(c);
        return {digits[u >> 4], digits[u & 0xf]};
    }

    void emit(std::string text, TokenKind kind) {
        if (text.size() >= kMaxTokenLength) return; // rule 3
        out_.tokens.push_back({std::move(text), kind});
    }

    void skip_line_comment() {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
    }

    void skip_block_comment() {
        std::size_t start = pos_;
        pos_ += 2;
        while (pos_ < src_.size()) {
            if (src_[pos_] == '*' && peek(1) == '/') {
                pos_ += 2;
                return;
            }
            ++pos_;
        }
        if (!opts_.recover) throw LexError("unterminated block comment", start);
        out_.warnings.push_back({start, "unterminated block comment"});
    }

    // String or char literal, kept verbatim with its quotes. Java literals
    // cannot span lines, so a newline before the closing quote means the
    // input was clipped.
    void lex_quoted(char quote, TokenKind kind, const char* err) {
        std::size_t start = pos_;
        ++pos_;
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '\\' && pos_ + 1 < src_.size()) {
                pos_ += 2;
                continue;
            }
            if (c == quote) {
                ++pos_;
                emit(std::string(src_.substr(start, pos_ - start)), kind);
                return;
            }
            if (c == '\n' || c == '\r') break;
            ++pos_;
        }
        if (!opts_.recover) throw LexError(err, start);
        out_.warnings.push_back({start, err});
        emit(std::string(src_.substr(start, pos_ - start)), kind);
    }

    // Numeric literal in any Java form: decimal/hex/octal/binary integers,
    // decimal and hex floats, underscores, type suffixes. The lexeme itself
    // is discarded; every number becomes <NUM> (rule 2).
    void lex_number() {
        if (src_[pos_] == '0' && (peek(1) == 'x' || peek(1) == 'X')) {
            pos_ += 2;
            while (pos_ < src_.size() && (is_hex_digit(src_[pos_]) || src_[pos_] == '_')) ++pos_;
            if (pos_ < src_.size() && src_[pos_] == '.') {
                ++pos_;
                while (pos_ < src_.size() && (is_hex_digit(src_[pos_]) || src_[pos_] == '_')) ++pos_;
            }
            if (pos_ < src_.size() && (src_[pos_] == 'p' || src_[pos_] == 'P')) consume_exponent();
        } else if (src_[pos_] == '0' && (peek(1) == 'b' || peek(1) == 'B')) {
            pos_ += 2;
            while (pos_ < src_.size() && (src_[pos_] == '0' || src_[pos_] == '1' || src_[pos_] == '_')) ++pos_;
        } else {
            consume_digits();
            // A '.' directly after decimal digits always belongs to the
            // literal ("3.14", "1.", "1.e5", "1.f"): no legal member access
            // follows an integer literal, so there is no ambiguity.
            if (pos_ < src_.size() && src_[pos_] == '.') {
                ++pos_;
                consume_digits();
            }
            if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) consume_exponent();
        }
        if (pos_ < src_.size()) {
            char s = src_[pos_];
            if (s == 'l' || s == 'L' || s == 'f' || s == 'F' || s == 'd' || s == 'D') ++pos_;
        }
        emit(std::string(kNumToken), TokenKind::LiteralNumber);
    }

    void consume_digits() {
        while (pos_ < src_.size() && (is_digit(src_[pos_]) || src_[pos_] == '_')) ++pos_;
    }

    void consume_exponent() {
        ++pos_; // e/E/p/P
        if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
        consume_digits();
    }

    void lex_word() {
        std::size_t start = pos_;
        while (pos_ < src_.size() && is_ident_part(src_[pos_])) ++pos_;
        std::string_view word = src_.substr(start, pos_ - start);
        emit(std::string(word), is_java_keyword(word) ? TokenKind::Keyword : TokenKind::Identifier);
    }

    bool lex_reserved_marker() {
        for (std::string_view spelling : kReservedSpellings) {
            if (src_.substr(pos_).starts_with(spelling)) {
                emit(std::string(spelling), TokenKind::Reserved);
                pos_ += spelling.size();
                return true;
            }
        }
        return false;
    }

    bool lex_punct() {
        for (const Punct& p : kPuncts) {
            if (src_.substr(pos_).starts_with(p.text)) {
                emit(std::string(p.text), p.kind);
                pos_ += p.text.size();
                return true;
            }
        }
        switch (src_[pos_]) {
        case '(': case ')': case '{': case '}': case '[': case ']':
        case ';': case ',': case '.': case '@':
            emit(std::string(1, src_[pos_]), TokenKind::Separator);
            ++pos_;
            return true;
        default:
            return false;
        }
    }

    std::string_view src_;
    LexOptions opts_;
    std::size_t pos_ = 0;
    TokenStream out_;
};

} // namespace

const char* token_kind_name(TokenKind kind) {
    switch (kind) {
    case TokenKind::Keyword: return "keyword";
    case TokenKind::Identifier: return "identifier";
    case TokenKind::Operator: return "operator";
    case TokenKind::Separator: return "separator";
    case TokenKind::LiteralNumber: return "literal-number";
    case TokenKind::LiteralString: return "literal-string";
    case TokenKind::LiteralChar: return "literal-char";
    case TokenKind::Reserved: return "reserved";
    }
    return "unknown";
}

std::vector<std::string> TokenStream::texts() const {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const Token& t : tokens) out.push_back(t.text);
    return out;
}

bool is_java_keyword(std::string_view word) {
    return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

TokenStream tokenize(std::string_view source, std::string origin, LexOptions opts) {
    return Scanner(source, std::move(origin), opts).run();
}

std::string detokenize(const TokenStream& stream) {
    std::string out;
    for (const Token& t : stream.tokens) {
        if (!out.empty()) out += ' ';
        out += t.text;
    }
    return out;
}

} // namespace csent
