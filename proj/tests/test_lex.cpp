#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <string>
#include <vector>

#include "csent/lex.hpp"
#include "csent/util.hpp"

using namespace csent;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> texts_of(const std::string& src, bool recover = false) {
    LexOptions opts;
    opts.recover = recover;
    return tokenize(src, "", opts).texts();
}

}  // namespace

TEST_SUITE("lex") {

TEST_CASE("comments and whitespace never produce tokens") {
    CHECK(texts_of("  \t\r\n\f ").empty());
    CHECK(texts_of("// only a comment\n").empty());
    CHECK(texts_of("/* block */").empty());
    CHECK(texts_of("/** javadoc */").empty());
}

TEST_CASE("every numeric literal folds to <NUM>") {
    for (const char* lit :
         {"0", "42", "42L", "0xFF", "0x1p3", "0b1011", "0755", "1_000",
          "3.14", "1e9", "2.5e-3f", ".5", "1.f", "1.", "6.02E23d",
          "0x1.8p-2", "9_000__000L"}) {
        auto toks = texts_of(lit);
        CAPTURE(lit);
        REQUIRE(toks.size() == 1);
        CHECK(toks[0] == "<NUM>");
    }
}

TEST_CASE("string and char literals stay verbatim with their quotes") {
    CHECK(texts_of(R"("hi")") == std::vector<std::string>{R"("hi")"});
    CHECK(texts_of(R"("a\"b")") == std::vector<std::string>{R"("a\"b")"});
    CHECK(texts_of(R"('\'')") == std::vector<std::string>{R"('\'')"});
    CHECK(texts_of(R"("tab\t")") == std::vector<std::string>{R"("tab\t")"});
}

TEST_CASE("token length rule: 63 bytes kept, 64 dropped") {
    std::string id63(63, 'a');
    std::string id64(64, 'a');
    CHECK(texts_of(id63) == std::vector<std::string>{id63});
    CHECK(texts_of(id64).empty());

    std::string s_keep = "\"" + std::string(61, 'k') + "\"";  // 63 bytes
    std::string s_drop = "\"" + std::string(62, 'd') + "\"";  // 64 bytes
    CHECK(texts_of(s_keep) == std::vector<std::string>{s_keep});
    CHECK(texts_of(s_drop).empty());
}

TEST_CASE("token kinds") {
    TokenStream ts = tokenize("final int n = f(1, \"x\", 'c') -> <NUM>;");
    REQUIRE(ts.tokens.size() == 15);
    CHECK(ts.tokens[0].kind == TokenKind::Keyword);        // final
    CHECK(ts.tokens[1].kind == TokenKind::Keyword);        // int
    CHECK(ts.tokens[2].kind == TokenKind::Identifier);     // n
    CHECK(ts.tokens[3].kind == TokenKind::Operator);       // =
    CHECK(ts.tokens[4].kind == TokenKind::Identifier);     // f
    CHECK(ts.tokens[5].kind == TokenKind::Separator);      // (
    CHECK(ts.tokens[6].kind == TokenKind::LiteralNumber);  // <NUM>
    CHECK(ts.tokens[8].kind == TokenKind::LiteralString);  // "x"
    CHECK(ts.tokens[10].kind == TokenKind::LiteralChar);   // 'c'
    CHECK(ts.tokens[12].kind == TokenKind::Operator);      // ->
    CHECK(ts.tokens[13].kind == TokenKind::Reserved);      // <NUM> spelled out
}

TEST_CASE("strict mode throws on clipped literals, recovery keeps going") {
    CHECK_THROWS_AS(tokenize("\"open"), LexError);
    CHECK_THROWS_AS(tokenize("'x"), LexError);
    CHECK_THROWS_AS(tokenize("/* open"), LexError);

    LexOptions recover;
    recover.recover = true;
    TokenStream ts = tokenize("\"open\nint x;", "", recover);
    CHECK(ts.texts() == std::vector<std::string>{"\"open", "int", "x", ";"});
    CHECK(ts.warnings.size() == 1);
}

TEST_CASE("unknown bytes are skipped with a warning") {
    TokenStream ts = tokenize("a # b");
    CHECK(ts.texts() == std::vector<std::string>{"a", "b"});
    REQUIRE(ts.warnings.size() == 1);
    CHECK(ts.warnings[0].byte_offset == 2);
}

TEST_CASE("tokenize is idempotent over detokenized output") {
    const char* sources[] = {
        "int x = 42; // note\nString s = \"a b\";",
        "Map<String, List<Integer>> m = new HashMap<>();",
        "for (int i = 0; i < n; i++) { sum += arr[i].length; }",
        "<ADD> foo ( ) <DEL> bar ( 3.5 )",
    };
    for (const char* src : sources) {
        CAPTURE(src);
        TokenStream first = tokenize(src);
        TokenStream second = tokenize(detokenize(first));
        CHECK(first.texts() == second.texts());
    }
}

TEST_CASE("keyword table") {
    CHECK(is_java_keyword("instanceof"));
    CHECK(is_java_keyword("strictfp"));
    CHECK(is_java_keyword("true"));
    CHECK(is_java_keyword("null"));
    CHECK_FALSE(is_java_keyword("String"));
    CHECK_FALSE(is_java_keyword("truely"));
    CHECK_FALSE(is_java_keyword("var"));  // Java 8 has no `var`
}

TEST_CASE("golden corpus is byte-identical") {
    const fs::path dir = fs::path(CSENT_TEST_DATA) / "lexer";
    REQUIRE(fs::is_directory(dir));
    std::vector<fs::path> inputs;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() == ".java") inputs.push_back(entry.path());
    }
    std::sort(inputs.begin(), inputs.end());
    REQUIRE(inputs.size() >= 30);

    LexOptions opts;
    opts.recover = true;
    for (const fs::path& input : inputs) {
        CAPTURE(input.filename().string());
        const std::string src = read_file(input.string());
        TokenStream ts = tokenize(src, input.filename().string(), opts);
        std::string actual;
        for (const Token& tok : ts.tokens) {
            actual += tok.text;
            actual += '\n';
        }
        fs::path expected_path = input;
        expected_path.replace_extension(".tokens");
        const std::string expected = read_file(expected_path.string());
        CHECK(actual == expected);
    }
}

}  // TEST_SUITE
