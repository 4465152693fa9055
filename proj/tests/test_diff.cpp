#include <doctest.h>

#include <string>
#include <vector>

#include "csent/diff.hpp"
#include "csent/errors.hpp"

using namespace csent;

namespace {

const char* kTwoFilePatch =
    "diff --git a/src/Main.java b/src/Main.java\n"
    "index 1111111..2222222 100644\n"
    "--- a/src/Main.java\n"
    "+++ b/src/Main.java\n"
    "@@ -1,3 +1,4 @@\n"
    " public class Main {\n"
    "-    int x = 1;\n"
    "+    int x = 2;\n"
    "+    int y = 3;\n"
    " }\n"
    "diff --git a/README.md b/README.md\n"
    "index 3333333..4444444 100644\n"
    "--- a/README.md\n"
    "+++ b/README.md\n"
    "@@ -1 +1 @@\n"
    "-old\n"
    "+new\n"
    "diff --git a/util/Helper.java b/util/Helper.java\n"
    "index 5555555..6666666 100644\n"
    "--- a/util/Helper.java\n"
    "+++ b/util/Helper.java\n"
    "@@ -10,2 +10,1 @@ class Helper {\n"
    "-    void gone() {}\n"
    "-    void also() {}\n"
    "+    void kept() {}\n";

}  // namespace

TEST_SUITE("diff") {

TEST_CASE("java files are kept, everything else is filtered") {
    auto files = parse_unified_diff(kTwoFilePatch);
    REQUIRE(files.size() == 2);
    CHECK(files[0].path == "src/Main.java");
    CHECK(files[0].added_lines ==
          std::vector<std::string>{"    int x = 2;", "    int y = 3;"});
    CHECK(files[0].removed_lines == std::vector<std::string>{"    int x = 1;"});
    CHECK(files[1].path == "util/Helper.java");
    CHECK(files[1].added_lines == std::vector<std::string>{"    void kept() {}"});
    CHECK(files[1].removed_lines ==
          std::vector<std::string>{"    void gone() {}", "    void also() {}"});
}

TEST_CASE("new and deleted files") {
    const char* patch =
        "diff --git a/New.java b/New.java\n"
        "new file mode 100644\n"
        "index 0000000..1234567\n"
        "--- /dev/null\n"
        "+++ b/New.java\n"
        "@@ -0,0 +1,2 @@\n"
        "+class New {\n"
        "+}\n"
        "diff --git a/Old.java b/Old.java\n"
        "deleted file mode 100644\n"
        "index 7654321..0000000\n"
        "--- a/Old.java\n"
        "+++ /dev/null\n"
        "@@ -1,2 +0,0 @@\n"
        "-class Old {\n"
        "-}\n";
    auto files = parse_unified_diff(patch);
    REQUIRE(files.size() == 2);
    CHECK(files[0].path == "New.java");
    CHECK(files[0].added_lines.size() == 2);
    CHECK(files[0].removed_lines.empty());
    CHECK(files[1].path == "Old.java");  // deleted file keeps its pre-image path
    CHECK(files[1].added_lines.empty());
    CHECK(files[1].removed_lines.size() == 2);
}

TEST_CASE("renames report the post-rename path") {
    const char* patch =
        "diff --git a/old/Name.java b/new/Renamed.java\n"
        "similarity index 95%\n"
        "rename from old/Name.java\n"
        "rename to new/Renamed.java\n"
        "--- a/old/Name.java\n"
        "+++ b/new/Renamed.java\n"
        "@@ -1 +1 @@\n"
        "-int a;\n"
        "+int b;\n";
    auto files = parse_unified_diff(patch);
    REQUIRE(files.size() == 1);
    CHECK(files[0].path == "new/Renamed.java");
}

TEST_CASE("malformed hunk header throws with a line number") {
    const char* patch =
        "--- a/Bad.java\n"
        "+++ b/Bad.java\n"
        "@@ not a hunk header @@\n"
        "+x\n";
    CHECK_THROWS_AS(parse_unified_diff(patch), DiffFormatError);
    try {
        parse_unified_diff(patch);
        FAIL("expected DiffFormatError");
    } catch (const DiffFormatError& e) {
        CHECK(e.line() == 3);
    }
}

TEST_CASE("empty and java-free patches give no files") {
    CHECK(parse_unified_diff("").empty());
    CHECK(parse_unified_diff("--- a/x.md\n+++ b/x.md\n@@ -1 +1 @@\n-a\n+b\n")
              .empty());
}

TEST_CASE("no-newline marker lines are not content") {
    const char* patch =
        "--- a/A.java\n"
        "+++ b/A.java\n"
        "@@ -1 +1 @@\n"
        "-int a;\n"
        "\\ No newline at end of file\n"
        "+int b;\n"
        "\\ No newline at end of file\n";
    auto files = parse_unified_diff(patch);
    REQUIRE(files.size() == 1);
    CHECK(files[0].added_lines == std::vector<std::string>{"int b;"});
    CHECK(files[0].removed_lines == std::vector<std::string>{"int a;"});
}

TEST_CASE("is_java_path") {
    CHECK(is_java_path("src/Main.java"));
    CHECK(is_java_path("A.java"));
    CHECK_FALSE(is_java_path("README.md"));
    CHECK_FALSE(is_java_path("java"));
    CHECK_FALSE(is_java_path("Main.java.orig"));
}

}  // TEST_SUITE
