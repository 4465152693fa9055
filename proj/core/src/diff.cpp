#include "csent/diff.hpp"

#include <charconv>
#include <string>

#include "csent/errors.hpp"
#include "csent/util.hpp"

namespace csent {

namespace {

bool starts_with(std::string_view s, std::string_view prefix) { return s.starts_with(prefix); }

// "a/src/Foo.java" -> "src/Foo.java"; /dev/null stays as-is.
std::string_view strip_diff_prefix(std::string_view path) {
    if (path == "/dev/null") return path;
    if (path.size() > 2 && (path[0] == 'a' || path[0] == 'b') && path[1] == '/')
        return path.substr(2);
    return path;
}

// Path on a "--- " / "+++ " line; git appends "\t<timestamp>" in some modes.
std::string_view header_path(std::string_view line, std::size_t prefix_len) {
    std::string_view path = line.substr(prefix_len);
    std::size_t tab = path.find('\t');
    if (tab != std::string_view::npos) path = path.substr(0, tab);
    return strip_diff_prefix(path);
}

struct HunkRange {
    long old_count = 1;
    long new_count = 1;
};

// "@@ -l[,c] +l[,c] @@ ..." -> line counts; start lines are not needed for
// token extraction but are validated.
HunkRange parse_hunk_header(std::string_view line, std::size_t line_no) {
    auto fail = [&] { return DiffFormatError("malformed hunk header '" + std::string(line) + "'", line_no); };

    std::string_view rest = line.substr(2); // skip "@@"
    auto parse_side = [&](char sign) -> long {
        while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
        if (rest.empty() || rest.front() != sign) throw fail();
        rest.remove_prefix(1);
        auto parse_num = [&]() -> long {
            long v = 0;
            auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), v);
            if (ec != std::errc() || ptr == rest.data()) throw fail();
            rest.remove_prefix(static_cast<std::size_t>(ptr - rest.data()));
            return v;
        };
        parse_num(); // start line
        long count = 1;
        if (!rest.empty() && rest.front() == ',') {
            rest.remove_prefix(1);
            count = parse_num();
        }
        return count;
    };

    HunkRange range;
    range.old_count = parse_side('-');
    range.new_count = parse_side('+');
    while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
    if (!starts_with(rest, "@@")) throw fail();
    return range;
}

} // namespace

bool is_java_path(std::string_view path) { return path.ends_with(".java"); }

std::vector<FileChange> parse_unified_diff(std::string_view text) {
    std::vector<FileChange> changes;
    std::vector<std::string> lines = split_lines(text);

    FileChange current;
    bool in_file = false;
    std::string old_path, new_path, rename_to;

    auto flush = [&] {
        if (!in_file) return;
        // Post-rename path wins; a deleted file only has its old path.
        if (!rename_to.empty()) current.path = rename_to;
        else if (!new_path.empty() && new_path != "/dev/null") current.path = new_path;
        else current.path = old_path;
        if (is_java_path(current.path) &&
            (!current.added_lines.empty() || !current.removed_lines.empty()))
            changes.push_back(std::move(current));
        current = {};
        old_path.clear();
        new_path.clear();
        rename_to.clear();
        in_file = false;
    };

    long pending_old = 0, pending_new = 0;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        std::size_t line_no = i + 1;
        bool in_hunk = pending_old > 0 || pending_new > 0;

        if (starts_with(line, "diff ")) {
            flush();
            in_file = true;
            pending_old = pending_new = 0;
        } else if (starts_with(line, "--- ") && !in_hunk) {
            if (!in_file) { in_file = true; } // plain `diff -u` output has no "diff" line
            old_path = std::string(header_path(line, 4));
        } else if (starts_with(line, "+++ ") && !in_hunk) {
            new_path = std::string(header_path(line, 4));
        } else if (starts_with(line, "rename to ")) {
            rename_to = line.substr(10);
        } else if (starts_with(line, "@@")) {
            if (!in_file)
                throw DiffFormatError("hunk header outside any file section", line_no);
            HunkRange range = parse_hunk_header(line, line_no);
            pending_old = range.old_count;
            pending_new = range.new_count;
        } else if (in_hunk) {
            if (starts_with(line, "+")) {
                current.added_lines.push_back(line.substr(1));
                --pending_new;
            } else if (starts_with(line, "-")) {
                current.removed_lines.push_back(line.substr(1));
                --pending_old;
            } else if (starts_with(line, "\\")) {
                // "\ No newline at end of file"
            } else {
                // context line (leading space, or empty for blank context)
                --pending_old;
                --pending_new;
            }
            if (pending_old < 0 || pending_new < 0)
                throw DiffFormatError("hunk body longer than its header declares", line_no);
        }
        // metadata lines (index, mode, similarity, Binary files ...) fall through
    }
    flush();
    return changes;
}

} // namespace csent
