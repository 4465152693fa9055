#pragma once

#include <string_view>
#include <vector>

#include "csent/records.hpp"

namespace csent {

// Parse `git diff` / `diff -u` output into per-file changes. Only `.java`
// files are kept; renames report the post-rename path; a deleted file keeps
// its pre-image path. Throws DiffFormatError (with the input line number) on
// malformed hunk headers.
std::vector<FileChange> parse_unified_diff(std::string_view text);

bool is_java_path(std::string_view path);

} // namespace csent
