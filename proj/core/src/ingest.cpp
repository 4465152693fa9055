#include "csent/ingest.hpp"

#include <algorithm>
#include <filesystem>
#include <optional>

#include "csent/diff.hpp"
#include "csent/errors.hpp"
#include "csent/process.hpp"
#include "csent/util.hpp"

namespace csent {

namespace {

// The hash of the empty tree is a git constant; diffing a root commit
// against it yields its full content as additions.
constexpr const char* kEmptyTree = "4b825dc642cb6eb9a060e54bf8d69288fbee4904";

std::string trim_newline(std::string s) {
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
    return s;
}

std::string first_stderr_line(const ProcessResult& r) {
    std::string line = r.err.substr(0, r.err.find('\n'));
    if (line.empty()) line = "exit code " + std::to_string(r.exit_code);
    return line;
}

ProcessResult git(const std::string& workdir,
                  std::vector<std::string> args) {
    std::vector<std::string> argv{"git"};
    argv.insert(argv.end(), std::make_move_iterator(args.begin()),
                std::make_move_iterator(args.end()));
    return run_process(argv, workdir);
}

// `git show <rev>:<path>` fails for a side where the file does not exist
// (added or deleted files); that is data, not an error.
std::string blob_or_empty(const std::string& workdir, const std::string& rev,
                          const std::string& path) {
    ProcessResult r = git(workdir, {"show", rev + ":" + path});
    return r.ok() ? r.out : std::string();
}

std::optional<CommitRecord> build_record(const std::string& workdir,
                                         const std::string& sha,
                                         const IngestOptions& opts,
                                         std::string& failure_reason) {
    ProcessResult verify =
        git(workdir, {"rev-parse", "--verify", "--quiet", sha + "^{commit}"});
    if (!verify.ok()) {
        failure_reason = "unknown commit";
        return std::nullopt;
    }
    const std::string full_sha = trim_newline(verify.out);

    // First parent; a root commit diffs against the empty tree.
    ProcessResult parent_res = git(
        workdir, {"rev-parse", "--verify", "--quiet", full_sha + "^"});
    const std::string parent =
        parent_res.ok() ? trim_newline(parent_res.out) : kEmptyTree;

    // Plumbing keeps the output stable (no rename detection, no config
    // interference); an explicit two-tree compare makes merge commits
    // diff against the first parent like everything else.
    ProcessResult diff_res =
        git(workdir, {"diff-tree", "-p", "-U3", "--no-color", parent,
                      full_sha});
    if (!diff_res.ok()) {
        failure_reason = "diff-tree failed: " + first_stderr_line(diff_res);
        return std::nullopt;
    }

    std::vector<FileChange> files;
    try {
        files = parse_unified_diff(diff_res.out);
    } catch (const DiffFormatError& e) {
        failure_reason = std::string("diff parse failed: ") + e.what();
        return std::nullopt;
    }
    if (files.empty()) return std::nullopt;  // no .java changes: skip

    ProcessResult msg_res =
        git(workdir, {"log", "-1", "--format=%B", full_sha});
    if (!msg_res.ok()) {
        failure_reason = "log failed: " + first_stderr_line(msg_res);
        return std::nullopt;
    }

    CommitRecord rec;
    rec.repo = opts.repo_name;
    rec.sha = full_sha;
    rec.message = sanitize_utf8(msg_res.out);
    rec.label = opts.label;
    rec.provenance = opts.provenance;
    for (FileChange& fc : files) {
        fc.before_source = blob_or_empty(workdir, parent, fc.path);
        fc.after_source = blob_or_empty(workdir, full_sha, fc.path);
    }
    rec.files = std::move(files);
    return rec;
}

void require_git_repo(const std::string& workdir) {
    if (!std::filesystem::is_directory(workdir)) {
        throw RepoAccessError("no such directory: " + workdir);
    }
    ProcessResult r = git(workdir, {"rev-parse", "--git-dir"});
    if (!r.ok()) {
        throw RepoAccessError("not a git repository: " + workdir);
    }
}

}  // namespace

std::vector<std::string> list_commit_shas(const std::string& workdir) {
    require_git_repo(workdir);
    ProcessResult r = git(workdir, {"rev-list", "--reverse", "HEAD"});
    if (!r.ok()) {
        throw RepoAccessError("rev-list failed: " + first_stderr_line(r));
    }
    std::vector<std::string> shas;
    for (std::string& line : split_lines(r.out)) {
        if (!line.empty()) shas.push_back(std::move(line));
    }
    return shas;
}

IngestResult ingest_repository(const std::string& workdir,
                               const std::vector<std::string>& shas,
                               const IngestOptions& opts) {
    require_git_repo(workdir);

    IngestOptions effective = opts;
    if (effective.repo_name.empty()) {
        std::filesystem::path p =
            std::filesystem::absolute(workdir).lexically_normal();
        if (!p.has_filename()) p = p.parent_path();
        effective.repo_name = p.filename().string();
    }

    // Records are built independently; slots keep the output in input
    // order regardless of which worker finishes first.
    std::vector<std::optional<CommitRecord>> slots(shas.size());
    std::vector<std::string> reasons(shas.size());
    parallel_for(shas.size(), [&](std::size_t i) {
        slots[i] = build_record(workdir, shas[i], effective, reasons[i]);
    });

    IngestResult result;
    for (std::size_t i = 0; i < shas.size(); ++i) {
        if (slots[i].has_value()) {
            result.records.push_back(std::move(*slots[i]));
        } else if (!reasons[i].empty()) {
            result.failures.push_back({shas[i], reasons[i]});
        } else {
            ++result.skipped_no_java;
        }
    }
    return result;
}

}  // namespace csent
