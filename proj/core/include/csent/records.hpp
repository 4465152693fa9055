#pragma once

#include <string>
#include <vector>

namespace csent {

// One changed .java file inside a commit. added/removed hold hunk lines in
// order (no +/- prefix); before/after hold the full class source when the
// ingester captured blobs.
struct FileChange {
    std::string path;
    std::vector<std::string> added_lines;
    std::vector<std::string> removed_lines;
    std::string before_source;
    std::string after_source;

    bool operator==(const FileChange&) const = default;
};

enum class Label { NotSecurityRelevant = 0, SecurityRelevant = 1 };
enum class Provenance { GroundTruth, Mined };

const char* provenance_name(Provenance p);
Provenance provenance_from_name(const std::string& name);

// One labeled commit. The message is carried for mining and bookkeeping but
// is never visible to feature extraction, which only accepts `files`.
struct CommitRecord {
    std::string repo;
    std::string sha;
    std::string message;
    std::vector<FileChange> files;
    Label label = Label::NotSecurityRelevant;
    Provenance provenance = Provenance::GroundTruth;

    bool operator==(const CommitRecord&) const = default;
};

// JSONL wire format, version key "v":1 on every line, blobs base64-coded.
// Serialization is canonical: parsing and re-serializing a file reproduces
// it byte for byte.
std::string to_jsonl(const std::vector<CommitRecord>& records);
std::string record_to_json_line(const CommitRecord& record);
std::vector<CommitRecord> from_jsonl(const std::string& text);

void save_records(const std::vector<CommitRecord>& records, const std::string& path);
std::vector<CommitRecord> load_records(const std::string& path);

} // namespace csent
