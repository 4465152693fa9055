#pragma once

#include <string>
#include <vector>

#include "csent/records.hpp"

namespace csent {

struct IngestOptions {
    // Applied to every ingested record; mining may relabel later.
    Label label = Label::NotSecurityRelevant;
    Provenance provenance = Provenance::GroundTruth;
    // Record-level repo identifier; defaults to the workdir's basename.
    std::string repo_name;
};

struct IngestFailure {
    std::string sha;
    std::string reason;
};

struct IngestResult {
    std::vector<CommitRecord> records;   // input sha order, skips removed
    std::vector<IngestFailure> failures; // unknown shas, plumbing errors
    std::size_t skipped_no_java = 0;     // commits with no .java changes
};

// Every commit reachable from HEAD, oldest first.
std::vector<std::string> list_commit_shas(const std::string& workdir);

// Builds one record per sha from a local clone: unified diff against the
// first parent plus full before/after blobs for each changed .java file.
// A missing or non-git workdir throws RepoAccessError; a bad sha becomes a
// per-sha failure and ingestion continues.  Fans out across shas.
IngestResult ingest_repository(const std::string& workdir,
                               const std::vector<std::string>& shas,
                               const IngestOptions& opts = {});

}  // namespace csent
