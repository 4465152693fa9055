#include "csent/records.hpp"

#include <json.hpp>

#include "csent/errors.hpp"
#include "csent/util.hpp"

namespace csent {

using nlohmann::json;

const char* provenance_name(Provenance p) {
    return p == Provenance::Mined ? "mined" : "ground-truth";
}

Provenance provenance_from_name(const std::string& name) {
    if (name == "mined") return Provenance::Mined;
    if (name == "ground-truth") return Provenance::GroundTruth;
    throw FormatError("unknown provenance '" + name + "'");
}

std::string record_to_json_line(const CommitRecord& record) {
    json files = json::array();
    for (const FileChange& f : record.files) {
        files.push_back({
            {"path", f.path},
            {"added", f.added_lines},
            {"removed", f.removed_lines},
            {"before", base64_encode(f.before_source)},
            {"after", base64_encode(f.after_source)},
        });
    }
    json j = {
        {"v", 1},
        {"repo", record.repo},
        {"sha", record.sha},
        {"message", record.message},
        {"label", record.label == Label::SecurityRelevant ? 1 : 0},
        {"provenance", provenance_name(record.provenance)},
        {"files", files},
    };
    return j.dump();
}

std::string to_jsonl(const std::vector<CommitRecord>& records) {
    std::string out;
    for (const CommitRecord& r : records) {
        out += record_to_json_line(r);
        out += '\n';
    }
    return out;
}

namespace {

CommitRecord record_from_json(const json& j, std::size_t line_no) {
    auto fail = [&](const std::string& msg) -> FormatError {
        return FormatError("dataset line " + std::to_string(line_no) + ": " + msg);
    };
    try {
        if (!j.contains("v") || j.at("v").get<int>() != 1)
            throw fail("missing or unsupported version key");
        CommitRecord r;
        r.repo = j.at("repo").get<std::string>();
        r.sha = j.at("sha").get<std::string>();
        r.message = j.at("message").get<std::string>();
        r.label = j.at("label").get<int>() == 1 ? Label::SecurityRelevant
                                                : Label::NotSecurityRelevant;
        r.provenance = provenance_from_name(j.at("provenance").get<std::string>());
        for (const json& jf : j.at("files")) {
            FileChange f;
            f.path = jf.at("path").get<std::string>();
            f.added_lines = jf.at("added").get<std::vector<std::string>>();
            f.removed_lines = jf.at("removed").get<std::vector<std::string>>();
            f.before_source = base64_decode(jf.at("before").get<std::string>());
            f.after_source = base64_decode(jf.at("after").get<std::string>());
            r.files.push_back(std::move(f));
        }
        if (r.files.empty()) throw fail("record has no files");
        return r;
    } catch (const json::exception& e) {
        throw fail(e.what());
    }
}

} // namespace

std::vector<CommitRecord> from_jsonl(const std::string& text) {
    std::vector<CommitRecord> records;
    std::size_t line_no = 0;
    for (const std::string& line : split_lines(text)) {
        ++line_no;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw FormatError("dataset line " + std::to_string(line_no) + ": invalid JSON");
        records.push_back(record_from_json(j, line_no));
    }
    return records;
}

void save_records(const std::vector<CommitRecord>& records, const std::string& path) {
    write_file(path, to_jsonl(records));
}

std::vector<CommitRecord> load_records(const std::string& path) {
    return from_jsonl(read_file(path));
}

} // namespace csent
