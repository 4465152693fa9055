#include "csent/report.hpp"

#include <json.hpp>

#include <array>
#include <cstdio>

#include "csent/errors.hpp"

namespace csent {

namespace {

std::string three_decimals(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

}  // namespace

Report render_report(const std::vector<ReportRow>& rows) {
    if (rows.empty()) throw EmptyInputError("report needs at least one row");

    const std::array<std::string, 8> headers = {
        "Input features", "Model", "Embedding", "Split",
        "Acc",            "P",     "R",         "F1"};
    std::vector<std::array<std::string, 8>> cells;
    cells.reserve(rows.size());
    for (const ReportRow& row : rows) {
        cells.push_back({row.input_features, row.model, row.embedding,
                         row.split, three_decimals(row.metrics.accuracy),
                         three_decimals(row.metrics.precision),
                         three_decimals(row.metrics.recall),
                         three_decimals(row.metrics.f1)});
    }

    std::array<std::size_t, 8> widths;
    for (std::size_t c = 0; c < 8; ++c) {
        widths[c] = headers[c].size();
        for (const auto& row : cells) {
            widths[c] = std::max(widths[c], row[c].size());
        }
    }

    auto emit_line = [&](const std::array<std::string, 8>& row,
                         std::string& out) {
        for (std::size_t c = 0; c < 8; ++c) {
            if (c > 0) out += "  ";
            out += row[c];
            out.append(widths[c] - row[c].size(), ' ');
        }
        while (!out.empty() && out.back() == ' ') out.pop_back();
        out += '\n';
    };

    Report report;
    emit_line(headers, report.text_table);
    {
        std::string rule;
        for (std::size_t c = 0; c < 8; ++c) {
            if (c > 0) rule += "  ";
            rule.append(widths[c], '-');
        }
        report.text_table += rule + "\n";
    }
    for (const auto& row : cells) emit_line(row, report.text_table);

    // The JSON rows carry the identical 3-decimal values; numbers are
    // emitted from the already-rendered strings so the two views cannot
    // drift apart.
    for (const auto& row : cells) {
        std::string line = "{";
        line += "\"input_features\":" + nlohmann::json(row[0]).dump();
        line += ",\"model\":" + nlohmann::json(row[1]).dump();
        line += ",\"embedding\":" + nlohmann::json(row[2]).dump();
        line += ",\"split\":" + nlohmann::json(row[3]).dump();
        line += ",\"accuracy\":" + row[4];
        line += ",\"precision\":" + row[5];
        line += ",\"recall\":" + row[6];
        line += ",\"f1\":" + row[7];
        line += "}\n";
        report.jsonl += line;
    }
    return report;
}

}  // namespace csent
