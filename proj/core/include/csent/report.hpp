#pragma once

#include <string>
#include <vector>

#include "csent/eval.hpp"

namespace csent {

struct ReportRow {
    std::string input_features;  // e.g. "diff", "paired-code"
    std::string model;           // e.g. "H-CNN", "LR"
    std::string embedding;       // "random" / "pre-trained" / "-"
    std::string split;           // "validation" / "test"
    Metrics metrics;
};

struct Report {
    std::string text_table;  // aligned, human-readable
    std::string jsonl;       // one JSON object per row, same values
};

// Renders both views with all metrics at exactly 3 decimal places; the
// two outputs agree field for field.
Report render_report(const std::vector<ReportRow>& rows);

}  // namespace csent
