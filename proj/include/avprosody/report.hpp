#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "avprosody/comparison.hpp"
#include "avprosody/pipeline.hpp"
#include "avprosody/synthesis.hpp"

namespace avprosody {

enum class Metric { head_rotation, eyebrow_raise };

std::string_view to_string(Metric metric);

/// One table row: a real session against its animated renditions.
struct SessionComparison {
    std::string label;
    std::vector<CorrelationCell> head_rotation;
    std::vector<CorrelationCell> eyebrow_raise;
    std::optional<StrengthGain> head_gain;
    std::optional<StrengthGain> eyebrow_gain;
    std::vector<std::string> notes;
};

struct ComparisonTable {
    std::vector<SessionComparison> rows;
    nlohmann::json provenance = nlohmann::json::array();
};

SessionComparison compare_sessions(const AnalysisResult& real,
                                   const std::vector<std::pair<double, AnalysisResult>>& vh);

/// Report JSON: {"pairs": [{metric, session, strength, r, p, n, labels}], "gains": [...],
/// "notes": [...], "provenance": [...]}.
nlohmann::json to_json(const ComparisonTable& table);
ComparisonTable comparison_table_from_json(const nlohmann::json& j);

/// Plain-text rendering: rows = sessions, columns = strengths (descending),
/// a head-rotation block beside an eyebrow-raise block.
std::string render_table(const ComparisonTable& table);

/// Concatenates rows (and provenance) of several tables in order.
ComparisonTable merge_tables(const std::vector<ComparisonTable>& tables);

}  // namespace avprosody
