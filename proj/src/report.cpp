#include "avprosody/report.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>

namespace avprosody {

using nlohmann::json;

namespace {

std::string strength_label(double s) {
    return std::abs(s - std::round(s)) < 1e-9 ? fmt::format("{}", static_cast<long long>(std::llround(s)))
                                               : fmt::format("{:g}", s);
}

std::string trim_right(std::string s) {
    while (!s.empty() && s.back() == ' ') s.pop_back();
    return s;
}

std::optional<StrengthGain> try_gain(const std::map<double, MotionTrack>& tracks, Metric metric,
                                     std::vector<std::string>& notes) {
    if (tracks.size() < 2) {
        notes.push_back(fmt::format("{}: strength gain needs at least 2 strengths", to_string(metric)));
        return std::nullopt;
    }
    try {
        return estimate_strength_gain(tracks);
    } catch (const std::exception& e) {
        notes.push_back(fmt::format("{}: strength gain failed: {}", to_string(metric), e.what()));
        return std::nullopt;
    }
}

json cell_json(const CorrelationCell& cell, Metric metric, const std::string& session) {
    json j = {{"metric", std::string(to_string(metric))}, {"session", session}, {"strength", cell.strength},
              {"resampled", cell.resampled}};
    if (cell.report) {
        j["r"] = cell.report->r;
        j["p"] = cell.report->p_value;
        j["n"] = cell.report->n;
        j["labels"] = {cell.report->label_a, cell.report->label_b};
    } else {
        j["r"] = nullptr;
        j["p"] = nullptr;
        j["n"] = 0;
        j["labels"] = json::array();
        j["error"] = cell.error;
    }
    return j;
}

json gain_json(const StrengthGain& g, Metric metric, const std::string& session) {
    return {{"metric", std::string(to_string(metric))}, {"session", session}, {"per_50_delta", g.per_50_delta},
            {"intercept", g.intercept}, {"fit_r2", g.fit_r2}};
}

Metric metric_from_string(const std::string& s) {
    if (s == to_string(Metric::head_rotation)) return Metric::head_rotation;
    if (s == to_string(Metric::eyebrow_raise)) return Metric::eyebrow_raise;
    throw InputError("unknown metric '" + s + "' in report");
}

SessionComparison& row_for(ComparisonTable& table, const std::string& label) {
    for (auto& row : table.rows) {
        if (row.label == label) return row;
    }
    table.rows.push_back(SessionComparison{label, {}, {}, {}, {}, {}});
    return table.rows.back();
}

}  // namespace

std::string_view to_string(Metric metric) {
    return metric == Metric::head_rotation ? "head_rotation" : "eyebrow_raise";
}

SessionComparison compare_sessions(const AnalysisResult& real,
                                   const std::vector<std::pair<double, AnalysisResult>>& vh) {
    SessionComparison out;
    out.label = real.label;

    std::map<double, MotionTrack> pitch;
    std::map<double, MotionTrack> brow;
    for (const auto& [strength, result] : vh) {
        validate(ExpressionStrength{strength});
        if (pitch.contains(strength)) {
            throw InputError(fmt::format("duplicate strength {}% in comparison set", strength_label(strength)));
        }
        pitch.emplace(strength, result.pitch);
        brow.emplace(strength, result.eyebrow);
    }

    out.head_rotation = correlation_matrix(real.pitch, pitch);
    out.eyebrow_raise = correlation_matrix(real.eyebrow, brow);
    for (const auto& cell : out.head_rotation) {
        if (cell.resampled) {
            out.notes.push_back(fmt::format("strength {}%: frame rates differ ({} vs {} fps), resampled to the lower",
                                            strength_label(cell.strength), real.pitch.fps(),
                                            pitch.at(cell.strength).fps()));
        }
    }
    out.head_gain = try_gain(pitch, Metric::head_rotation, out.notes);
    out.eyebrow_gain = try_gain(brow, Metric::eyebrow_raise, out.notes);
    return out;
}

json to_json(const ComparisonTable& table) {
    json pairs = json::array();
    json gains = json::array();
    json notes = json::array();
    json sessions = json::array();
    for (const auto& row : table.rows) {
        sessions.push_back(row.label);
        for (const auto& cell : row.head_rotation) pairs.push_back(cell_json(cell, Metric::head_rotation, row.label));
        for (const auto& cell : row.eyebrow_raise) pairs.push_back(cell_json(cell, Metric::eyebrow_raise, row.label));
        if (row.head_gain) gains.push_back(gain_json(*row.head_gain, Metric::head_rotation, row.label));
        if (row.eyebrow_gain) gains.push_back(gain_json(*row.eyebrow_gain, Metric::eyebrow_raise, row.label));
        for (const auto& note : row.notes) notes.push_back({{"session", row.label}, {"note", note}});
    }
    return {{"sessions", std::move(sessions)}, {"pairs", std::move(pairs)},           {"gains", std::move(gains)},
            {"notes", std::move(notes)},       {"provenance", table.provenance}};
}

ComparisonTable comparison_table_from_json(const json& j) {
    try {
        ComparisonTable table;
        for (const auto& label : j.at("sessions")) row_for(table, label.get<std::string>());
        for (const auto& p : j.at("pairs")) {
            auto& row = row_for(table, p.at("session").get<std::string>());
            CorrelationCell cell;
            cell.strength = p.at("strength").get<double>();
            cell.resampled = p.value("resampled", false);
            if (!p.at("r").is_null()) {
                ComparisonReport rep;
                rep.r = p.at("r").get<double>();
                rep.p_value = p.at("p").get<double>();
                rep.n = p.at("n").get<std::size_t>();
                const auto& labels = p.at("labels");
                if (labels.size() == 2) {
                    rep.label_a = labels[0].get<std::string>();
                    rep.label_b = labels[1].get<std::string>();
                }
                cell.report = rep;
            } else {
                cell.error = p.value("error", std::string("unavailable"));
            }
            auto& cells = metric_from_string(p.at("metric").get<std::string>()) == Metric::head_rotation
                              ? row.head_rotation
                              : row.eyebrow_raise;
            cells.push_back(std::move(cell));
        }
        for (const auto& g : j.at("gains")) {
            auto& row = row_for(table, g.at("session").get<std::string>());
            const StrengthGain gain{g.at("per_50_delta").get<double>(), g.at("intercept").get<double>(),
                                    g.at("fit_r2").get<double>()};
            if (metric_from_string(g.at("metric").get<std::string>()) == Metric::head_rotation) {
                row.head_gain = gain;
            } else {
                row.eyebrow_gain = gain;
            }
        }
        for (const auto& n : j.at("notes")) {
            row_for(table, n.at("session").get<std::string>()).notes.push_back(n.at("note").get<std::string>());
        }
        if (j.contains("provenance")) table.provenance = j["provenance"];
        return table;
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed comparison report: ") + e.what());
    }
}

ComparisonTable merge_tables(const std::vector<ComparisonTable>& tables) {
    ComparisonTable merged;
    for (const auto& t : tables) {
        for (const auto& row : t.rows) merged.rows.push_back(row);
        for (const auto& p : t.provenance) merged.provenance.push_back(p);
    }
    return merged;
}

std::string render_table(const ComparisonTable& table) {
    std::set<double, std::greater<>> strengths;
    std::size_t label_width = std::string_view("Strength [%]").size();
    for (const auto& row : table.rows) {
        for (const auto& c : row.head_rotation) strengths.insert(c.strength);
        for (const auto& c : row.eyebrow_raise) strengths.insert(c.strength);
        label_width = std::max(label_width, row.label.size());
    }
    label_width += 2;
    constexpr std::size_t kCell = 7;
    constexpr std::string_view kGapBetweenBlocks = "    ";
    const std::size_t block_width = kCell * strengths.size();

    auto value_of = [](const std::vector<CorrelationCell>& cells, double s) -> std::string {
        for (const auto& c : cells) {
            if (c.strength == s) return c.report ? fmt::format("{:.2f}", c.report->r) : "err";
        }
        return "-";
    };

    std::string out;
    out += trim_right(fmt::format("{:<{}}{:<{}}{}{:<{}}", "", label_width, "Head rotation", block_width,
                                  kGapBetweenBlocks, "Eyebrow raise", block_width)) +
           "\n";
    std::string header = fmt::format("{:<{}}", "Strength [%]", label_width);
    for (int block = 0; block < 2; ++block) {
        if (block == 1) header += kGapBetweenBlocks;
        for (double s : strengths) header += fmt::format("{:<{}}", strength_label(s), kCell);
    }
    out += trim_right(std::move(header)) + "\n";
    for (const auto& row : table.rows) {
        std::string line = fmt::format("{:<{}}", row.label, label_width);
        for (double s : strengths) line += fmt::format("{:<{}}", value_of(row.head_rotation, s), kCell);
        line += kGapBetweenBlocks;
        for (double s : strengths) line += fmt::format("{:<{}}", value_of(row.eyebrow_raise, s), kCell);
        out += trim_right(std::move(line)) + "\n";
    }

    double max_p = -1.0;
    std::size_t reported = 0;
    std::vector<std::string> errors;
    for (const auto& row : table.rows) {
        for (const auto* cells : {&row.head_rotation, &row.eyebrow_raise}) {
            for (const auto& c : *cells) {
                if (c.report) {
                    max_p = std::max(max_p, c.report->p_value);
                    ++reported;
                } else {
                    errors.push_back(fmt::format("{} {}%: {}", row.label, strength_label(c.strength), c.error));
                }
            }
        }
    }
    out += "\n";
    if (reported == 0) {
        out += "No correlations computed.\n";
    } else if (max_p < 0.001) {
        out += "Pearson's r between real and animated tracks. All p < 0.001.\n";
    } else {
        out += fmt::format("Pearson's r between real and animated tracks. Largest p = {:.3g}.\n", max_p);
    }

    bool gains_header = false;
    for (const auto& row : table.rows) {
        if (!row.head_gain && !row.eyebrow_gain) continue;
        if (!gains_header) {
            out += "\nChange per 50% expression strength:\n";
            gains_header = true;
        }
        std::string line = fmt::format("  {:<{}}", row.label, label_width);
        if (row.head_gain) {
            line += fmt::format("head rotation {:.3f} deg (R^2 {:.3f})", row.head_gain->per_50_delta,
                                row.head_gain->fit_r2);
        }
        if (row.eyebrow_gain) {
            if (row.head_gain) line += "   ";
            line += fmt::format("eyebrow raise {:.3f} mm (R^2 {:.3f})", row.eyebrow_gain->per_50_delta,
                                row.eyebrow_gain->fit_r2);
        }
        out += line + "\n";
    }
    for (const auto& e : errors) out += "error: " + e + "\n";
    for (const auto& row : table.rows) {
        for (const auto& note : row.notes) out += "note (" + row.label + "): " + note + "\n";
    }
    return out;
}

}  // namespace avprosody
