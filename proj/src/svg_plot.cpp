#include "avprosody/svg_plot.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "avprosody/io_formats.hpp"

namespace avprosody {

namespace {

constexpr double kWidth = 900.0;
constexpr double kPanelHeight = 210.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 170.0;  // legend column
constexpr double kTop = 40.0;
constexpr double kPanelGap = 45.0;

constexpr std::array<std::string_view, 6> kPalette{"#d62728", "#ff7f0e", "#9467bd", "#2ca02c", "#8c564b", "#e377c2"};

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void include(const MotionTrack& track) {
        for (double v : track.values()) {
            if (is_gap(v)) continue;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    Range padded() const {
        Range r = *this;
        if (!std::isfinite(r.lo)) return {0.0, 1.0};
        const double span = r.hi - r.lo;
        const double pad = span > 0.0 ? 0.08 * span : std::max(1.0, std::abs(r.lo) * 0.1);
        r.lo -= pad;
        r.hi += pad;
        return r;
    }
};

double nice_step(double span, int target_ticks) {
    const double raw = span / target_ticks;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
        if (m * mag >= raw) return m * mag;
    }
    return 10.0 * mag;
}

std::string escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Frame {
    double x0, y0, w, h;
    double t_max;
    Range y;

    double px(double t) const { return x0 + w * t / t_max; }
    double py(double v) const { return y0 + h * (1.0 - (v - y.lo) / (y.hi - y.lo)); }
};

std::string path_data(const MotionTrack& track, const Frame& f) {
    std::string d;
    bool pen_down = false;
    for (std::size_t i = 0; i < track.size(); ++i) {
        const double v = track[i];
        if (is_gap(v)) {
            pen_down = false;
            continue;
        }
        d += fmt::format("{}{:.2f},{:.2f} ", pen_down ? "L" : "M", f.px(track.time_at(i)), f.py(v));
        pen_down = true;
    }
    if (!d.empty()) d.pop_back();
    return d;
}

void draw_axes(std::string& svg, const Frame& f, std::string_view title, std::string_view y_label,
               bool time_label) {
    svg += fmt::format(R"(  <rect x="{:.2f}" y="{:.2f}" width="{:.2f}" height="{:.2f}" fill="none" stroke="#444"/>)"
                       "\n",
                       f.x0, f.y0, f.w, f.h);
    svg += fmt::format(R"(  <text x="{:.2f}" y="{:.2f}" font-size="13" font-weight="bold">{}</text>)" "\n", f.x0,
                       f.y0 - 8.0, escape(title));
    const double ystep = nice_step(f.y.hi - f.y.lo, 5);
    for (double v = std::ceil(f.y.lo / ystep) * ystep; v <= f.y.hi + 1e-12; v += ystep) {
        const double y = f.py(v);
        const double shown = std::abs(v) < 1e-9 * ystep ? 0.0 : v;
        svg += fmt::format(R"(  <line x1="{:.2f}" y1="{:.2f}" x2="{:.2f}" y2="{:.2f}" stroke="#ddd"/>)" "\n", f.x0, y,
                           f.x0 + f.w, y);
        svg += fmt::format(R"(  <text x="{:.2f}" y="{:.2f}" font-size="10" text-anchor="end">{:g}</text>)" "\n",
                           f.x0 - 4.0, y + 3.0, shown);
    }
    const double tstep = nice_step(f.t_max, 8);
    for (double t = 0.0; t <= f.t_max + 1e-12; t += tstep) {
        svg += fmt::format(R"(  <text x="{:.2f}" y="{:.2f}" font-size="10" text-anchor="middle">{:g}</text>)" "\n",
                           f.px(t), f.y0 + f.h + 13.0, t);
    }
    svg += fmt::format(
        R"svg(  <text x="{:.2f}" y="{:.2f}" font-size="11" text-anchor="middle" transform="rotate(-90 {:.2f} {:.2f})">{}</text>)svg"
        "\n",
        f.x0 - 45.0, f.y0 + f.h / 2.0, f.x0 - 45.0, f.y0 + f.h / 2.0, escape(y_label));
    if (time_label) {
        svg += fmt::format(R"(  <text x="{:.2f}" y="{:.2f}" font-size="11" text-anchor="middle">time [s]</text>)" "\n",
                           f.x0 + f.w / 2.0, f.y0 + f.h + 28.0);
    }
}

struct Series {
    std::string label;
    const MotionTrack* track;
    std::string color;
    bool dashed;
};

void draw_series(std::string& svg, const Frame& f, const std::vector<Series>& series) {
    double legend_y = f.y0 + 12.0;
    for (const auto& s : series) {
        svg += fmt::format(
            R"(  <path class="series" data-label="{}" d="{}" fill="none" stroke="{}" stroke-width="1.6"{}/>)" "\n",
            escape(s.label), path_data(*s.track, f), s.color, s.dashed ? R"( stroke-dasharray="6,4")" : "");
        const double lx = f.x0 + f.w + 15.0;
        svg += fmt::format(
            R"(  <line x1="{:.2f}" y1="{:.2f}" x2="{:.2f}" y2="{:.2f}" stroke="{}" stroke-width="1.6"{}/>)" "\n", lx,
            legend_y - 4.0, lx + 22.0, legend_y - 4.0, s.color, s.dashed ? R"( stroke-dasharray="6,4")" : "");
        svg += fmt::format(R"(  <text class="legend" x="{:.2f}" y="{:.2f}" font-size="11">{}</text>)" "\n",
                           lx + 28.0, legend_y, escape(s.label));
        legend_y += 16.0;
    }
}

std::string series_label(const AnalysisResult& r, bool primary) {
    if (r.strength_percent) return fmt::format("VH {:g}%", *r.strength_percent);
    if (primary) return "real talker";
    return r.label.empty() ? "overlay" : r.label;
}

}  // namespace

std::string render_session_svg(const AnalysisResult& result, const std::vector<AnalysisResult>& overlays) {
    if (result.pitch.empty() || result.eyebrow.empty()) throw InputError("plot: result has empty tracks");

    const bool with_audio = result.contours.has_value();
    const int panels = with_audio ? 3 : 2;
    const double height = kTop + panels * kPanelHeight + (panels - 1) * kPanelGap + 50.0;
    const double plot_w = kWidth - kLeft - kRight;

    double t_max = std::max(result.pitch.duration(), result.eyebrow.duration());
    if (with_audio) t_max = std::max({t_max, result.contours->f0.duration(), result.contours->intensity.duration()});
    for (const auto& o : overlays) t_max = std::max({t_max, o.pitch.duration(), o.eyebrow.duration()});
    if (!(t_max > 0.0)) t_max = 1.0;

    std::string svg;
    svg += R"(<?xml version="1.0" encoding="UTF-8"?>)" "\n";
    svg += fmt::format(
        R"(<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{:.0f}" height="{:.0f}" viewBox="0 0 {:.0f} {:.0f}" font-family="sans-serif">)"
        "\n",
        kWidth, height, kWidth, height);
    svg += fmt::format(R"(  <rect width="100%" height="100%" fill="white"/>)" "\n");
    svg += fmt::format(R"(  <text x="{:.2f}" y="22" font-size="15">{}</text>)" "\n", kLeft, escape(result.label));

    double y0 = kTop;
    auto next_frame = [&](Range range) {
        Frame f{kLeft, y0, plot_w, kPanelHeight, t_max, range.padded()};
        y0 += kPanelHeight + kPanelGap;
        return f;
    };

    if (with_audio) {
        const auto& c = *result.contours;
        Range f0_range;
        f0_range.include(c.f0);
        Frame f = next_frame(f0_range);
        svg += R"( <g class="panel" data-panel="acoustics">)" "\n";
        draw_axes(svg, f, "F0 contour (blue) and intensity contour (green)", "F0 [Hz]", false);
        draw_series(svg, f, {{"F0", &c.f0, "#1f77b4", false}});

        // intensity on its own right-hand scale, limited to the top 60 dB
        Range db_range;
        db_range.include(c.intensity);
        if (std::isfinite(db_range.hi)) db_range.lo = std::max(db_range.lo, db_range.hi - 60.0);
        Frame g = f;
        g.y = db_range.padded();
        std::vector<double> clipped(c.intensity.values().begin(), c.intensity.values().end());
        for (double& v : clipped) {
            if (!is_gap(v)) v = std::max(v, g.y.lo);
        }
        const MotionTrack intensity_view = c.intensity.with_values(std::move(clipped));
        svg += fmt::format(
            R"(  <path class="series" data-label="intensity" d="{}" fill="none" stroke="#2ca02c" stroke-width="1.6"/>)"
            "\n",
            path_data(intensity_view, g));
        const double gstep = nice_step(g.y.hi - g.y.lo, 5);
        for (double v = std::ceil(g.y.lo / gstep) * gstep; v <= g.y.hi + 1e-12; v += gstep) {
            svg += fmt::format(R"(  <text x="{:.2f}" y="{:.2f}" font-size="10" fill="#2ca02c">{:g}</text>)" "\n",
                               g.x0 + g.w + 3.0, g.py(v) + 3.0, v);
        }
        svg += fmt::format(R"(  <text class="legend" x="{:.2f}" y="{:.2f}" font-size="11" fill="#2ca02c">intensity [dB]</text>)" "\n",
                           g.x0 + g.w + 43.0, g.y0 + 44.0);
        svg += " </g>\n";
    }

    auto motion_panel = [&](std::string_view id, std::string_view title, std::string_view y_label,
                            const MotionTrack AnalysisResult::*member, bool last) {
        Range range;
        range.include(result.*member);
        for (const auto& o : overlays) range.include(o.*member);
        const Frame f = next_frame(range);
        std::vector<Series> series{{series_label(result, true), &(result.*member), "#000000", true}};
        for (std::size_t i = 0; i < overlays.size(); ++i) {
            series.push_back({series_label(overlays[i], false), &(overlays[i].*member),
                              std::string(kPalette[i % kPalette.size()]), false});
        }
        svg += fmt::format(R"( <g class="panel" data-panel="{}">)" "\n", id);
        draw_axes(svg, f, title, y_label, last);
        draw_series(svg, f, series);
        svg += " </g>\n";
    };
    motion_panel("pitch", "Head rotation (pitch, normalized to t = 0 s)", "pitch [deg] (down < 0)",
                 &AnalysisResult::pitch, false);
    motion_panel("eyebrow", "Eyebrow raise (normalized to t = 0 s)", "eyebrow raise [mm]", &AnalysisResult::eyebrow,
                 true);

    svg += "</svg>\n";
    return svg;
}

void plot_session(const AnalysisResult& result, const std::vector<AnalysisResult>& overlays,
                  const std::filesystem::path& path) {
    write_text_file(path, render_session_svg(result, overlays));
}

}  // namespace avprosody
