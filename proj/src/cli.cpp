#include "avprosody/cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <future>
#include <iostream>
#include <random>
#include <sstream>

#include "avprosody/io_formats.hpp"
#include "avprosody/pipeline.hpp"
#include "avprosody/report.hpp"
#include "avprosody/svg_plot.hpp"
#include "avprosody/synthesis.hpp"

namespace avprosody {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Flags shared by every subcommand; unset values fall back to the config file,
// then to library defaults.
struct GlobalOptions {
    std::string config_path;
    std::optional<int> sg_window;
    std::optional<int> sg_order;
    std::optional<double> fx, fy, cx, cy;
    std::optional<int> image_width, image_height;
    std::optional<std::size_t> eye_corner_index;
    std::optional<std::size_t> brow_index;
    std::vector<std::size_t> interocular_indices;
    std::optional<double> interocular_mm;
};

template <typename T>
void take(std::optional<T>& slot, const json& cfg, const char* key) {
    if (!slot && cfg.contains(key) && !cfg[key].is_null()) slot = cfg[key].get<T>();
}

AnalysisConfig build_config(GlobalOptions opts, std::optional<int>& image_width, std::optional<int>& image_height) {
    if (!opts.config_path.empty()) {
        const json cfg = read_json_file(opts.config_path);
        try {
            take(opts.sg_window, cfg, "sg_window");
            take(opts.sg_order, cfg, "sg_order");
            take(opts.fx, cfg, "fx");
            take(opts.fy, cfg, "fy");
            take(opts.cx, cfg, "cx");
            take(opts.cy, cfg, "cy");
            take(opts.image_width, cfg, "image_width");
            take(opts.image_height, cfg, "image_height");
            take(opts.eye_corner_index, cfg, "eye_corner_index");
            take(opts.brow_index, cfg, "brow_index");
            take(opts.interocular_mm, cfg, "interocular_mm");
            if (opts.interocular_indices.empty() && cfg.contains("interocular_indices")) {
                opts.interocular_indices = cfg["interocular_indices"].get<std::vector<std::size_t>>();
            }
        } catch (const json::exception& e) {
            throw InputError(opts.config_path + ": " + e.what());
        }
    }

    AnalysisConfig config;
    if (opts.sg_window) config.sg.window = *opts.sg_window;
    if (opts.sg_order) config.sg.order = *opts.sg_order;
    const int explicit_intrinsics = (opts.fx ? 1 : 0) + (opts.fy ? 1 : 0) + (opts.cx ? 1 : 0) + (opts.cy ? 1 : 0);
    if (explicit_intrinsics == 4) {
        config.camera = CameraIntrinsics{*opts.fx, *opts.fy, *opts.cx, *opts.cy};
    } else if (explicit_intrinsics != 0) {
        throw InputError("give all of --fx, --fy, --cx, --cy or none");
    }
    if (opts.eye_corner_index) config.eyebrow.eye_inner_corner_index = *opts.eye_corner_index;
    if (opts.brow_index) config.eyebrow.brow_inner_index = *opts.brow_index;
    if (!opts.interocular_indices.empty()) {
        if (opts.interocular_indices.size() != 2) throw InputError("--interocular-indices takes two indices");
        config.eyebrow.interocular_indices = {opts.interocular_indices[0], opts.interocular_indices[1]};
    }
    config.interocular_mm = opts.interocular_mm;
    image_width = opts.image_width;
    image_height = opts.image_height;
    return config;
}

struct Context {
    AnalysisConfig config;
    std::optional<int> image_width;
    std::optional<int> image_height;
    std::ostream& out;
};

SessionManifest load_manifest(const fs::path& path, const Context& ctx) {
    SessionManifest m = read_manifest(path);
    if (ctx.image_width) m.image_width = ctx.image_width;
    if (ctx.image_height) m.image_height = ctx.image_height;
    if (m.label.empty()) m.label = path.stem().string();
    return m;
}

void print_summary(std::ostream& out, const AnalysisResult& r) {
    auto extent = [](const MotionTrack& t) {
        double lo = 0.0;
        double hi = 0.0;
        for (double v : t.values()) {
            if (is_gap(v)) continue;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        return std::pair{lo, hi};
    };
    const auto [plo, phi] = extent(r.pitch);
    const auto [blo, bhi] = extent(r.eyebrow);
    out << fmt::format("{}: {} frames at {:g} fps; pitch {:+.2f}..{:+.2f} deg, eyebrow {:+.2f}..{:+.2f} mm{}\n",
                       r.label, r.pitch.size(), r.pitch.fps(), plo, phi, blo, bhi,
                       r.contours ? fmt::format(", {} acoustic frames", r.contours->f0.size()) : "");
}

int cmd_analyze(const Context& ctx, const std::string& manifest_path, const std::string& output) {
    const AnalysisResult result = analyze(load_manifest(manifest_path, ctx), ctx.config);
    const std::string text = to_json(result).dump(1) + "\n";
    if (output.empty() || output == "-") {
        ctx.out << text;
    } else {
        write_text_file(output, text);
        print_summary(ctx.out, result);
    }
    return kExitSuccess;
}

int cmd_compare(const Context& ctx, const std::string& real_path, const std::vector<std::string>& vh_paths,
                const std::string& out_dir) {
    const SessionManifest real_manifest = load_manifest(real_path, ctx);
    std::vector<SessionManifest> vh_manifests;
    for (const auto& p : vh_paths) {
        auto m = load_manifest(p, ctx);
        if (!m.strength_percent) throw InputError(p + ": animated-session manifest needs strength_percent");
        vh_manifests.push_back(std::move(m));
    }

    auto real_future = std::async(std::launch::async, [&] { return analyze(real_manifest, ctx.config); });
    std::vector<std::future<AnalysisResult>> futures;
    for (const auto& m : vh_manifests) {
        futures.push_back(std::async(std::launch::async, [&ctx, m] { return analyze(m, ctx.config); }));
    }
    const AnalysisResult real = real_future.get();
    std::vector<std::pair<double, AnalysisResult>> vh;
    std::vector<AnalysisResult> overlays;
    for (std::size_t i = 0; i < futures.size(); ++i) {
        auto r = futures[i].get();
        overlays.push_back(r);
        vh.emplace_back(*vh_manifests[i].strength_percent, std::move(r));
    }
    std::sort(overlays.begin(), overlays.end(), [](const AnalysisResult& a, const AnalysisResult& b) {
        return a.strength_percent.value_or(0.0) > b.strength_percent.value_or(0.0);
    });

    ComparisonTable table;
    table.rows.push_back(compare_sessions(real, vh));
    table.provenance.push_back({{"session", real.label}, {"role", "real"}, {"config", provenance_to_json(real.provenance)}});
    for (const auto& [strength, r] : vh) {
        table.provenance.push_back({{"session", r.label},
                                    {"role", "animated"},
                                    {"strength_percent", strength},
                                    {"config", provenance_to_json(r.provenance)}});
    }

    const std::string rendered = render_table(table);
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        const fs::path dir(out_dir);
        write_text_file(dir / "report.json", to_json(table).dump(2) + "\n");
        write_text_file(dir / "table.txt", rendered);
        plot_session(real, overlays, dir / "figure.svg");
        write_text_file(dir / "real.analysis.json", to_json(real).dump(1) + "\n");
    }
    ctx.out << rendered;
    return kExitSuccess;
}

std::vector<double> parse_strengths(const std::string& list) {
    std::vector<double> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            std::size_t used = 0;
            const double v = std::stod(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            validate(ExpressionStrength{v});
            out.push_back(v);
        } catch (const std::logic_error&) {
            throw InputError("invalid strength '" + item + "'");
        }
    }
    return out;
}

FocusStimulusSpec spec_from_json(const json& j) {
    try {
        FocusStimulusSpec spec;
        spec.duration = j.value("duration", spec.duration);
        spec.fps = j.value("fps", spec.fps);
        if (j.contains("focus_interval")) {
            spec.focus_start = j["focus_interval"].at(0).get<double>();
            spec.focus_end = j["focus_interval"].at(1).get<double>();
        }
        spec.pre_raise_amp = j.value("pre_raise_amp", spec.pre_raise_amp);
        spec.focal_pitch_amp = j.value("focal_pitch_amp", spec.focal_pitch_amp);
        spec.brow_raise_amp = j.value("brow_raise_amp", spec.brow_raise_amp);
        spec.idiosyncrasy_seed = j.value("idiosyncrasy_seed", spec.idiosyncrasy_seed);
        validate(spec);
        return spec;
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed stimulus spec: ") + e.what());
    }
}

void add_pixel_noise(LandmarkTrack& track, double sigma, std::uint64_t seed) {
    if (sigma <= 0.0) return;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    for (auto& frame : track.frames) {
        for (auto& p : frame.points) {
            p.x += noise(rng);
            p.y += noise(rng);
        }
    }
}

int cmd_synth(const Context& ctx, const std::string& spec_path, const std::string& strengths_list,
              const std::string& out_dir, std::string label, double noise_px, bool with_audio) {
    const FocusStimulusSpec spec = spec_from_json(read_json_file(spec_path));
    const auto strengths = parse_strengths(strengths_list);
    if (label.empty()) label = fs::path(spec_path).stem().string();

    const int width = ctx.image_width.value_or(RenderOptions::kSuggestedImageWidth);
    const int height = ctx.image_height.value_or(RenderOptions::kSuggestedImageHeight);
    const CameraIntrinsics cam = ctx.config.camera.value_or(CameraIntrinsics::from_image_size(width, height));
    RenderOptions render;
    render.interocular_mm = ctx.config.interocular_mm.value_or(render.interocular_mm);

    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    const FocusMotion motion = synth_focus_motion(spec);

    std::optional<std::string> audio_name;
    if (with_audio) {
        audio_name = "audio.wav";
        write_wav(dir / *audio_name, synth_focus_audio(spec));
    }

    auto emit = [&](const std::string& stem, const MotionTrack& pitch, const MotionTrack& brow,
                    std::optional<double> strength, std::uint64_t noise_seed) {
        LandmarkTrack track = render_landmark_track(pitch, brow, ctx.config.model, cam, render);
        add_pixel_noise(track, noise_px, noise_seed);
        write_landmark_file(dir / (stem + ".csv"), track);
        SessionManifest m;
        m.label = label;
        m.landmark_path = stem + ".csv";
        if (audio_name) m.audio_path = *audio_name;
        m.interocular_mm = render.interocular_mm;
        m.strength_percent = strength;
        m.image_width = width;
        m.image_height = height;
        write_manifest(dir / (stem + ".json"), m);
    };

    emit("real", motion.pitch, motion.brow, std::nullopt, spec.idiosyncrasy_seed ^ 0x5eedULL);
    for (double s : strengths) {
        const ExpressionStrength strength{s};
        emit(fmt::format("vh_{:g}", s), apply_strength(motion.pitch, strength), apply_strength(motion.brow, strength),
             s, spec.idiosyncrasy_seed ^ static_cast<std::uint64_t>(std::llround(s * 1000.0)));
    }
    write_text_file(dir / "truth.json", json{{"pitch", motion_track_to_json(motion.pitch)},
                                             {"eyebrow", motion_track_to_json(motion.brow)},
                                             {"focus_interval", {spec.focus_start, spec.focus_end}}}
                                                .dump(1) + "\n");
    ctx.out << fmt::format("wrote {} landmark sessions to {}\n", strengths.size() + 1, dir.string());
    return kExitSuccess;
}

int cmd_plot(const Context& ctx, const std::vector<std::string>& results, const std::string& output) {
    std::vector<AnalysisResult> loaded;
    for (const auto& p : results) loaded.push_back(analysis_result_from_json(read_json_file(p)));
    const std::vector<AnalysisResult> overlays(loaded.begin() + 1, loaded.end());
    plot_session(loaded.front(), overlays, output);
    ctx.out << "wrote " << output << "\n";
    return kExitSuccess;
}

int cmd_report(const Context& ctx, const std::vector<std::string>& reports, const std::string& output,
               const std::string& json_output) {
    std::vector<ComparisonTable> tables;
    for (const auto& p : reports) tables.push_back(comparison_table_from_json(read_json_file(p)));
    const ComparisonTable merged = merge_tables(tables);
    const std::string rendered = render_table(merged);
    if (!output.empty()) write_text_file(output, rendered);
    if (!json_output.empty()) write_text_file(json_output, to_json(merged).dump(2) + "\n");
    ctx.out << rendered;
    return kExitSuccess;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"Audiovisual prosody analysis: head pitch, eyebrow raise, F0/intensity, real vs. animated talkers",
                 "avprosody"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    app.add_option("--config", g.config_path, "JSON config file (keys mirror the flags, e.g. sg_window)");
    app.add_option("--sg-window", g.sg_window, "Savitzky-Golay window length in frames (odd)");
    app.add_option("--sg-order", g.sg_order, "Savitzky-Golay polynomial order");
    app.add_option("--fx", g.fx, "focal length x [px]");
    app.add_option("--fy", g.fy, "focal length y [px]");
    app.add_option("--cx", g.cx, "principal point x [px]");
    app.add_option("--cy", g.cy, "principal point y [px]");
    app.add_option("--image-width", g.image_width, "image width [px]; default intrinsics use fx = fy = width");
    app.add_option("--image-height", g.image_height, "image height [px]");
    app.add_option("--eye-corner-index", g.eye_corner_index, "inner eye corner landmark (default 39)");
    app.add_option("--brow-index", g.brow_index, "inner brow landmark (default 21)");
    app.add_option("--interocular-indices", g.interocular_indices, "calibration landmark pair (default 39 42)")
        ->expected(2)
        ->delimiter(',');
    app.add_option("--interocular-mm", g.interocular_mm, "calibration distance in mm (overrides manifests)");

    std::string manifest_path;
    std::string output;
    auto* analyze_cmd = app.add_subcommand("analyze", "analyze one session manifest");
    analyze_cmd->add_option("manifest", manifest_path, "session manifest JSON")->required();
    analyze_cmd->add_option("-o,--output", output, "result JSON path (default: stdout)");

    std::string real_path;
    std::vector<std::string> vh_paths;
    std::string out_dir;
    auto* compare_cmd = app.add_subcommand("compare", "correlate a real session with animated sessions");
    compare_cmd->add_option("real-manifest", real_path, "manifest of the recorded talker")->required();
    compare_cmd->add_option("vh-manifests", vh_paths, "manifests of animated sessions, each with strength_percent");
    compare_cmd->add_option("-o,--out-dir", out_dir, "directory for report.json, table.txt and figure.svg");

    std::string spec_path;
    std::string strengths = "50,100,150,200";
    std::string label;
    double noise_px = 0.0;
    bool no_audio = false;
    auto* synth_cmd = app.add_subcommand("synth", "render synthetic narrow-focus sessions");
    synth_cmd->add_option("spec", spec_path, "stimulus JSON (duration, fps, focus_interval, amplitudes, seed)")->required();
    synth_cmd->add_option("--strengths", strengths, "comma-separated expression strengths [%]");
    synth_cmd->add_option("-o,--out-dir", out_dir, "output directory")->required();
    synth_cmd->add_option("--label", label, "session label (default: spec file stem)");
    synth_cmd->add_option("--noise-px", noise_px, "Gaussian landmark jitter [px]");
    synth_cmd->add_flag("--no-audio", no_audio, "skip the synthetic WAV");

    std::vector<std::string> inputs;
    auto* plot_cmd = app.add_subcommand("plot", "draw analysis results; the first is primary, the rest overlays");
    plot_cmd->add_option("results", inputs, "analysis result JSON files")->required();
    plot_cmd->add_option("-o,--output", output, "SVG path")->required();

    std::string json_output;
    auto* report_cmd = app.add_subcommand("report", "merge comparison reports into one table");
    report_cmd->add_option("reports", inputs, "report.json files from compare")->required();
    report_cmd->add_option("-o,--output", output, "text table path");
    report_cmd->add_option("--json", json_output, "merged JSON report path");

    std::vector<const char*> argv;
    argv.push_back("avprosody");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInputError;
    }

    try {
        Context ctx{build_config(g, g.image_width, g.image_height), g.image_width, g.image_height, std::cout};
        if (*analyze_cmd) return cmd_analyze(ctx, manifest_path, output);
        if (*compare_cmd) return cmd_compare(ctx, real_path, vh_paths, out_dir);
        if (*synth_cmd) return cmd_synth(ctx, spec_path, strengths, out_dir, label, noise_px, !no_audio);
        if (*plot_cmd) return cmd_plot(ctx, inputs, output);
        if (*report_cmd) return cmd_report(ctx, inputs, output, json_output);
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumericalError;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitInputError;
}

}  // namespace avprosody
