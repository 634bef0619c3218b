// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <fmt/format.h>

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>
#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "avprosody/acoustics.hpp"
#include "avprosody/cli.hpp"
#include "avprosody/comparison.hpp"
#include "avprosody/facial_metrics.hpp"
#include "avprosody/filtering.hpp"
#include "avprosody/head_pose.hpp"
#include "avprosody/io_formats.hpp"
#include "avprosody/pipeline.hpp"
#include "avprosody/report.hpp"
#include "avprosody/synthesis.hpp"
#include "pose_oracles.hpp"
#include "signals.hpp"
#include "support.hpp"

using namespace avprosody;

namespace {

// Frozen from a 1000-trial Monte-Carlo run (seed 2024): measured median
// |pitch error| at sigma = 0.5 px was 0.0959 deg; the bound adds 15 % headroom.
constexpr double kPnpNoiseMedianBoundDeg = 0.11;

// Frozen from the 3D projection oracle of criterion 3 (default synthetic rig,
// pitch -15..15 deg): largest deviation of the exactly compensated distance
// from its mean was 0.390 % of the mean.
constexpr double kCompensationOracleDeviation = 0.0039;

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double time_limit_s;  // 0 = no limit
    std::function<Outcome()> run;
};

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<double> lsq_center_weights(int window, int order) {
    const int half = (window - 1) / 2;
    Eigen::MatrixXd v(window, order + 1);
    for (int i = 0; i < window; ++i) {
        for (int p = 0; p <= order; ++p) v(i, p) = std::pow(static_cast<double>(i - half), p);
    }
    const auto qr = v.householderQr();
    std::vector<double> w(window);
    for (int j = 0; j < window; ++j) w[j] = qr.solve(Eigen::VectorXd::Unit(window, j).eval())(0);
    return w;
}

Outcome sg_filter() {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> coef(-10.0, 10.0);
    std::uniform_int_distribution<int> degree(0, 2);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int d = degree(rng);
        const double c0 = coef(rng), c1 = d >= 1 ? coef(rng) : 0.0, c2 = d >= 2 ? coef(rng) : 0.0;
        std::vector<double> x(60);
        for (int i = 0; i < 60; ++i) {
            const double t = i / 30.0;
            x[i] = c0 + c1 * t + c2 * t * t;
        }
        const auto y = smooth_scalar(x, {});
        for (int i = 6; i < 54; ++i) worst = std::max(worst, std::abs(y[i] - x[i]));
    }

    std::vector<double> impulse(11, 0.0);
    impulse[5] = 1.0;
    const auto response = smooth_scalar(impulse, {5, 2});
    const auto oracle = lsq_center_weights(5, 2);
    const double frozen[5] = {-3.0 / 35, 12.0 / 35, 17.0 / 35, 12.0 / 35, -3.0 / 35};
    double impulse_err = 0.0;
    for (int i = 0; i < 5; ++i) {
        // response at sample 7 - i sees the impulse through weight i
        impulse_err = std::max({impulse_err, std::abs(response[7 - i] - oracle[i]), std::abs(oracle[i] - frozen[i])});
    }
    return {worst < 1e-9 && impulse_err < 1e-12,
            fmt::format("max interior error {:.2e}, impulse vs least-squares oracle {:.2e}", worst, impulse_err)};
}

Outcome pnp_round_trip() {
    const auto model = FaceModel3D::generic();
    const auto cam = testing::test_camera();
    std::mt19937_64 rng(2024);
    double worst_angle = 0.0, worst_t = 0.0;
    std::vector<double> noisy_errors;
    for (int trial = 0; trial < 1000; ++trial) {
        const Pose truth = testing::random_pose(rng);
        const auto clean = project(model, truth, cam);
        const Pose p = solve_pnp(clean, model, cam);
        worst_angle = std::max({worst_angle, std::abs(p.pitch - truth.pitch), std::abs(p.yaw - truth.yaw),
                                std::abs(p.roll - truth.roll)});
        worst_t = std::max({worst_t, std::abs(p.translation.x - truth.translation.x),
                            std::abs(p.translation.y - truth.translation.y),
                            std::abs(p.translation.z - truth.translation.z)});
        const Pose n = solve_pnp(testing::with_noise(clean, rng, 0.5), model, cam);
        noisy_errors.push_back(std::abs(n.pitch - truth.pitch));
    }
    const auto mid = noisy_errors.begin() + static_cast<std::ptrdiff_t>(noisy_errors.size() / 2);
    std::nth_element(noisy_errors.begin(), mid, noisy_errors.end());
    const double median = *mid;
    return {worst_angle < 0.01 && worst_t < 0.1 && median <= kPnpNoiseMedianBoundDeg,
            fmt::format("noiseless max angle error {:.2e} deg, translation {:.2e}; noisy median pitch error {:.4f} "
                        "deg (bound {})",
                        worst_angle, worst_t, median, kPnpNoiseMedianBoundDeg)};
}

double max_relative_deviation(const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double dev = 0.0;
    for (double x : v) dev = std::max(dev, std::abs(x - mean));
    return dev / mean;
}

Outcome cosine_compensation() {
    const auto model = FaceModel3D::generic();
    const auto cam = testing::synthetic_camera();
    const RenderOptions rig;
    const EyebrowConfig cfg;
    const std::size_t n = 121;
    std::vector<double> pitch(n);
    for (std::size_t k = 0; k < n; ++k) pitch[k] = -15.0 + 30.0 * static_cast<double>(k) / (n - 1);
    const MotionTrack pitch_truth(30.0, pitch, Unit::degrees);
    const MotionTrack still(30.0, std::vector<double>(n, 0.0), Unit::millimeters);
    const auto track = render_landmark_track(pitch_truth, still, model, cam, rig);

    // oracle: exact projections compensated with the true pitch
    const auto scale = calibration_from_track(track, cfg, rig.interocular_mm);
    std::vector<double> oracle(n);
    for (std::size_t k = 0; k < n; ++k) {
        oracle[k] = *compensate_pitch(eyebrow_raise_raw(track.frames[k], cfg), pitch[k]) * scale.mm_per_pixel;
    }
    const double oracle_dev = max_relative_deviation(oracle);

    const auto result = analyze_track(track, testing::synthetic_manifest("sweep"));
    std::vector<double> measured(n);
    for (std::size_t k = 0; k < n; ++k) measured[k] = result.eyebrow_first_frame + result.eyebrow[k];
    const double measured_dev = max_relative_deviation(measured);
    const double tolerance = kCompensationOracleDeviation * 1.05;
    return {oracle_dev <= kCompensationOracleDeviation * 1.01 && measured_dev <= tolerance && tolerance <= 0.02,
            fmt::format("compensated track deviates {:.3f} % from its mean (oracle {:.3f} %, tolerance {:.3f} %)",
                        100.0 * measured_dev, 100.0 * oracle_dev, 100.0 * tolerance)};
}

Outcome acoustics() {
    const auto pulses = testing::pulse_train(120.0, 1.0);
    const auto stats = testing::f0_stats(f0_contour(pulses, {}), 120.0, 1.0);
    const auto sq = testing::square(50, 1.0);
    auto half = sq;
    for (double& v : half.samples) v *= 0.5;
    const auto a = intensity_contour(sq, {});
    const auto b = intensity_contour(half, {});
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs((a[i] - b[i]) - 6.02));
    return {stats.voiced > 0 && stats.fraction() >= 0.95 && stats.octave_errors == 0 && worst <= 0.01,
            fmt::format("{}/{} voiced frames within 120 +/- 1 Hz, {} octave errors; halving shift off by at most "
                        "{:.4f} dB",
                        stats.within, stats.voiced, stats.octave_errors, worst)};
}

Outcome affine_invariance() {
    std::mt19937_64 rng(55);
    std::normal_distribution<double> nd(0.0, 2.0);
    double worst = 0.0;
    bool zero_ok = true;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> v(10 + trial);
        for (double& x : v) x = nd(rng);
        const MotionTrack base(30.0, v, trial % 2 ? Unit::degrees : Unit::millimeters);
        for (double s : {50.0, 100.0, 150.0, 200.0}) {
            worst = std::max(worst, std::abs(pearson(base, apply_strength(base, {s})).r - 1.0));
        }
        const auto frozen = apply_strength(base, {0.0});
        for (double x : frozen.values()) zero_ok = zero_ok && x == base.rest_value();
        try {
            pearson(base, frozen);
            zero_ok = false;
        } catch (const NumericalError&) {
        }
    }
    return {worst <= 1e-12 && zero_ok,
            fmt::format("max |r - 1| = {:.2e}; 0 % strength {}", worst,
                        zero_ok ? "yields zero-variance tracks" : "left residual motion")};
}

struct GainCheck {
    double head_rel = 0.0;
    double brow_rel = 0.0;
    double min_r = 1.0;
    double head = 0.0;
    double brow = 0.0;
};

GainCheck end_to_end_case(const FocusStimulusSpec& spec) {
    const auto model = FaceModel3D::generic();
    const auto cam = testing::synthetic_camera();
    const auto motion = synth_focus_motion(spec);
    const auto real = analyze_track(render_landmark_track(motion.pitch, motion.brow, model, cam), testing::synthetic_manifest("real"));

    std::vector<std::pair<double, AnalysisResult>> vh;
    std::map<double, MotionTrack> pitch_family, brow_family;
    for (double s : {50.0, 100.0, 150.0, 200.0}) {
        const auto p = apply_strength(motion.pitch, {s});
        const auto b = apply_strength(motion.brow, {s});
        pitch_family.emplace(s, p);
        brow_family.emplace(s, b);
        vh.emplace_back(s, analyze_track(render_landmark_track(p, b, model, cam),
                                         testing::synthetic_manifest(fmt::format("vh{}", s), s)));
    }
    const auto row = compare_sessions(real, vh);
    GainCheck g;
    for (const auto* cells : {&row.head_rotation, &row.eyebrow_raise}) {
        for (const auto& c : *cells) g.min_r = std::min(g.min_r, c.report ? c.report->r : -1.0);
    }
    const double head_truth = estimate_strength_gain(pitch_family).per_50_delta;
    const double brow_truth = estimate_strength_gain(brow_family).per_50_delta;
    g.head = row.head_gain ? row.head_gain->per_50_delta : 0.0;
    g.brow = row.eyebrow_gain ? row.eyebrow_gain->per_50_delta : 0.0;
    g.head_rel = std::abs(g.head / head_truth - 1.0);
    g.brow_rel = std::abs(g.brow / brow_truth - 1.0);
    return g;
}

Outcome end_to_end() {
    FocusStimulusSpec spec;
    spec.focal_pitch_amp = 4.0;
    spec.brow_raise_amp = 2.5;
    const auto main = end_to_end_case(spec);

    // published-range anchor: focal dip only, 1.75 deg and 2.5 mm per 50 %
    FocusStimulusSpec anchor;
    anchor.pre_raise_amp = 0.0;
    anchor.focal_pitch_amp = 3.5;
    anchor.brow_raise_amp = 5.0;
    anchor.idiosyncrasy_seed = 7;
    const auto anchored = end_to_end_case(anchor);
    const bool in_range = anchored.head >= 1.5 && anchored.head <= 2.0 && anchored.brow >= 2.0 && anchored.brow <= 3.0;

    const bool pass = main.min_r >= 0.99 && main.head_rel <= 0.02 && main.brow_rel <= 0.02 && anchored.min_r >= 0.99 &&
                      anchored.head_rel <= 0.02 && anchored.brow_rel <= 0.02 && in_range;
    return {pass, fmt::format("min r {:.4f}; gain error head {:.2f} %, eyebrow {:.2f} %; anchor {:.3f} deg and "
                              "{:.3f} mm per 50 % (errors {:.2f} %, {:.2f} %)",
                              std::min(main.min_r, anchored.min_r), 100.0 * main.head_rel, 100.0 * main.brow_rel,
                              anchored.head, anchored.brow, 100.0 * anchored.head_rel, 100.0 * anchored.brow_rel)};
}

std::size_t count(const std::string& hay, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
    return n;
}

Outcome report_and_plot() {
    testing::TempDir dir;
    std::streambuf* saved = std::cout.rdbuf();
    std::ostringstream sink;
    std::cout.rdbuf(sink.rdbuf());
    write_text_file(dir / "spec.json", R"({"focal_pitch_amp": 4.0, "brow_raise_amp": 2.5, "idiosyncrasy_seed": 3})");
    const auto s = [&](const std::string& f) { return (dir / "s" / f).string(); };
    int rc = run_cli({"synth", (dir / "spec.json").string(), "--strengths", "50,100,150,200", "-o", (dir / "s").string()});
    for (const char* out : {"a", "b"}) {
        if (rc != 0) break;
        rc = run_cli({"compare", s("real.json"), s("vh_50.json"), s("vh_100.json"), s("vh_150.json"), s("vh_200.json"),
                      "-o", (dir / out).string()});
    }
    std::cout.rdbuf(saved);
    if (rc != 0) return {false, fmt::format("CLI exited with {}", rc)};

    bool identical = true;
    for (const char* f : {"report.json", "table.txt", "figure.svg"}) {
        identical = identical && slurp(dir / "a" / f) == slurp(dir / "b" / f);
    }
    const auto table = slurp(dir / "a" / "table.txt");
    const auto svg = slurp(dir / "a" / "figure.svg");
    const bool table_shape = table.find("Head rotation") != std::string::npos &&
                             table.find("Eyebrow raise") != std::string::npos &&
                             table.find("Strength [%]  200    150    100    50         200    150    100    50") !=
                                 std::string::npos;
    const bool figure_shape = count(svg, "class=\"panel\"") == 3 && count(svg, "class=\"series\"") == 2 + 2 * 5;
    return {identical && table_shape && figure_shape,
            fmt::format("outputs {}; table {}; figure has {} panels and {} series", identical ? "byte-identical" : "differ",
                        table_shape ? "2 blocks x 4 strengths" : "malformed", count(svg, "class=\"panel\""),
                        count(svg, "class=\"series\""))};
}

Outcome statistics() {
    const double r = 0.8;
    const std::size_t n = 50;
    const double p = correlation_p_value(r, n);
    const double reference = 3.1802898550106652e-12;  // 50-digit incomplete-beta evaluation
    const double df = static_cast<double>(n - 2);
    const double t = r * std::sqrt(df / (1.0 - r * r));
    const double boost_p = 2.0 * boost::math::cdf(boost::math::complement(boost::math::students_t(df), t));
    const double rel = std::max(std::abs(p / reference - 1.0), std::abs(p / boost_p - 1.0));
    return {p < 0.001 && rel < 1e-9, fmt::format("p = {:.6e} (reference {:.6e}, relative difference {:.1e})", p,
                                                 reference, rel)};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "SG polynomial reproduction and impulse response", 1.0, sg_filter},
        {2, "PnP round trip and noise robustness", 30.0, pnp_round_trip},
        {3, "cosine compensation over pitch -15..15 deg", 5.0, cosine_compensation},
        {4, "F0 and intensity on synthetic signals", 0.0, acoustics},
        {5, "affine invariance of strength scaling", 0.0, affine_invariance},
        {6, "end-to-end synthetic focus stimulus", 60.0, end_to_end},
        {7, "deterministic table and figure", 0.0, report_and_plot},
        {8, "p-value for r = 0.80, n = 50", 0.0, statistics},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.time_limit_s > 0.0 && secs > c.time_limit_s) {
            o.pass = false;
            o.detail += fmt::format("; exceeded {:.0f} s limit", c.time_limit_s);
        }
        if (!o.pass) ++failures;
        fmt::print("{} [{}] {} ({:.2f} s): {}\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs, o.detail);
    }
    fmt::print("{}/{} criteria passed\n", criteria.size() - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
