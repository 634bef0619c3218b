#include "avprosody/synthesis.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace avprosody {

namespace {

struct Keyframe {
    double t;
    double value;
};

// Piecewise raised-cosine interpolation: monotone between keyframes with zero
// slope at each keyframe, so extrema sit exactly on keyframe values.
class KeyframeCurve {
public:
    void add(double t, double value) {
        if (!keys_.empty() && t <= keys_.back().t + 1e-12) return;
        keys_.push_back({t, value});
    }

    double operator()(double t) const {
        if (t <= keys_.front().t) return keys_.front().value;
        for (std::size_t i = 1; i < keys_.size(); ++i) {
            if (t <= keys_[i].t) {
                const auto& a = keys_[i - 1];
                const auto& b = keys_[i];
                const double u = (t - a.t) / (b.t - a.t);
                return a.value + (b.value - a.value) * 0.5 * (1.0 - std::cos(std::numbers::pi * u));
            }
        }
        return keys_.back().value;
    }

private:
    std::vector<Keyframe> keys_;
};

std::size_t sample_count(const FocusStimulusSpec& spec) {
    return static_cast<std::size_t>(std::floor(spec.duration * spec.fps + 1e-9)) + 1;
}

// Snaps t onto the sample grid, staying strictly inside (lo, hi) when possible.
double snap(double t, double fps, double lo, double hi) {
    double snapped = std::round(t * fps) / fps;
    if (snapped <= lo || snapped >= hi) snapped = t;
    return snapped;
}

std::vector<double> sample(const KeyframeCurve& curve, std::size_t n, double fps) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = curve(static_cast<double>(i) / fps);
    return out;
}

double smoothstep_cos(double u) {
    u = std::clamp(u, 0.0, 1.0);
    return 0.5 * (1.0 - std::cos(std::numbers::pi * u));
}

}  // namespace

void validate(const ExpressionStrength& s) {
    if (!(s.percent >= 0.0 && s.percent <= 200.0)) {
        throw InputError("expression strength must lie in [0, 200] percent, got " + std::to_string(s.percent));
    }
}

MotionTrack apply_strength(const MotionTrack& base, ExpressionStrength s) {
    validate(s);
    const double gain = s.percent / 100.0;
    const double rest = base.rest_value();
    std::vector<double> out(base.values().begin(), base.values().end());
    for (double& v : out) {
        if (!is_gap(v)) v = rest + gain * (v - rest);
    }
    return base.with_values(std::move(out));
}

void validate(const FocusStimulusSpec& spec) {
    if (!(spec.duration > 0.0) || !(spec.fps > 0.0)) throw InputError("stimulus duration and fps must be positive");
    if (!(spec.focus_start >= 0.0 && spec.focus_start < spec.focus_end && spec.focus_end <= spec.duration)) {
        throw InputError("focus interval must satisfy 0 <= start < end <= duration");
    }
    if (!(spec.pre_raise_amp >= 0.0 && spec.focal_pitch_amp >= 0.0 && spec.brow_raise_amp >= 0.0)) {
        throw InputError("stimulus amplitudes must be non-negative");
    }
}

FocusMotion synth_focus_motion(const FocusStimulusSpec& spec) {
    validate(spec);
    std::mt19937_64 rng(spec.idiosyncrasy_seed);
    auto uniform = [&rng](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };

    const double fs = spec.focus_start;
    const double fe = spec.focus_end;
    const double focus_len = fe - fs;
    const double rise = uniform(0.35, 0.6);
    const double dip_at = uniform(0.4, 0.65);
    const double pitch_release = uniform(0.15, 0.35);
    const double brow_rise = uniform(0.25, 0.5);
    const double brow_onset_level = uniform(0.6, 0.85);
    const double brow_peak_at = uniform(0.3, 0.7);
    const double brow_hold_level = uniform(0.7, 0.9);
    const double brow_release = uniform(0.25, 0.45);

    KeyframeCurve pitch;
    pitch.add(0.0, 0.0);
    pitch.add(std::max(0.0, fs - rise), 0.0);
    pitch.add(fs, spec.pre_raise_amp);
    pitch.add(snap(fs + dip_at * focus_len, spec.fps, fs, fe), -spec.focal_pitch_amp);
    pitch.add(std::min(spec.duration, fe + pitch_release), 0.0);
    pitch.add(spec.duration, 0.0);

    KeyframeCurve brow;
    brow.add(0.0, 0.0);
    brow.add(std::max(0.0, fs - brow_rise), 0.0);
    brow.add(fs, brow_onset_level * spec.brow_raise_amp);
    brow.add(snap(fs + brow_peak_at * focus_len, spec.fps, fs, fe), spec.brow_raise_amp);
    brow.add(fe, brow_hold_level * spec.brow_raise_amp);
    brow.add(std::min(spec.duration, fe + brow_release), 0.0);
    brow.add(spec.duration, 0.0);

    const auto n = sample_count(spec);
    return {MotionTrack(spec.fps, sample(pitch, n, spec.fps), Unit::degrees, 0.0),
            MotionTrack(spec.fps, sample(brow, n, spec.fps), Unit::millimeters, 0.0)};
}

const std::array<Point3, kLandmarkCount>& generic_head_68() {
    static const std::array<Point3, kLandmarkCount> head = [] {
        std::array<Point3, kLandmarkCount> p{};
        // jaw line 0..16, ear level to chin to ear level
        for (std::size_t k = 0; k <= 16; ++k) {
            const double theta = std::numbers::pi * static_cast<double>(k) / 16.0;
            const double c = std::cos(theta);
            p[k] = {-330.0 * c, 120.0 - 450.0 * std::sin(theta), -65.0 - 300.0 * c * c};
        }
        const std::array<Point3, 5> brow{{
            {-250.0, 225.0, -175.0}, {-210.0, 250.0, -150.0}, {-165.0, 262.0, -130.0},
            {-120.0, 258.0, -118.0}, {-80.0, 240.0, -110.0},
        }};
        for (std::size_t k = 0; k < 5; ++k) {
            p[17 + k] = brow[k];
            p[26 - k] = {-brow[k].x, brow[k].y, brow[k].z};
        }
        p[27] = {0.0, 165.0, -90.0};
        p[28] = {0.0, 110.0, -60.0};
        p[29] = {0.0, 55.0, -30.0};
        p[30] = {0.0, 0.0, 0.0};
        p[31] = {-55.0, -45.0, -60.0};
        p[32] = {-28.0, -52.0, -45.0};
        p[33] = {0.0, -58.0, -40.0};
        p[34] = {28.0, -52.0, -45.0};
        p[35] = {55.0, -45.0, -60.0};
        // eyes: outer corner, two upper lid points, inner corner, two lower lid points
        const std::array<Point3, 6> left_eye{{
            {-225.0, 170.0, -135.0}, {-190.0, 190.0, -122.0}, {-125.0, 190.0, -115.0},
            {-80.0, 165.0, -110.0}, {-125.0, 150.0, -115.0}, {-190.0, 150.0, -122.0},
        }};
        const std::array<std::size_t, 6> mirror{3, 2, 1, 0, 5, 4};
        for (std::size_t k = 0; k < 6; ++k) {
            p[36 + k] = left_eye[k];
            const auto& m = left_eye[mirror[k]];
            p[42 + k] = {-m.x, m.y, m.z};
        }
        const std::array<Point3, 20> mouth{{
            {-150.0, -150.0, -125.0}, {-100.0, -120.0, -100.0}, {-40.0, -108.0, -85.0}, {0.0, -112.0, -82.0},
            {40.0, -108.0, -85.0},    {100.0, -120.0, -100.0},  {150.0, -150.0, -125.0}, {100.0, -185.0, -105.0},
            {40.0, -200.0, -90.0},    {0.0, -202.0, -88.0},     {-40.0, -200.0, -90.0},  {-100.0, -185.0, -105.0},
            {-125.0, -150.0, -118.0}, {-40.0, -140.0, -92.0},   {0.0, -140.0, -90.0},    {40.0, -140.0, -92.0},
            {125.0, -150.0, -118.0},  {40.0, -160.0, -92.0},    {0.0, -160.0, -90.0},    {-40.0, -160.0, -92.0},
        }};
        for (std::size_t k = 0; k < mouth.size(); ++k) p[48 + k] = mouth[k];
        return p;
    }();
    return head;
}

LandmarkTrack render_landmark_track(const MotionTrack& pitch, const MotionTrack& brow, const FaceModel3D& model,
                                    const CameraIntrinsics& cam, const RenderOptions& options) {
    validate(model);
    validate(cam);
    if (pitch.size() != brow.size() || pitch.fps() != brow.fps()) {
        throw InputError("render: pitch and brow trajectories must share fps and length");
    }
    if (pitch.empty()) throw InputError("render: empty trajectories");
    if (!(options.interocular_mm > 0.0)) throw InputError("render: interocular_mm must be positive");

    auto head = generic_head_68();
    for (std::size_t i = 0; i < kPoseLandmarks; ++i) head[model.landmark_indices[i]] = model.points[i];
    const auto& a = head.at(options.calibration_a);
    const auto& b = head.at(options.calibration_b);
    const double units_per_mm = std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) +
                                          (a.z - b.z) * (a.z - b.z)) / options.interocular_mm;

    LandmarkTrack track;
    track.fps = pitch.fps();
    track.frames.resize(pitch.size());
    for (std::size_t k = 0; k < pitch.size(); ++k) {
        if (is_gap(pitch[k]) || is_gap(brow[k])) throw InputError("render: trajectories must not contain gaps");
        Pose pose;
        pose.pitch = pitch[k];
        pose.translation = options.head_position;
        const double lift = (brow[k] - brow.rest_value()) * units_per_mm;

        auto& frame = track.frames[k];
        frame.t = static_cast<double>(k) / track.fps;
        frame.points.resize(kLandmarkCount);
        for (std::size_t i = 0; i < kLandmarkCount; ++i) {
            Point3 p = head[i];
            if (i >= kBrowLandmarks.first && i <= kBrowLandmarks.second) p.y += lift;
            frame.points[i] = project_point(p, pose, cam);
        }
    }
    return track;
}

LandmarkTrack synth_landmark_track(const FocusStimulusSpec& spec, const FaceModel3D& model,
                                   const CameraIntrinsics& cam, const RenderOptions& options) {
    const auto motion = synth_focus_motion(spec);
    return render_landmark_track(motion.pitch, motion.brow, model, cam, options);
}

AudioBuffer synth_focus_audio(const FocusStimulusSpec& spec, double sample_rate, double base_f0, double focal_f0) {
    validate(spec);
    if (!(sample_rate > 0.0) || !(base_f0 > 0.0) || !(focal_f0 > 0.0)) {
        throw InputError("audio synthesis parameters must be positive");
    }
    const auto n = static_cast<std::size_t>(std::floor(spec.duration * sample_rate));
    const double nyquist = 0.5 * sample_rate;
    const double fs = spec.focus_start;
    const double fe = spec.focus_end;
    const double ramp = 0.15;  // seconds for F0/level transitions

    AudioBuffer audio;
    audio.sample_rate = sample_rate;
    audio.samples.resize(n);
    double phase = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / sample_rate;
        const double focus = smoothstep_cos((t - (fs - ramp)) / ramp) * (1.0 - smoothstep_cos((t - fe) / ramp));
        const double f0 = base_f0 + (focal_f0 - base_f0) * focus;
        // voicing envelope: silent lead-in and tail
        const double voiced = smoothstep_cos((t - 0.1) / 0.05) * (1.0 - smoothstep_cos((t - (spec.duration - 0.15)) / 0.05));
        const double level = (0.15 + 0.25 * focus) * voiced;

        double value = 0.0;
        for (int h = 1; h * f0 < nyquist && h <= 12; ++h) value += std::sin(h * phase) / h;
        audio.samples[i] = level * value / 2.0;
        phase += 2.0 * std::numbers::pi * f0 / sample_rate;
        if (phase > 2.0 * std::numbers::pi) phase -= 2.0 * std::numbers::pi;
    }
    return audio;
}

}  // namespace avprosody
