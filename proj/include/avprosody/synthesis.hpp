#pragma once

#include <array>
#include <cstdint>
#include <utility>

#include "avprosody/acoustics.hpp"
#include "avprosody/core_types.hpp"
#include "avprosody/head_pose.hpp"

namespace avprosody {

/// Global motion-magnitude setting: 0% freezes the neutral face, 200% doubles
/// every excursion from rest.
struct ExpressionStrength {
    double percent = 100.0;
};

void validate(const ExpressionStrength& s);

/// Scales deviations from the track's rest value; gaps stay gaps.
MotionTrack apply_strength(const MotionTrack& base, ExpressionStrength s);

struct FocusStimulusSpec {
    double duration = 2.5;  // seconds
    double fps = 120.0;
    double focus_start = 0.9;
    double focus_end = 1.5;
    double pre_raise_amp = 1.0;    // degrees, head raise ending at focus onset
    double focal_pitch_amp = 4.0;  // degrees, downward excursion inside the focus
    double brow_raise_amp = 2.5;   // millimeters
    std::uint64_t idiosyncrasy_seed = 1;
};

void validate(const FocusStimulusSpec& spec);

struct FocusMotion {
    MotionTrack pitch;  // degrees, rest 0
    MotionTrack brow;   // millimeters, rest 0
};

/// Raised-cosine keyframe trajectories. The seed moves onset, extremum and
/// release times; amplitudes are hit exactly on the sample grid.
FocusMotion synth_focus_motion(const FocusStimulusSpec& spec);

/// Generic 68-point head in the same units and frame as FaceModel3D::generic().
const std::array<Point3, kLandmarkCount>& generic_head_68();

/// Landmarks moved by the brow trajectory (both brows, 17..26).
inline constexpr std::pair<std::size_t, std::size_t> kBrowLandmarks{17, 26};

struct RenderOptions {
    double interocular_mm = 32.0;  // physical size of the 39-42 distance of the head
    Point3 head_position{0.0, 200.0, 15000.0};  // 3 m away, camera at eye level
    static constexpr int kSuggestedImageWidth = 3840;
    static constexpr int kSuggestedImageHeight = 2160;
    std::size_t calibration_a = 39;
    std::size_t calibration_b = 42;
};

/// Projects the rigid head posed by `pitch` (degrees) with brows lifted by
/// `brow` (mm above rest, in the head frame). The model's six pose points
/// replace the generic head at their landmark indices.
LandmarkTrack render_landmark_track(const MotionTrack& pitch, const MotionTrack& brow, const FaceModel3D& model,
                                    const CameraIntrinsics& cam, const RenderOptions& options = {});

LandmarkTrack synth_landmark_track(const FocusStimulusSpec& spec, const FaceModel3D& model,
                                   const CameraIntrinsics& cam, const RenderOptions& options = {});

/// Voiced harmonic signal whose F0 and level rise over the focus interval.
AudioBuffer synth_focus_audio(const FocusStimulusSpec& spec, double sample_rate = 44100.0,
                              double base_f0 = 120.0, double focal_f0 = 180.0);

}  // namespace avprosody
