#pragma once

#include <optional>
#include <utility>

#include "avprosody/core_types.hpp"

namespace avprosody {

/// Landmark choice for the eyebrow-raise distance. Defaults follow the
/// subject's right eye in the 68-point scheme: inner corner 39, inner brow 21;
/// calibration uses the two inner eye corners 39 and 42.
struct EyebrowConfig {
    std::size_t eye_inner_corner_index = 39;
    std::size_t brow_inner_index = 21;
    std::pair<std::size_t, std::size_t> interocular_indices{39, 42};

    friend bool operator==(const EyebrowConfig&, const EyebrowConfig&) = default;
};

void validate(const EyebrowConfig& cfg);

struct CalibrationScale {
    double mm_per_pixel = 1.0;
};

/// Compensation is refused at or beyond this pitch magnitude.
inline constexpr double kMaxCompensationPitchDeg = 89.0;

double eyebrow_raise_raw(const LandmarkFrame& frame, const EyebrowConfig& cfg);

/// raw / cos(pitch); nullopt when |pitch| >= 89 degrees.
std::optional<double> compensate_pitch(double raw_pixels, double pitch_deg);

/// interocular_mm over the median interocular pixel distance.
CalibrationScale calibration_from_track(const LandmarkTrack& track, const EyebrowConfig& cfg, double interocular_mm);

/// Raw raise -> pitch compensation -> mm. Frames failing the pitch guard become gaps.
MotionTrack eyebrow_track(const LandmarkTrack& track, const MotionTrack& pitch, const EyebrowConfig& cfg,
                          const CalibrationScale& scale);

MotionTrack normalize_to_first_frame(const MotionTrack& track);

}  // namespace avprosody
