#pragma once

#include <vector>

#include "avprosody/core_types.hpp"

namespace avprosody {

struct AudioBuffer {
    double sample_rate = 0.0;
    std::vector<double> samples;  // mono, nominally in [-1, 1]
};

void validate(const AudioBuffer& audio);

struct F0Config {
    double fmin = 75.0;
    double fmax = 400.0;
    double frame_length = 0.040;  // seconds
    double hop = 0.010;           // seconds
    double voicing_threshold = 0.45;

    friend bool operator==(const F0Config&, const F0Config&) = default;
};

void validate(const F0Config& cfg, double sample_rate);

inline constexpr double kIntensityFloorDb = -120.0;

struct ProsodyContours {
    MotionTrack f0;         // Hz; unvoiced frames are gaps
    MotionTrack intensity;  // dB re full scale
    double hop = 0.010;
};

/// Number of analysis frames for a buffer; frame k starts at sample round(k * hop * sr).
std::size_t frame_count(const AudioBuffer& audio, const F0Config& cfg);

/// Cumulative-mean-normalized difference function of one frame for lags
/// 0..max_lag (entry 0 is 1 by definition).
std::vector<double> normalized_difference(std::span<const double> frame, std::size_t max_lag);

/// F0 per frame from the first normalized-difference dip below the voicing
/// threshold, refined by parabolic interpolation.
MotionTrack f0_contour(const AudioBuffer& audio, const F0Config& cfg);

/// 10 log10(mean square) per frame, floored at -120 dB.
MotionTrack intensity_contour(const AudioBuffer& audio, const F0Config& cfg);

ProsodyContours prosody_contours(const AudioBuffer& audio, const F0Config& cfg);

}  // namespace avprosody
