#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "avprosody/core_types.hpp"

namespace avprosody {

struct ComparisonReport {
    double r = 0.0;
    double p_value = 1.0;
    std::size_t n = 0;
    std::string label_a;
    std::string label_b;
};

struct StrengthGain {
    double per_50_delta = 0.0;  // track unit per 50 percentage points
    double intercept = 0.0;
    double fit_r2 = 0.0;
};

/// Linear interpolation onto a uniform grid at target_fps covering the same
/// time span; an interpolated sample touching a gap is a gap.
MotionTrack resample(const MotionTrack& track, double target_fps);

/// Brings two tracks onto the lower of their frame rates and truncates both
/// to the common time span.
std::pair<MotionTrack, MotionTrack> align(const MotionTrack& a, const MotionTrack& b);

/// Regularized incomplete beta function I_x(a, b).
double incomplete_beta(double a, double b, double x);

/// Two-sided p-value of a sample correlation r over n pairs (t-test, n-2 dof).
double correlation_p_value(double r, std::size_t n);

/// Pearson r over jointly valid samples. Tracks must already share fps and length.
ComparisonReport pearson(const MotionTrack& a, const MotionTrack& b);

struct CorrelationCell {
    double strength = 0.0;
    std::optional<ComparisonReport> report;
    std::string error;  // set when report is empty
    bool resampled = false;
};

/// One cell per strength (ascending). Mismatched tracks are aligned first;
/// a failing cell records its error without aborting the others.
std::vector<CorrelationCell> correlation_matrix(const MotionTrack& real, const std::map<double, MotionTrack>& vh);

enum class MagnitudeFeature { peak_to_peak, focal_extremum };

struct FocusInterval {
    double start = 0.0;
    double end = 0.0;
};

/// peak_to_peak: max - min over the track. focal_extremum: largest |x - rest|
/// inside the focus interval (required for that mode).
double magnitude(const MotionTrack& track, MagnitudeFeature feature,
                 const std::optional<FocusInterval>& focus = std::nullopt);

/// OLS fit of magnitude against strength percent; per_50_delta = 50 * slope.
StrengthGain estimate_strength_gain(const std::map<double, MotionTrack>& tracks,
                                    MagnitudeFeature feature = MagnitudeFeature::peak_to_peak,
                                    const std::optional<FocusInterval>& focus = std::nullopt);

}  // namespace avprosody
