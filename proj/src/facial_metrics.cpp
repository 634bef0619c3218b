#include "avprosody/facial_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace avprosody {

void validate(const EyebrowConfig& cfg) {
    const std::array<std::size_t, 4> indices{cfg.eye_inner_corner_index, cfg.brow_inner_index,
                                             cfg.interocular_indices.first, cfg.interocular_indices.second};
    for (auto i : indices) {
        if (i >= kLandmarkCount) throw InputError("eyebrow landmark index " + std::to_string(i) + " is outside 0..67");
    }
    if (cfg.eye_inner_corner_index == cfg.brow_inner_index) {
        throw InputError("eye corner and brow landmark indices must differ");
    }
    if (cfg.interocular_indices.first == cfg.interocular_indices.second) {
        throw InputError("interocular landmark indices must differ");
    }
}

double eyebrow_raise_raw(const LandmarkFrame& frame, const EyebrowConfig& cfg) {
    return distance(frame.points.at(cfg.eye_inner_corner_index), frame.points.at(cfg.brow_inner_index));
}

std::optional<double> compensate_pitch(double raw_pixels, double pitch_deg) {
    if (!std::isfinite(pitch_deg) || std::abs(pitch_deg) >= kMaxCompensationPitchDeg) return std::nullopt;
    return raw_pixels / std::cos(pitch_deg * std::numbers::pi / 180.0);
}

CalibrationScale calibration_from_track(const LandmarkTrack& track, const EyebrowConfig& cfg, double interocular_mm) {
    validate_track(track);
    validate(cfg);
    if (!(interocular_mm > 0.0) || !std::isfinite(interocular_mm)) {
        throw InputError("interocular distance must be positive");
    }
    std::vector<double> distances;
    distances.reserve(track.size());
    for (const auto& frame : track.frames) {
        distances.push_back(
            distance(frame.points[cfg.interocular_indices.first], frame.points[cfg.interocular_indices.second]));
    }
    const auto mid = distances.begin() + static_cast<std::ptrdiff_t>(distances.size() / 2);
    std::nth_element(distances.begin(), mid, distances.end());
    double median = *mid;
    if (distances.size() % 2 == 0) {
        median = 0.5 * (median + *std::max_element(distances.begin(), mid));
    }
    if (!(median > 1e-9)) throw NumericalError("degenerate calibration: interocular pixel distance is zero");
    return {interocular_mm / median};
}

MotionTrack eyebrow_track(const LandmarkTrack& track, const MotionTrack& pitch, const EyebrowConfig& cfg,
                          const CalibrationScale& scale) {
    validate_track(track);
    validate(cfg);
    if (track.size() != pitch.size()) {
        throw InputError("eyebrow track: landmark track has " + std::to_string(track.size()) +
                         " frames but pitch track has " + std::to_string(pitch.size()));
    }
    if (std::abs(track.fps - pitch.fps()) > 1e-9 * track.fps) {
        throw InputError("eyebrow track: landmark and pitch frame rates differ");
    }
    if (pitch.unit() != Unit::degrees) throw InputError("eyebrow track: pitch track must be in degrees");

    std::vector<double> mm(track.size());
    for (std::size_t k = 0; k < track.size(); ++k) {
        const auto compensated = is_gap(pitch[k]) ? std::nullopt
                                                  : compensate_pitch(eyebrow_raise_raw(track.frames[k], cfg), pitch[k]);
        mm[k] = compensated ? *compensated * scale.mm_per_pixel : kGap;
    }
    return MotionTrack(track.fps, std::move(mm), Unit::millimeters);
}

MotionTrack normalize_to_first_frame(const MotionTrack& track) {
    if (track.empty()) throw InputError("cannot normalize an empty track");
    const double first = track[0];
    if (is_gap(first)) throw InputError("cannot normalize a track whose first sample is a gap");
    std::vector<double> out(track.values().begin(), track.values().end());
    for (double& v : out) v -= first;
    return track.with_values(std::move(out), 0.0);
}

}  // namespace avprosody
