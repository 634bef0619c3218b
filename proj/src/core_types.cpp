#include "avprosody/core_types.hpp"

#include <algorithm>
#include <string>

namespace avprosody {

namespace {

struct UnitName {
    Unit unit;
    std::string_view name;
};

constexpr std::array<UnitName, 6> kUnitNames{{
    {Unit::degrees, "degrees"},
    {Unit::millimeters, "millimeters"},
    {Unit::pixels, "pixels"},
    {Unit::dimensionless, "dimensionless"},
    {Unit::hertz, "hertz"},
    {Unit::decibels, "decibels"},
}};

}  // namespace

std::string_view to_string(Unit unit) {
    for (const auto& entry : kUnitNames) {
        if (entry.unit == unit) return entry.name;
    }
    return "dimensionless";
}

Unit unit_from_string(std::string_view name) {
    for (const auto& entry : kUnitNames) {
        if (entry.name == name) return entry.unit;
    }
    throw InputError("unknown unit '" + std::string(name) + "'");
}

MotionTrack::MotionTrack(double fps, std::vector<double> values, Unit unit,
                         std::optional<double> rest_value)
    : fps_(fps), values_(std::move(values)), unit_(unit) {
    if (!(fps_ > 0.0) || !std::isfinite(fps_)) {
        throw InputError("motion track fps must be positive, got " + std::to_string(fps_));
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (std::isinf(values_[i])) {
            throw InputError("motion track sample " + std::to_string(i) + " is infinite");
        }
    }
    if (rest_value) {
        if (!std::isfinite(*rest_value)) throw InputError("motion track rest value must be finite");
        rest_ = *rest_value;
    } else {
        auto first = std::find_if(values_.begin(), values_.end(), [](double v) { return !is_gap(v); });
        rest_ = first == values_.end() ? 0.0 : *first;
    }
}

std::size_t MotionTrack::valid_count() const {
    return static_cast<std::size_t>(
        std::count_if(values_.begin(), values_.end(), [](double v) { return !is_gap(v); }));
}

MotionTrack MotionTrack::with_values(std::vector<double> values,
                                     std::optional<double> rest_value) const {
    return MotionTrack(fps_, std::move(values), unit_, rest_value.value_or(rest_));
}

bool operator==(const MotionTrack& a, const MotionTrack& b) {
    if (a.fps_ != b.fps_ || a.unit_ != b.unit_ || a.rest_ != b.rest_) return false;
    if (a.values_.size() != b.values_.size()) return false;
    for (std::size_t i = 0; i < a.values_.size(); ++i) {
        const double x = a.values_[i];
        const double y = b.values_[i];
        if (is_gap(x) != is_gap(y)) return false;
        if (!is_gap(x) && x != y) return false;
    }
    return true;
}

void validate_manifest(const SessionManifest& manifest) {
    if (!(manifest.interocular_mm > 0.0) || !std::isfinite(manifest.interocular_mm)) {
        throw InputError("manifest '" + manifest.label + "': interocular_mm must be positive");
    }
    if (manifest.strength_percent) {
        const double s = *manifest.strength_percent;
        if (!(s >= 0.0 && s <= 200.0)) {
            throw InputError("manifest '" + manifest.label +
                             "': strength_percent must lie in [0, 200], got " + std::to_string(s));
        }
    }
    if (manifest.landmark_path.empty()) {
        throw InputError("manifest '" + manifest.label + "': landmark_path is required");
    }
    if ((manifest.image_width && *manifest.image_width <= 0) ||
        (manifest.image_height && *manifest.image_height <= 0)) {
        throw InputError("manifest '" + manifest.label + "': image size must be positive");
    }
}

const LandmarkTrack& validate_track(const LandmarkTrack& track) {
    if (!(track.fps > 0.0) || !std::isfinite(track.fps)) {
        throw TrackValidationError(0, "track fps must be positive");
    }
    if (track.frames.empty()) throw TrackValidationError(0, "track has no frames");

    const double dt = 1.0 / track.fps;
    for (std::size_t k = 0; k < track.frames.size(); ++k) {
        const auto& frame = track.frames[k];
        if (frame.points.size() != kLandmarkCount) {
            throw TrackValidationError(k, "wrong point count at frame " + std::to_string(k) + ": expected 68, got " +
                                              std::to_string(frame.points.size()));
        }
        if (!std::isfinite(frame.t) || frame.t < 0.0) {
            throw TrackValidationError(k, "invalid timestamp at frame " + std::to_string(k));
        }
        for (std::size_t i = 0; i < frame.points.size(); ++i) {
            if (!is_finite(frame.points[i])) {
                throw TrackValidationError(k, "non-finite value at frame " + std::to_string(k) + ", landmark " +
                                                  std::to_string(i));
            }
        }
        if (k > 0) {
            const double step = frame.t - track.frames[k - 1].t;
            if (std::abs(step - dt) > kTimestampTolerance) {
                throw TrackValidationError(k, "non-uniform spacing at frame " + std::to_string(k) + ": step " +
                                                  std::to_string(step) + " s, expected " + std::to_string(dt) + " s");
            }
        }
    }
    return track;
}

}  // namespace avprosody
