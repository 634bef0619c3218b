#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace avprosody {

// Errors are split by exit-code class: bad input (1) vs. numerical failure (2).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised by validate_track; carries the index of the first offending frame.
class TrackValidationError : public InputError {
public:
    TrackValidationError(std::size_t frame, const std::string& what)
        : InputError(what), frame_(frame) {}
    std::size_t frame() const noexcept { return frame_; }

private:
    std::size_t frame_;
};

inline constexpr std::size_t kLandmarkCount = 68;
inline constexpr double kTimestampTolerance = 1e-6;

/// Image coordinates in pixels; origin top-left, y grows downward.
struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2&, const Point2&) = default;
};

inline bool is_finite(const Point2& p) { return std::isfinite(p.x) && std::isfinite(p.y); }

inline double distance(const Point2& a, const Point2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// One detector output: 68 points in the iBUG/dlib ordering
/// (0-16 jaw, 17-26 brows, 27-35 nose, 36-47 eyes, 48-67 mouth).
struct LandmarkFrame {
    double t = 0.0;
    std::vector<Point2> points;

    friend bool operator==(const LandmarkFrame&, const LandmarkFrame&) = default;
};

struct LandmarkTrack {
    double fps = 0.0;
    std::vector<LandmarkFrame> frames;

    std::size_t size() const noexcept { return frames.size(); }
    friend bool operator==(const LandmarkTrack&, const LandmarkTrack&) = default;
};

enum class Unit { degrees, millimeters, pixels, dimensionless, hertz, decibels };

std::string_view to_string(Unit unit);
Unit unit_from_string(std::string_view name);

/// Marker for an invalid sample (unvoiced frame, failed compensation).
inline constexpr double kGap = std::numeric_limits<double>::quiet_NaN();
inline bool is_gap(double v) { return std::isnan(v); }

/// Scalar time series sampled at a fixed rate. Gaps are stored as NaN;
/// every other value must be finite.
class MotionTrack {
public:
    MotionTrack() = default;
    /// rest_value defaults to the first valid sample.
    MotionTrack(double fps, std::vector<double> values, Unit unit,
                std::optional<double> rest_value = std::nullopt);

    double fps() const noexcept { return fps_; }
    Unit unit() const noexcept { return unit_; }
    double rest_value() const noexcept { return rest_; }
    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }
    double operator[](std::size_t i) const { return values_[i]; }
    double time_at(std::size_t i) const { return static_cast<double>(i) / fps_; }
    double duration() const { return values_.empty() ? 0.0 : time_at(values_.size() - 1); }
    std::size_t valid_count() const;

    /// Same fps/unit, new samples; rest value is carried over unless given.
    MotionTrack with_values(std::vector<double> values,
                            std::optional<double> rest_value = std::nullopt) const;

    friend bool operator==(const MotionTrack& a, const MotionTrack& b);

private:
    double fps_ = 1.0;
    std::vector<double> values_;
    Unit unit_ = Unit::dimensionless;
    double rest_ = 0.0;
};

struct SessionManifest {
    std::string label;
    std::filesystem::path landmark_path;
    std::optional<std::filesystem::path> audio_path;
    double interocular_mm = 0.0;
    std::optional<double> strength_percent;
    // Camera geometry; the default intrinsics are derived from the image size.
    std::optional<int> image_width;
    std::optional<int> image_height;
};

void validate_manifest(const SessionManifest& manifest);

/// Returns the track unchanged when every invariant holds; throws
/// TrackValidationError naming the first offending frame otherwise.
const LandmarkTrack& validate_track(const LandmarkTrack& track);

}  // namespace avprosody
