#pragma once

#include <atomic>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "avprosody/core_types.hpp"
#include "avprosody/head_pose.hpp"
#include "avprosody/synthesis.hpp"

namespace testing {

using namespace avprosody;

inline double deg(double rad) { return rad * 180.0 / 3.14159265358979323846; }

inline LandmarkFrame static_frame(double t, double scale = 1.0) {
    LandmarkFrame f;
    f.t = t;
    f.points.resize(kLandmarkCount);
    for (std::size_t i = 0; i < kLandmarkCount; ++i) {
        f.points[i] = {scale * (300.0 + 3.0 * static_cast<double>(i)), scale * (200.0 + static_cast<double>(i % 11) * 7.0)};
    }
    return f;
}

inline LandmarkTrack static_track(std::size_t n, double fps) {
    LandmarkTrack track;
    track.fps = fps;
    for (std::size_t k = 0; k < n; ++k) track.frames.push_back(static_frame(static_cast<double>(k) / fps));
    return track;
}

inline MotionTrack constant_track(std::size_t n, double fps, double value, Unit unit) {
    return MotionTrack(fps, std::vector<double>(n, value), unit);
}

/// Renders a pose/brow trajectory with the library's default synthetic camera.
inline CameraIntrinsics synthetic_camera() {
    return CameraIntrinsics::from_image_size(RenderOptions::kSuggestedImageWidth, RenderOptions::kSuggestedImageHeight);
}

inline SessionManifest synthetic_manifest(const std::string& label, std::optional<double> strength = std::nullopt) {
    SessionManifest m;
    m.label = label;
    m.landmark_path = label + ".csv";
    m.interocular_mm = RenderOptions{}.interocular_mm;
    m.strength_percent = strength;
    m.image_width = RenderOptions::kSuggestedImageWidth;
    m.image_height = RenderOptions::kSuggestedImageHeight;
    return m;
}

class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("avprosody_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

}  // namespace testing
