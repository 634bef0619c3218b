#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>

#include "avprosody/core_types.hpp"

namespace avprosody {

/// Head-frame coordinates: origin at the nose tip, x toward image right,
/// y up, z toward the camera.
struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend bool operator==(const Point3&, const Point3&) = default;
};

inline constexpr std::size_t kPoseLandmarks = 6;

/// Rigid six-point model used for pose solving. Entry order is
/// nose tip, chin, left eye outer, right eye outer, mouth left, mouth right.
struct FaceModel3D {
    std::array<Point3, kPoseLandmarks> points;
    std::array<std::size_t, kPoseLandmarks> landmark_indices;

    static FaceModel3D generic();
    static std::string_view point_name(std::size_t i);

    friend bool operator==(const FaceModel3D&, const FaceModel3D&) = default;
};

/// Throws InputError when the model is (nearly) coplanar or an index is out of range.
void validate(const FaceModel3D& model);

/// Pinhole camera, no lens distortion.
struct CameraIntrinsics {
    double fx = 0.0;
    double fy = 0.0;
    double cx = 0.0;
    double cy = 0.0;

    /// Webcam approximation: focal length = image width, principal point at the center.
    static CameraIntrinsics from_image_size(int width, int height);

    friend bool operator==(const CameraIntrinsics&, const CameraIntrinsics&) = default;
};

void validate(const CameraIntrinsics& cam);

/// Euler angles in degrees, applied intrinsically yaw (y) -> pitch (x) -> roll (z).
/// Positive pitch raises the chin; a downward nod is negative.
/// Positive yaw turns the nose toward image right; positive roll turns the
/// head's up axis toward image right.
struct Pose {
    double pitch = 0.0;
    double yaw = 0.0;
    double roll = 0.0;
    Point3 translation{0.0, 0.0, 1000.0};  // nose tip in camera coordinates (z forward)
    double reprojection_rmse = 0.0;
};

using PoseImagePoints = std::array<Point2, kPoseLandmarks>;

/// Projects any head-frame point. Throws NumericalError when the point is at
/// or behind the camera plane.
Point2 project_point(const Point3& point, const Pose& pose, const CameraIntrinsics& cam);

PoseImagePoints project(const FaceModel3D& model, const Pose& pose, const CameraIntrinsics& cam);

struct PnpOptions {
    int max_iterations = 100;
    double cost_tolerance = 1e-10;  // sum of squared residuals, px^2
    double initial_damping = 1e-3;
};

/// Damped Gauss-Newton (Levenberg-Marquardt) fit of the model pose to six
/// image points. Without `init` the solve starts frontal and falls back to a
/// coarse pitch/yaw seed grid if it does not converge.
Pose solve_pnp(const PoseImagePoints& points, const FaceModel3D& model, const CameraIntrinsics& cam,
               const std::optional<Pose>& init = std::nullopt, const PnpOptions& options = {});

/// Picks the model's six landmarks out of a 68-point frame.
PoseImagePoints pose_points(const LandmarkFrame& frame, const FaceModel3D& model);

/// Per-frame pitch in degrees, each solve warm-started from the previous frame.
MotionTrack pitch_track(const LandmarkTrack& track, const FaceModel3D& model, const CameraIntrinsics& cam,
                        std::vector<Pose>* poses = nullptr);

}  // namespace avprosody
