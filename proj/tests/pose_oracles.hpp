#pragma once

#include <Eigen/Dense>
#include <random>

#include "avprosody/head_pose.hpp"

namespace testing {

using namespace avprosody;

struct PoseSample {
    Pose pose;
};

inline Pose random_pose(std::mt19937_64& rng, double max_angle = 30.0) {
    std::uniform_real_distribution<double> angle(-max_angle, max_angle);
    std::uniform_real_distribution<double> lateral(-100.0, 100.0);
    std::uniform_real_distribution<double> depth(600.0, 1400.0);
    Pose p;
    p.pitch = angle(rng);
    p.yaw = angle(rng);
    p.roll = angle(rng);
    p.translation = {lateral(rng), lateral(rng), depth(rng)};
    return p;
}

inline CameraIntrinsics test_camera() { return {1000.0, 1000.0, 640.0, 360.0}; }

inline double reprojection_rmse(const PoseImagePoints& observed, const FaceModel3D& model, const Pose& pose,
                                const CameraIntrinsics& cam) {
    const auto proj = project(model, pose, cam);
    double ss = 0.0;
    for (std::size_t i = 0; i < kPoseLandmarks; ++i) {
        ss += (proj[i].x - observed[i].x) * (proj[i].x - observed[i].x) +
              (proj[i].y - observed[i].y) * (proj[i].y - observed[i].y);
    }
    return std::sqrt(ss / kPoseLandmarks);
}

/// Best RMSE over translation with the rotation held fixed: Gauss-Newton with
/// central-difference Jacobians.
inline double best_rmse_fixed_rotation(const PoseImagePoints& observed, const FaceModel3D& model, Pose pose,
                                       const CameraIntrinsics& cam) {
    auto residuals = [&](const Pose& p) {
        Eigen::Matrix<double, 12, 1> r;
        const auto proj = project(model, p, cam);
        for (std::size_t i = 0; i < kPoseLandmarks; ++i) {
            r(2 * i) = proj[i].x - observed[i].x;
            r(2 * i + 1) = proj[i].y - observed[i].y;
        }
        return r;
    };
    for (int it = 0; it < 30; ++it) {
        const auto r0 = residuals(pose);
        Eigen::Matrix<double, 12, 3> j;
        for (int c = 0; c < 3; ++c) {
            Pose plus = pose;
            Pose minus = pose;
            const double h = 1e-4 * std::max(1.0, std::abs(pose.translation.z));
            double* tp = c == 0 ? &plus.translation.x : c == 1 ? &plus.translation.y : &plus.translation.z;
            double* tm = c == 0 ? &minus.translation.x : c == 1 ? &minus.translation.y : &minus.translation.z;
            *tp += h;
            *tm -= h;
            j.col(c) = (residuals(plus) - residuals(minus)) / (2.0 * h);
        }
        const Eigen::Vector3d step = j.colPivHouseholderQr().solve(-r0);
        pose.translation.x += step(0);
        pose.translation.y += step(1);
        pose.translation.z += step(2);
        if (step.norm() < 1e-10) break;
    }
    return reprojection_rmse(observed, model, pose, cam);
}

/// Minimum RMSE over a pitch/yaw/roll lattice with 2 degree spacing covering
/// `center` +/- `half_range` degrees.
inline double grid_min_rmse(const PoseImagePoints& observed, const FaceModel3D& model, const Pose& center,
                            const CameraIntrinsics& cam, double half_range = 6.0) {
    double best = std::numeric_limits<double>::infinity();
    const double step = 2.0;
    for (double dp = -half_range; dp <= half_range + 1e-9; dp += step) {
        for (double dy = -half_range; dy <= half_range + 1e-9; dy += step) {
            for (double dr = -half_range; dr <= half_range + 1e-9; dr += step) {
                Pose p = center;
                p.pitch = std::round(center.pitch / step) * step + dp;
                p.yaw = std::round(center.yaw / step) * step + dy;
                p.roll = std::round(center.roll / step) * step + dr;
                best = std::min(best, best_rmse_fixed_rotation(observed, model, p, cam));
            }
        }
    }
    return best;
}

inline PoseImagePoints with_noise(PoseImagePoints pts, std::mt19937_64& rng, double sigma) {
    std::normal_distribution<double> n(0.0, sigma);
    for (auto& p : pts) {
        p.x += n(rng);
        p.y += n(rng);
    }
    return pts;
}

}  // namespace testing
