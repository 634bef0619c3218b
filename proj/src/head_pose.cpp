#include "avprosody/head_pose.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace avprosody {

namespace {

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Jacobian = Eigen::Matrix<double, 2 * kPoseLandmarks, 6>;
using Residual = Eigen::Matrix<double, 2 * kPoseLandmarks, 1>;

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kMinDepth = 1e-9;

// Head frame (y up, z toward camera) to camera frame (y down, z forward).
const Mat3 kHeadToCamera = Vec3(1.0, -1.0, -1.0).asDiagonal();

Vec3 to_vec(const Point3& p) { return {p.x, p.y, p.z}; }

Mat3 head_rotation(double pitch_deg, double yaw_deg, double roll_deg) {
    const Eigen::AngleAxisd yaw(yaw_deg * kDeg, Vec3::UnitY());
    const Eigen::AngleAxisd pitch(-pitch_deg * kDeg, Vec3::UnitX());
    const Eigen::AngleAxisd roll(-roll_deg * kDeg, Vec3::UnitZ());
    return (yaw * pitch * roll).toRotationMatrix();
}

void euler_from_head_rotation(const Mat3& r, Pose& pose) {
    pose.pitch = std::asin(std::clamp(r(1, 2), -1.0, 1.0)) / kDeg;
    pose.yaw = std::atan2(r(0, 2), r(2, 2)) / kDeg;
    pose.roll = -std::atan2(r(1, 0), r(1, 1)) / kDeg;
    // keep angles in (-180, 180]
    for (double* a : {&pose.pitch, &pose.yaw, &pose.roll}) {
        if (*a <= -180.0) *a += 360.0;
    }
}

struct CameraPose {
    Mat3 rotation;  // head point -> camera frame, without translation
    Vec3 translation;
};

CameraPose to_camera_pose(const Pose& pose) {
    return {kHeadToCamera * head_rotation(pose.pitch, pose.yaw, pose.roll), to_vec(pose.translation)};
}

Pose to_pose(const CameraPose& cp) {
    Pose pose;
    euler_from_head_rotation(kHeadToCamera.transpose() * cp.rotation, pose);
    pose.translation = {cp.translation.x(), cp.translation.y(), cp.translation.z()};
    return pose;
}

struct Evaluation {
    Residual residual;
    Jacobian jacobian;
    double cost = 0.0;
    bool in_front = true;
};

Evaluation evaluate(const CameraPose& cp, const std::array<Vec3, kPoseLandmarks>& model, const PoseImagePoints& observed,
                    const CameraIntrinsics& cam, bool with_jacobian) {
    Evaluation ev;
    for (std::size_t i = 0; i < kPoseLandmarks; ++i) {
        const Vec3 rotated = cp.rotation * model[i];
        const Vec3 pc = rotated + cp.translation;
        if (!(pc.z() > kMinDepth)) {
            ev.in_front = false;
            return ev;
        }
        const double inv_z = 1.0 / pc.z();
        const auto row = static_cast<Eigen::Index>(2 * i);
        ev.residual(row) = cam.fx * pc.x() * inv_z + cam.cx - observed[i].x;
        ev.residual(row + 1) = cam.fy * pc.y() * inv_z + cam.cy - observed[i].y;
        if (!with_jacobian) continue;

        Eigen::Matrix<double, 2, 3> dproj;
        dproj << cam.fx * inv_z, 0.0, -cam.fx * pc.x() * inv_z * inv_z,
                 0.0, cam.fy * inv_z, -cam.fy * pc.y() * inv_z * inv_z;
        Mat3 skew;
        skew << 0.0, -rotated.z(), rotated.y(),
                rotated.z(), 0.0, -rotated.x(),
                -rotated.y(), rotated.x(), 0.0;
        // left perturbation R <- exp([w]x) R moves the point by -[Rx]x w
        ev.jacobian.block<2, 3>(row, 0) = dproj * (-skew);
        ev.jacobian.block<2, 3>(row, 3) = dproj;
    }
    ev.cost = ev.residual.squaredNorm();
    return ev;
}

CameraPose apply_step(const CameraPose& cp, const Vec6& step) {
    const Vec3 w = step.head<3>();
    const double angle = w.norm();
    Mat3 delta = Mat3::Identity();
    if (angle > 0.0) delta = Eigen::AngleAxisd(angle, w / angle).toRotationMatrix();
    return {delta * cp.rotation, cp.translation + step.tail<3>()};
}

void check_image_points(const PoseImagePoints& points) {
    Eigen::Matrix<double, kPoseLandmarks, 2> centered;
    for (std::size_t i = 0; i < kPoseLandmarks; ++i) {
        if (!is_finite(points[i])) throw InputError("pose point " + std::to_string(i) + " is not finite");
        centered(static_cast<Eigen::Index>(i), 0) = points[i].x;
        centered(static_cast<Eigen::Index>(i), 1) = points[i].y;
    }
    centered.rowwise() -= centered.colwise().mean();
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered);
    const auto& sv = svd.singularValues();
    if (!(sv(0) > 0.0) || sv(1) <= 1e-9 * sv(0)) {
        throw NumericalError("degenerate configuration: image points are collinear");
    }
}

// Frontal pose whose depth matches the apparent size of the model and whose
// nose tip lands on the observed nose tip.
CameraPose frontal_seed(const std::array<Vec3, kPoseLandmarks>& model, const PoseImagePoints& observed,
                        const CameraIntrinsics& cam, double pitch_deg, double yaw_deg) {
    double model_spread = 0.0;
    double image_spread = 0.0;
    Eigen::Vector2d model_mean = Eigen::Vector2d::Zero();
    Eigen::Vector2d image_mean = Eigen::Vector2d::Zero();
    for (std::size_t i = 0; i < kPoseLandmarks; ++i) {
        model_mean += model[i].head<2>();
        image_mean += Eigen::Vector2d(observed[i].x / cam.fx, observed[i].y / cam.fy);
    }
    model_mean /= kPoseLandmarks;
    image_mean /= kPoseLandmarks;
    for (std::size_t i = 0; i < kPoseLandmarks; ++i) {
        model_spread += (model[i].head<2>() - model_mean).squaredNorm();
        image_spread += (Eigen::Vector2d(observed[i].x / cam.fx, observed[i].y / cam.fy) - image_mean).squaredNorm();
    }
    double depth = 1000.0;
    if (image_spread > 0.0 && model_spread > 0.0) depth = std::sqrt(model_spread / image_spread);

    Pose seed;
    seed.pitch = pitch_deg;
    seed.yaw = yaw_deg;
    seed.translation = {(observed[0].x - cam.cx) * depth / cam.fx, (observed[0].y - cam.cy) * depth / cam.fy, depth};
    return to_camera_pose(seed);
}

struct LmOutcome {
    CameraPose pose;
    double cost = 0.0;
};

LmOutcome levenberg_marquardt(CameraPose current, const std::array<Vec3, kPoseLandmarks>& model,
                              const PoseImagePoints& observed, const CameraIntrinsics& cam,
                              const PnpOptions& options) {
    Evaluation ev = evaluate(current, model, observed, cam, true);
    if (!ev.in_front) throw NumericalError("initial pose places model points behind the camera");

    double lambda = options.initial_damping;
    bool converged = false;
    for (int iter = 0; iter < options.max_iterations && !converged; ++iter) {
        if (ev.cost < options.cost_tolerance) {
            converged = true;
            break;
        }
        const Eigen::Matrix<double, 6, 6> normal = ev.jacobian.transpose() * ev.jacobian;
        const Vec6 gradient = ev.jacobian.transpose() * ev.residual;
        const Vec6 diag = normal.diagonal().cwiseMax(1e-12 * normal.diagonal().maxCoeff());

        bool accepted = false;
        while (!accepted) {
            Eigen::Matrix<double, 6, 6> damped = normal;
            damped.diagonal() += lambda * diag;
            const Vec6 step = damped.ldlt().solve(-gradient);
            if (!step.allFinite()) throw NumericalError("degenerate configuration: singular normal equations");

            const CameraPose trial = apply_step(current, step);
            Evaluation trial_ev = evaluate(trial, model, observed, cam, true);
            if (trial_ev.in_front && trial_ev.cost < ev.cost) {
                const double decrease = ev.cost - trial_ev.cost;
                const bool tiny_step = step.head<3>().norm() < 1e-12 &&
                                       step.tail<3>().norm() < 1e-12 * (1.0 + current.translation.norm());
                current = trial;
                ev = std::move(trial_ev);
                lambda = std::max(lambda / 10.0, 1e-15);
                accepted = true;
                if (tiny_step || decrease <= 1e-15 * (ev.cost + decrease)) converged = true;
            } else {
                lambda *= 10.0;
                // no descent direction left at working precision: stationary point
                if (lambda > 1e12) {
                    converged = true;
                    break;
                }
            }
        }
    }
    if (!converged && ev.cost >= options.cost_tolerance) {
        throw NumericalError("PnP did not converge within " + std::to_string(options.max_iterations) +
                             " iterations (cost " + std::to_string(ev.cost) + " px^2)");
    }

    // Gauss-Newton polish: one undamped step, kept only if it helps.
    {
        const Eigen::Matrix<double, 6, 6> normal = ev.jacobian.transpose() * ev.jacobian;
        const Vec6 step = normal.ldlt().solve(-(ev.jacobian.transpose() * ev.residual));
        if (step.allFinite()) {
            const CameraPose trial = apply_step(current, step);
            Evaluation trial_ev = evaluate(trial, model, observed, cam, true);
            if (trial_ev.in_front && trial_ev.cost < ev.cost) {
                current = trial;
                ev = std::move(trial_ev);
            }
        }
    }

    const Eigen::JacobiSVD<Jacobian> svd(ev.jacobian);
    const auto& sv = svd.singularValues();
    if (!(sv(0) > 0.0) || sv(5) <= 1e-12 * sv(0)) {
        throw NumericalError("degenerate configuration: rank-deficient PnP Jacobian");
    }
    return {current, ev.cost};
}

Pose finish(const LmOutcome& outcome) {
    Pose pose = to_pose(outcome.pose);
    pose.reprojection_rmse = std::sqrt(outcome.cost / static_cast<double>(kPoseLandmarks));
    return pose;
}

}  // namespace

FaceModel3D FaceModel3D::generic() {
    return FaceModel3D{
        {{
            {0.0, 0.0, 0.0},          // nose tip
            {0.0, -330.0, -65.0},     // chin
            {-225.0, 170.0, -135.0},  // left eye outer corner (image left)
            {225.0, 170.0, -135.0},   // right eye outer corner
            {-150.0, -150.0, -125.0}, // mouth left
            {150.0, -150.0, -125.0},  // mouth right
        }},
        {30, 8, 36, 45, 48, 54},
    };
}

std::string_view FaceModel3D::point_name(std::size_t i) {
    static constexpr std::array<std::string_view, kPoseLandmarks> names{
        "nose_tip", "chin", "left_eye_outer", "right_eye_outer", "mouth_left", "mouth_right"};
    return i < names.size() ? names[i] : "unknown";
}

void validate(const FaceModel3D& model) {
    Eigen::Matrix<double, kPoseLandmarks, 3> centered;
    for (std::size_t i = 0; i < kPoseLandmarks; ++i) {
        const auto& p = model.points[i];
        if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z)) {
            throw InputError("face model point '" + std::string(FaceModel3D::point_name(i)) + "' is not finite");
        }
        if (model.landmark_indices[i] >= kLandmarkCount) {
            throw InputError("face model landmark index " + std::to_string(model.landmark_indices[i]) +
                             " is outside 0..67");
        }
        centered.row(static_cast<Eigen::Index>(i)) = to_vec(p).transpose();
    }
    centered.rowwise() -= centered.colwise().mean();
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered);
    const auto& sv = svd.singularValues();
    if (!(sv(0) > 0.0) || sv(2) <= 1e-6 * sv(0)) {
        throw InputError("face model points are coplanar; PnP needs a non-coplanar model");
    }
}

CameraIntrinsics CameraIntrinsics::from_image_size(int width, int height) {
    if (width <= 0 || height <= 0) throw InputError("image size must be positive");
    const double w = width;
    return {w, w, w / 2.0, height / 2.0};
}

void validate(const CameraIntrinsics& cam) {
    if (!(cam.fx > 0.0) || !(cam.fy > 0.0) || !std::isfinite(cam.fx) || !std::isfinite(cam.fy)) {
        throw InputError("camera focal lengths must be positive");
    }
    if (!std::isfinite(cam.cx) || !std::isfinite(cam.cy)) throw InputError("camera principal point must be finite");
}

Point2 project_point(const Point3& point, const Pose& pose, const CameraIntrinsics& cam) {
    const CameraPose cp = to_camera_pose(pose);
    const Vec3 pc = cp.rotation * to_vec(point) + cp.translation;
    if (!(pc.z() > kMinDepth)) {
        throw NumericalError("point lies at or behind the camera plane (z = " + std::to_string(pc.z()) + " mm)");
    }
    return {cam.fx * pc.x() / pc.z() + cam.cx, cam.fy * pc.y() / pc.z() + cam.cy};
}

PoseImagePoints project(const FaceModel3D& model, const Pose& pose, const CameraIntrinsics& cam) {
    PoseImagePoints out;
    for (std::size_t i = 0; i < kPoseLandmarks; ++i) out[i] = project_point(model.points[i], pose, cam);
    return out;
}

Pose solve_pnp(const PoseImagePoints& points, const FaceModel3D& model, const CameraIntrinsics& cam,
               const std::optional<Pose>& init, const PnpOptions& options) {
    validate(model);
    validate(cam);
    check_image_points(points);

    std::array<Vec3, kPoseLandmarks> model_points;
    for (std::size_t i = 0; i < kPoseLandmarks; ++i) model_points[i] = to_vec(model.points[i]);

    if (init) {
        try {
            return finish(levenberg_marquardt(to_camera_pose(*init), model_points, points, cam, options));
        } catch (const NumericalError&) {
            // fall through to a cold start
        }
    }

    try {
        return finish(levenberg_marquardt(frontal_seed(model_points, points, cam, 0.0, 0.0), model_points, points,
                                          cam, options));
    } catch (const NumericalError&) {
    }

    std::optional<LmOutcome> best;
    std::string last_error = "no seed converged";
    for (double pitch : {-20.0, 0.0, 20.0}) {
        for (double yaw : {-20.0, 0.0, 20.0}) {
            if (pitch == 0.0 && yaw == 0.0) continue;
            try {
                auto outcome = levenberg_marquardt(frontal_seed(model_points, points, cam, pitch, yaw),
                                                   model_points, points, cam, options);
                if (!best || outcome.cost < best->cost) best = outcome;
            } catch (const NumericalError& e) {
                last_error = e.what();
            }
        }
    }
    if (!best) throw NumericalError("PnP failed from all seeds: " + last_error);
    return finish(*best);
}

PoseImagePoints pose_points(const LandmarkFrame& frame, const FaceModel3D& model) {
    PoseImagePoints out;
    for (std::size_t i = 0; i < kPoseLandmarks; ++i) {
        const auto index = model.landmark_indices[i];
        if (index >= frame.points.size()) {
            throw InputError("landmark index " + std::to_string(index) + " missing from frame");
        }
        out[i] = frame.points[index];
    }
    return out;
}

MotionTrack pitch_track(const LandmarkTrack& track, const FaceModel3D& model, const CameraIntrinsics& cam,
                        std::vector<Pose>* poses) {
    validate_track(track);
    std::vector<double> pitch;
    pitch.reserve(track.size());
    if (poses) poses->clear();

    std::optional<Pose> previous;
    for (std::size_t k = 0; k < track.size(); ++k) {
        try {
            previous = solve_pnp(pose_points(track.frames[k], model), model, cam, previous);
        } catch (const NumericalError& e) {
            throw NumericalError("frame " + std::to_string(k) + ": " + e.what());
        }
        pitch.push_back(previous->pitch);
        if (poses) poses->push_back(*previous);
    }
    return MotionTrack(track.fps, std::move(pitch), Unit::degrees);
}

}  // namespace avprosody
