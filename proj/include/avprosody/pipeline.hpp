#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "avprosody/acoustics.hpp"
#include "avprosody/core_types.hpp"
#include "avprosody/facial_metrics.hpp"
#include "avprosody/filtering.hpp"
#include "avprosody/head_pose.hpp"

namespace avprosody {

/// Everything that shapes an analysis besides the input files.
struct AnalysisConfig {
    SgConfig sg;
    FaceModel3D model = FaceModel3D::generic();
    std::optional<CameraIntrinsics> camera;  // overrides the manifest's image size
    EyebrowConfig eyebrow;
    F0Config f0;
    std::optional<double> interocular_mm;  // overrides the manifest value
};

struct Provenance {
    SgConfig sg;
    FaceModel3D model;
    CameraIntrinsics camera;
    EyebrowConfig eyebrow;
    CalibrationScale calibration;
    double interocular_mm = 0.0;
    std::optional<F0Config> f0;
    std::string landmark_source;
    std::optional<std::string> audio_source;
};

struct AnalysisResult {
    std::string label;
    std::optional<double> strength_percent;
    MotionTrack pitch;    // degrees, normalized to the first frame
    MotionTrack eyebrow;  // millimeters, normalized to the first frame
    double pitch_first_frame = 0.0;    // absolute pitch before normalization
    double eyebrow_first_frame = 0.0;  // absolute raise before normalization
    std::optional<ProsodyContours> contours;
    Provenance provenance;
};

CameraIntrinsics resolve_camera(const SessionManifest& manifest, const AnalysisConfig& config);

/// smooth -> pitch -> calibrated, compensated eyebrow raise -> first-frame
/// normalization, plus F0/intensity when the manifest names audio. Errors are
/// prefixed with the failing stage.
AnalysisResult analyze(const SessionManifest& manifest, const AnalysisConfig& config = {});

/// Same pipeline on an in-memory track (no file ingestion).
AnalysisResult analyze_track(const LandmarkTrack& track, const SessionManifest& manifest,
                             const AnalysisConfig& config = {}, const std::optional<AudioBuffer>& audio = std::nullopt);

nlohmann::json to_json(const AnalysisResult& result);
AnalysisResult analysis_result_from_json(const nlohmann::json& j);

nlohmann::json provenance_to_json(const Provenance& p);
Provenance provenance_from_json(const nlohmann::json& j);

}  // namespace avprosody
