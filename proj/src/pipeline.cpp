#include "avprosody/pipeline.hpp"

#include "avprosody/io_formats.hpp"

namespace avprosody {

using nlohmann::json;

namespace {

template <typename Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const NumericalError& e) {
        throw NumericalError(std::string(name) + ": " + e.what());
    } catch (const InputError& e) {
        throw InputError(std::string(name) + ": " + e.what());
    }
}

json point3_json(const Point3& p) { return json::array({p.x, p.y, p.z}); }
Point3 point3_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()}; }

json contours_json(const ProsodyContours& c) {
    return {{"hop", c.hop}, {"f0", motion_track_to_json(c.f0)}, {"intensity", motion_track_to_json(c.intensity)}};
}

}  // namespace

CameraIntrinsics resolve_camera(const SessionManifest& manifest, const AnalysisConfig& config) {
    if (config.camera) {
        validate(*config.camera);
        return *config.camera;
    }
    if (manifest.image_width && manifest.image_height) {
        return CameraIntrinsics::from_image_size(*manifest.image_width, *manifest.image_height);
    }
    throw InputError("camera intrinsics unknown: give image_width/image_height in the manifest or explicit intrinsics");
}

AnalysisResult analyze_track(const LandmarkTrack& track, const SessionManifest& manifest, const AnalysisConfig& config,
                             const std::optional<AudioBuffer>& audio) {
    stage("config", [&] {
        validate(config.sg);
        validate(config.model);
        validate(config.eyebrow);
        validate_manifest(manifest);
        return 0;
    });
    const CameraIntrinsics camera = stage("config", [&] { return resolve_camera(manifest, config); });
    const double interocular_mm = config.interocular_mm.value_or(manifest.interocular_mm);

    const LandmarkTrack smoothed = stage("smoothing", [&] { return smooth_landmarks(track, config.sg); });
    const MotionTrack pitch = stage("head pose", [&] { return pitch_track(smoothed, config.model, camera); });
    const CalibrationScale scale =
        stage("calibration", [&] { return calibration_from_track(smoothed, config.eyebrow, interocular_mm); });
    const MotionTrack brow = stage("eyebrow", [&] { return eyebrow_track(smoothed, pitch, config.eyebrow, scale); });

    AnalysisResult result;
    result.label = manifest.label;
    result.strength_percent = manifest.strength_percent;
    result.pitch_first_frame = pitch[0];
    result.eyebrow_first_frame = brow[0];
    result.pitch = stage("normalization", [&] { return normalize_to_first_frame(pitch); });
    result.eyebrow = stage("normalization", [&] { return normalize_to_first_frame(brow); });
    if (audio) result.contours = stage("acoustics", [&] { return prosody_contours(*audio, config.f0); });

    auto& prov = result.provenance;
    prov.sg = config.sg;
    prov.model = config.model;
    prov.camera = camera;
    prov.eyebrow = config.eyebrow;
    prov.calibration = scale;
    prov.interocular_mm = interocular_mm;
    if (audio) prov.f0 = config.f0;
    prov.landmark_source = manifest.landmark_path.generic_string();
    if (manifest.audio_path) prov.audio_source = manifest.audio_path->generic_string();
    return result;
}

AnalysisResult analyze(const SessionManifest& manifest, const AnalysisConfig& config) {
    const LandmarkTrack track = stage("ingestion", [&] { return read_landmark_file(manifest.landmark_path); });
    std::optional<AudioBuffer> audio;
    if (manifest.audio_path) audio = stage("ingestion", [&] { return read_wav(*manifest.audio_path); });
    return analyze_track(track, manifest, config, audio);
}

json provenance_to_json(const Provenance& p) {
    json model_points = json::object();
    json model_indices = json::object();
    for (std::size_t i = 0; i < kPoseLandmarks; ++i) {
        const std::string name(FaceModel3D::point_name(i));
        model_points[name] = point3_json(p.model.points[i]);
        model_indices[name] = p.model.landmark_indices[i];
    }
    json j = {
        {"savitzky_golay", {{"window", p.sg.window}, {"order", p.sg.order}}},
        {"face_model", {{"points", model_points}, {"landmark_indices", model_indices}}},
        {"camera", {{"fx", p.camera.fx}, {"fy", p.camera.fy}, {"cx", p.camera.cx}, {"cy", p.camera.cy}}},
        {"eyebrow",
         {{"eye_inner_corner_index", p.eyebrow.eye_inner_corner_index},
          {"brow_inner_index", p.eyebrow.brow_inner_index},
          {"interocular_indices", {p.eyebrow.interocular_indices.first, p.eyebrow.interocular_indices.second}}}},
        {"calibration", {{"mm_per_pixel", p.calibration.mm_per_pixel}, {"interocular_mm", p.interocular_mm}}},
        {"landmark_source", p.landmark_source},
    };
    j["f0"] = p.f0 ? json{{"fmin", p.f0->fmin},
                          {"fmax", p.f0->fmax},
                          {"frame_length", p.f0->frame_length},
                          {"hop", p.f0->hop},
                          {"voicing_threshold", p.f0->voicing_threshold}}
                   : json(nullptr);
    j["audio_source"] = p.audio_source ? json(*p.audio_source) : json(nullptr);
    return j;
}

Provenance provenance_from_json(const json& j) {
    Provenance p;
    p.sg.window = j.at("savitzky_golay").at("window").get<int>();
    p.sg.order = j.at("savitzky_golay").at("order").get<int>();
    const auto& model = j.at("face_model");
    for (std::size_t i = 0; i < kPoseLandmarks; ++i) {
        const std::string name(FaceModel3D::point_name(i));
        p.model.points[i] = point3_from(model.at("points").at(name));
        p.model.landmark_indices[i] = model.at("landmark_indices").at(name).get<std::size_t>();
    }
    const auto& cam = j.at("camera");
    p.camera = {cam.at("fx").get<double>(), cam.at("fy").get<double>(), cam.at("cx").get<double>(),
                cam.at("cy").get<double>()};
    const auto& brow = j.at("eyebrow");
    p.eyebrow.eye_inner_corner_index = brow.at("eye_inner_corner_index").get<std::size_t>();
    p.eyebrow.brow_inner_index = brow.at("brow_inner_index").get<std::size_t>();
    p.eyebrow.interocular_indices = {brow.at("interocular_indices").at(0).get<std::size_t>(),
                                     brow.at("interocular_indices").at(1).get<std::size_t>()};
    p.calibration.mm_per_pixel = j.at("calibration").at("mm_per_pixel").get<double>();
    p.interocular_mm = j.at("calibration").at("interocular_mm").get<double>();
    p.landmark_source = j.at("landmark_source").get<std::string>();
    if (j.contains("f0") && !j["f0"].is_null()) {
        const auto& f = j["f0"];
        p.f0 = F0Config{f.at("fmin").get<double>(), f.at("fmax").get<double>(), f.at("frame_length").get<double>(),
                        f.at("hop").get<double>(), f.at("voicing_threshold").get<double>()};
    }
    if (j.contains("audio_source") && !j["audio_source"].is_null()) {
        p.audio_source = j["audio_source"].get<std::string>();
    }
    return p;
}

json to_json(const AnalysisResult& r) {
    json j = {
        {"label", r.label},
        {"pitch", motion_track_to_json(r.pitch)},
        {"eyebrow", motion_track_to_json(r.eyebrow)},
        {"pitch_first_frame", r.pitch_first_frame},
        {"eyebrow_first_frame", r.eyebrow_first_frame},
        {"provenance", provenance_to_json(r.provenance)},
    };
    j["strength_percent"] = r.strength_percent ? json(*r.strength_percent) : json(nullptr);
    j["contours"] = r.contours ? contours_json(*r.contours) : json(nullptr);
    return j;
}

AnalysisResult analysis_result_from_json(const json& j) {
    try {
        AnalysisResult r;
        r.label = j.at("label").get<std::string>();
        if (!j.at("strength_percent").is_null()) r.strength_percent = j["strength_percent"].get<double>();
        r.pitch = motion_track_from_json(j.at("pitch"));
        r.eyebrow = motion_track_from_json(j.at("eyebrow"));
        r.pitch_first_frame = j.at("pitch_first_frame").get<double>();
        r.eyebrow_first_frame = j.at("eyebrow_first_frame").get<double>();
        if (j.contains("contours") && !j["contours"].is_null()) {
            const auto& c = j["contours"];
            r.contours = ProsodyContours{motion_track_from_json(c.at("f0")), motion_track_from_json(c.at("intensity")),
                                         c.at("hop").get<double>()};
        }
        r.provenance = provenance_from_json(j.at("provenance"));
        if (r.pitch.empty() || r.eyebrow.empty()) throw InputError("analysis result has empty tracks");
        return r;
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed analysis result: ") + e.what());
    }
}

}  // namespace avprosody
