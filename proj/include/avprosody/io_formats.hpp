#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "avprosody/acoustics.hpp"
#include "avprosody/core_types.hpp"

namespace avprosody {

/// Landmark CSV layout:
///   # fps=<frames per second>          (optional; otherwise inferred from t)
///   frame,t,x0,y0,x1,y1,...,x67,y67
///   0,0,<136 coordinates>
/// Parse errors name the offending line.
LandmarkTrack parse_landmark_csv(std::istream& in, const std::string& source = "<stream>");
void write_landmark_csv(std::ostream& out, const LandmarkTrack& track);

nlohmann::json landmark_track_to_json(const LandmarkTrack& track);
LandmarkTrack landmark_track_from_json(const nlohmann::json& j);

/// Dispatches on extension: .json reads the JSON schema, anything else CSV.
LandmarkTrack read_landmark_file(const std::filesystem::path& path);
void write_landmark_file(const std::filesystem::path& path, const LandmarkTrack& track);

/// 16-bit PCM RIFF/WAVE; multi-channel input is averaged to mono.
AudioBuffer read_wav(const std::filesystem::path& path);
AudioBuffer parse_wav(std::istream& in);
void write_wav(const std::filesystem::path& path, const AudioBuffer& audio);

nlohmann::json motion_track_to_json(const MotionTrack& track);
MotionTrack motion_track_from_json(const nlohmann::json& j);

/// Relative paths inside a manifest resolve against the manifest's directory.
SessionManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const SessionManifest& manifest);
nlohmann::json manifest_to_json(const SessionManifest& manifest);
SessionManifest manifest_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace avprosody
