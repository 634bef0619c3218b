#include "avprosody/io_formats.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace avprosody {

using nlohmann::json;

namespace {

constexpr std::size_t kCsvColumns = 2 + 2 * kLandmarkCount;

std::vector<std::string> expected_header() {
    std::vector<std::string> names{"frame", "t"};
    for (std::size_t i = 0; i < kLandmarkCount; ++i) {
        names.push_back("x" + std::to_string(i));
        names.push_back("y" + std::to_string(i));
    }
    return names;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> cells;
    std::size_t begin = 0;
    while (true) {
        const auto end = line.find(sep, begin);
        cells.push_back(line.substr(begin, end == std::string_view::npos ? std::string_view::npos : end - begin));
        if (end == std::string_view::npos) break;
        begin = end + 1;
    }
    return cells;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return value;
}

[[noreturn]] void csv_error(const std::string& source, std::size_t line, const std::string& what) {
    throw InputError(fmt::format("{}:{}: {}", source, line, what));
}

// shortest representation that round-trips exactly
std::string num(double v) { return fmt::format("{}", v); }

std::uint16_t read_u16(const unsigned char* p) { return static_cast<std::uint16_t>(p[0] | (p[1] << 8)); }
std::uint32_t read_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>(v >> 8));
}
void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    if (path.is_relative() && !base.empty()) return base / path;
    return path;
}

}  // namespace

LandmarkTrack parse_landmark_csv(std::istream& in, const std::string& source) {
    const auto header_names = expected_header();
    std::optional<double> declared_fps;
    bool header_seen = false;
    LandmarkTrack track;
    std::vector<std::size_t> row_lines;

    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = trim(raw);
        if (line_no == 1 && line.size() >= 3 && line.substr(0, 3) == "\xEF\xBB\xBF") line.remove_prefix(3);
        if (line.empty()) continue;
        if (line.front() == '#') {
            auto body = trim(line.substr(1));
            if (body.substr(0, 3) == "fps") {
                body = trim(body.substr(3));
                if (!body.empty() && (body.front() == '=' || body.front() == ':')) body.remove_prefix(1);
                const auto fps = parse_double(body);
                if (!fps || !(*fps > 0.0)) csv_error(source, line_no, "invalid fps declaration");
                declared_fps = fps;
            }
            continue;
        }

        const auto cells = split(line, ',');
        if (!header_seen) {
            for (std::size_t i = 0; i < header_names.size(); ++i) {
                if (i >= cells.size()) {
                    csv_error(source, line_no,
                              fmt::format("malformed header: missing column '{}' ({} of {} columns present)",
                                          header_names[i], cells.size(), kCsvColumns));
                }
                if (trim(cells[i]) != header_names[i]) {
                    csv_error(source, line_no,
                              fmt::format("malformed header: column {} is '{}', expected '{}'", i + 1,
                                          std::string(trim(cells[i])), header_names[i]));
                }
            }
            if (cells.size() > kCsvColumns) {
                csv_error(source, line_no, fmt::format("malformed header: {} columns, expected {}", cells.size(),
                                                       kCsvColumns));
            }
            header_seen = true;
            continue;
        }

        if (cells.size() != kCsvColumns) {
            std::string detail;
            if (cells.size() < kCsvColumns) detail = fmt::format(" (missing column '{}')", header_names[cells.size()]);
            csv_error(source, line_no,
                      fmt::format("wrong column count: expected {}, got {}{}", kCsvColumns, cells.size(), detail));
        }
        LandmarkFrame frame;
        const auto index = parse_double(cells[0]);
        if (!index || *index != static_cast<double>(track.frames.size())) {
            csv_error(source, line_no,
                      fmt::format("frame column must count up from 0 (expected {})", track.frames.size()));
        }
        const auto t = parse_double(cells[1]);
        if (!t || !std::isfinite(*t)) csv_error(source, line_no, "non-finite value in column 't'");
        frame.t = *t;
        frame.points.resize(kLandmarkCount);
        for (std::size_t i = 0; i < kLandmarkCount; ++i) {
            const auto x = parse_double(cells[2 + 2 * i]);
            const auto y = parse_double(cells[3 + 2 * i]);
            if (!x || !std::isfinite(*x)) {
                csv_error(source, line_no, fmt::format("non-finite value in column '{}'", header_names[2 + 2 * i]));
            }
            if (!y || !std::isfinite(*y)) {
                csv_error(source, line_no, fmt::format("non-finite value in column '{}'", header_names[3 + 2 * i]));
            }
            frame.points[i] = {*x, *y};
        }
        track.frames.push_back(std::move(frame));
        row_lines.push_back(line_no);
    }

    if (!header_seen) throw InputError(source + ": missing header line");
    if (track.frames.empty()) throw InputError(source + ": no landmark rows");

    if (declared_fps) {
        track.fps = *declared_fps;
    } else if (track.frames.size() >= 2 && track.frames[1].t > track.frames[0].t) {
        track.fps = 1.0 / (track.frames[1].t - track.frames[0].t);
    } else {
        throw InputError(source + ": cannot determine fps (add a '# fps=<value>' line)");
    }

    try {
        validate_track(track);
    } catch (const TrackValidationError& e) {
        csv_error(source, row_lines[std::min(e.frame(), row_lines.size() - 1)],
                  fmt::format("inconsistent track: {}", e.what()));
    }
    return track;
}

void write_landmark_csv(std::ostream& out, const LandmarkTrack& track) {
    validate_track(track);
    out << "# fps=" << num(track.fps) << '\n';
    const auto names = expected_header();
    for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
    out << '\n';
    for (std::size_t k = 0; k < track.frames.size(); ++k) {
        const auto& frame = track.frames[k];
        std::string row = fmt::format("{},{}", k, num(frame.t));
        for (const auto& p : frame.points) {
            row += ',';
            row += num(p.x);
            row += ',';
            row += num(p.y);
        }
        out << row << '\n';
    }
}

json landmark_track_to_json(const LandmarkTrack& track) {
    validate_track(track);
    json frames = json::array();
    for (std::size_t k = 0; k < track.frames.size(); ++k) {
        json points = json::array();
        for (const auto& p : track.frames[k].points) points.push_back({p.x, p.y});
        frames.push_back({{"frame", k}, {"t", track.frames[k].t}, {"points", std::move(points)}});
    }
    return {{"fps", track.fps}, {"frames", std::move(frames)}};
}

LandmarkTrack landmark_track_from_json(const json& j) {
    try {
        LandmarkTrack track;
        track.fps = j.at("fps").get<double>();
        for (const auto& f : j.at("frames")) {
            LandmarkFrame frame;
            frame.t = f.at("t").get<double>();
            for (const auto& p : f.at("points")) {
                if (!p.is_array() || p.size() != 2) throw InputError("landmark point must be an [x, y] pair");
                frame.points.push_back({p[0].get<double>(), p[1].get<double>()});
            }
            track.frames.push_back(std::move(frame));
        }
        validate_track(track);
        return track;
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed landmark JSON: ") + e.what());
    }
}

LandmarkTrack read_landmark_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open landmark file '" + path.string() + "'");
    if (path.extension() == ".json") {
        try {
            return landmark_track_from_json(json::parse(in));
        } catch (const json::exception& e) {
            throw InputError(path.string() + ": " + e.what());
        }
    }
    return parse_landmark_csv(in, path.string());
}

void write_landmark_file(const std::filesystem::path& path, const LandmarkTrack& track) {
    if (path.extension() == ".json") {
        write_text_file(path, landmark_track_to_json(track).dump(1) + "\n");
        return;
    }
    std::ostringstream out;
    write_landmark_csv(out, track);
    write_text_file(path, out.str());
}

AudioBuffer parse_wav(std::istream& in) {
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto* data = reinterpret_cast<const unsigned char*>(bytes.data());
    if (bytes.size() < 12 || std::memcmp(data, "RIFF", 4) != 0 || std::memcmp(data + 8, "WAVE", 4) != 0) {
        throw InputError("not a RIFF/WAVE file");
    }

    std::uint16_t format = 0;
    std::uint16_t channels = 0;
    std::uint32_t sample_rate = 0;
    std::uint16_t bits = 0;
    const unsigned char* pcm = nullptr;
    std::size_t pcm_size = 0;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const auto* chunk = data + pos;
        const std::uint32_t size = read_u32(chunk + 4);
        const std::size_t body = pos + 8;
        const std::size_t available = std::min<std::size_t>(size, bytes.size() - body);
        if (std::memcmp(chunk, "fmt ", 4) == 0) {
            if (available < 16) throw InputError("WAV fmt chunk too short");
            format = read_u16(data + body);
            channels = read_u16(data + body + 2);
            sample_rate = read_u32(data + body + 4);
            bits = read_u16(data + body + 14);
            if (format == 0xFFFE && available >= 26) format = read_u16(data + body + 24);  // extensible sub-format
        } else if (std::memcmp(chunk, "data", 4) == 0) {
            pcm = data + body;
            pcm_size = available;
        }
        pos = body + size + (size & 1u);
    }

    if (channels == 0) throw InputError("WAV file has no fmt chunk");
    if (!pcm) throw InputError("WAV file has no data chunk");
    if (format != 1 || bits != 16) {
        throw InputError(fmt::format("unsupported WAV encoding (format {}, {} bits); only 16-bit PCM is read", format,
                                     bits));
    }
    if (sample_rate == 0) throw InputError("WAV sample rate is zero");

    const std::size_t frame_bytes = 2u * channels;
    const std::size_t frames = pcm_size / frame_bytes;
    AudioBuffer audio;
    audio.sample_rate = sample_rate;
    audio.samples.resize(frames);
    for (std::size_t i = 0; i < frames; ++i) {
        double sum = 0.0;
        for (std::size_t c = 0; c < channels; ++c) {
            sum += static_cast<std::int16_t>(read_u16(pcm + i * frame_bytes + 2 * c)) / 32768.0;
        }
        audio.samples[i] = sum / channels;
    }
    return audio;
}

AudioBuffer read_wav(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open audio file '" + path.string() + "'");
    try {
        return parse_wav(in);
    } catch (const InputError& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

void write_wav(const std::filesystem::path& path, const AudioBuffer& audio) {
    validate(audio);
    const auto data_bytes = static_cast<std::uint32_t>(2 * audio.samples.size());
    const auto rate = static_cast<std::uint32_t>(std::lround(audio.sample_rate));
    std::string out;
    out.reserve(44 + data_bytes);
    out += "RIFF";
    put_u32(out, 36 + data_bytes);
    out += "WAVEfmt ";
    put_u32(out, 16);
    put_u16(out, 1);
    put_u16(out, 1);
    put_u32(out, rate);
    put_u32(out, rate * 2);
    put_u16(out, 2);
    put_u16(out, 16);
    out += "data";
    put_u32(out, data_bytes);
    for (double s : audio.samples) {
        const auto q = static_cast<std::int16_t>(std::lround(std::clamp(s, -1.0, 32767.0 / 32768.0) * 32768.0));
        put_u16(out, static_cast<std::uint16_t>(q));
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw InputError("cannot write '" + path.string() + "'");
    file.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!file) throw InputError("failed writing '" + path.string() + "'");
}

json motion_track_to_json(const MotionTrack& track) {
    json values = json::array();
    for (double v : track.values()) {
        if (is_gap(v)) {
            values.push_back(nullptr);
        } else {
            values.push_back(v);
        }
    }
    return {{"fps", track.fps()},
            {"unit", std::string(to_string(track.unit()))},
            {"rest_value", track.rest_value()},
            {"values", std::move(values)}};
}

MotionTrack motion_track_from_json(const json& j) {
    try {
        std::vector<double> values;
        for (const auto& v : j.at("values")) values.push_back(v.is_null() ? kGap : v.get<double>());
        return MotionTrack(j.at("fps").get<double>(), std::move(values),
                           unit_from_string(j.at("unit").get<std::string>()), j.at("rest_value").get<double>());
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed motion track JSON: ") + e.what());
    }
}

json manifest_to_json(const SessionManifest& m) {
    json j = {{"label", m.label}, {"landmark_path", m.landmark_path.generic_string()}, {"interocular_mm", m.interocular_mm}};
    j["audio_path"] = m.audio_path ? json(m.audio_path->generic_string()) : json(nullptr);
    j["strength_percent"] = m.strength_percent ? json(*m.strength_percent) : json(nullptr);
    if (m.image_width) j["image_width"] = *m.image_width;
    if (m.image_height) j["image_height"] = *m.image_height;
    return j;
}

SessionManifest manifest_from_json(const json& j, const std::filesystem::path& base_dir) {
    try {
        SessionManifest m;
        m.label = j.value("label", std::string{});
        m.landmark_path = resolve(base_dir, j.at("landmark_path").get<std::string>());
        if (j.contains("audio_path") && !j["audio_path"].is_null()) {
            m.audio_path = resolve(base_dir, j["audio_path"].get<std::string>());
        }
        m.interocular_mm = j.at("interocular_mm").get<double>();
        if (j.contains("strength_percent") && !j["strength_percent"].is_null()) {
            m.strength_percent = j["strength_percent"].get<double>();
        }
        if (j.contains("image_width")) m.image_width = j["image_width"].get<int>();
        if (j.contains("image_height")) m.image_height = j["image_height"].get<int>();
        validate_manifest(m);
        return m;
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed manifest: ") + e.what());
    }
}

SessionManifest read_manifest(const std::filesystem::path& path) {
    const auto j = read_json_file(path);
    try {
        return manifest_from_json(j, path.parent_path());
    } catch (const InputError& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

void write_manifest(const std::filesystem::path& path, const SessionManifest& manifest) {
    write_text_file(path, manifest_to_json(manifest).dump(2) + "\n");
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw InputError("failed writing '" + path.string() + "'");
}

}  // namespace avprosody
