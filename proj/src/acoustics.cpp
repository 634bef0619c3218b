#include "avprosody/acoustics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace avprosody {

namespace {

struct Framing {
    std::size_t length = 0;
    std::size_t count = 0;
    double hop_samples = 0.0;

    std::size_t start(std::size_t k) const {
        return static_cast<std::size_t>(std::llround(static_cast<double>(k) * hop_samples));
    }
};

Framing framing(const AudioBuffer& audio, const F0Config& cfg) {
    validate(audio);
    validate(cfg, audio.sample_rate);
    Framing f;
    f.length = static_cast<std::size_t>(std::llround(cfg.frame_length * audio.sample_rate));
    f.hop_samples = cfg.hop * audio.sample_rate;
    if (audio.samples.size() < f.length) {
        throw InputError("audio of " + std::to_string(audio.samples.size()) + " samples is shorter than one " +
                         std::to_string(f.length) + "-sample analysis frame");
    }
    while (f.start(f.count) + f.length <= audio.samples.size()) ++f.count;
    return f;
}

double parabolic_minimum(std::span<const double> d, std::size_t tau) {
    if (tau == 0 || tau + 1 >= d.size()) return static_cast<double>(tau);
    const double left = d[tau - 1];
    const double mid = d[tau];
    const double right = d[tau + 1];
    const double denom = left - 2.0 * mid + right;
    if (!(denom > 0.0)) return static_cast<double>(tau);
    const double shift = 0.5 * (left - right) / denom;
    return static_cast<double>(tau) + std::clamp(shift, -1.0, 1.0);
}

}  // namespace

void validate(const AudioBuffer& audio) {
    if (!(audio.sample_rate > 0.0) || !std::isfinite(audio.sample_rate)) {
        throw InputError("audio sample rate must be positive");
    }
    for (std::size_t i = 0; i < audio.samples.size(); ++i) {
        if (!std::isfinite(audio.samples[i])) throw InputError("audio sample " + std::to_string(i) + " is not finite");
    }
}

void validate(const F0Config& cfg, double sample_rate) {
    if (!(cfg.fmin > 0.0 && cfg.fmin < cfg.fmax && cfg.fmax < sample_rate / 2.0)) {
        throw InputError("F0 range must satisfy 0 < fmin < fmax < sample_rate / 2");
    }
    if (!(cfg.frame_length >= 2.0 / cfg.fmin)) {
        throw InputError("F0 frame length must cover at least two periods of fmin");
    }
    if (!(cfg.hop > 0.0)) throw InputError("F0 hop must be positive");
    if (!(cfg.voicing_threshold > 0.0 && cfg.voicing_threshold < 1.0)) {
        throw InputError("voicing threshold must lie in (0, 1)");
    }
}

std::size_t frame_count(const AudioBuffer& audio, const F0Config& cfg) { return framing(audio, cfg).count; }

std::vector<double> normalized_difference(std::span<const double> frame, std::size_t max_lag) {
    if (frame.size() <= max_lag) throw InputError("frame too short for the requested lag range");
    const std::size_t window = frame.size() - max_lag;
    std::vector<double> d(max_lag + 1, 0.0);
    for (std::size_t tau = 1; tau <= max_lag; ++tau) {
        double acc = 0.0;
        for (std::size_t j = 0; j < window; ++j) {
            const double diff = frame[j] - frame[j + tau];
            acc += diff * diff;
        }
        d[tau] = acc;
    }
    d[0] = 1.0;
    double running = 0.0;
    for (std::size_t tau = 1; tau <= max_lag; ++tau) {
        running += d[tau];
        d[tau] = running > 0.0 ? d[tau] * static_cast<double>(tau) / running : 1.0;
    }
    return d;
}

MotionTrack f0_contour(const AudioBuffer& audio, const F0Config& cfg) {
    const Framing f = framing(audio, cfg);
    const auto min_lag = static_cast<std::size_t>(std::floor(audio.sample_rate / cfg.fmax));
    const auto max_lag = static_cast<std::size_t>(std::ceil(audio.sample_rate / cfg.fmin));
    const std::span<const double> samples(audio.samples);

    std::vector<double> f0(f.count, kGap);
    for (std::size_t k = 0; k < f.count; ++k) {
        const auto d = normalized_difference(samples.subspan(f.start(k), f.length), max_lag);

        std::size_t tau = std::max<std::size_t>(min_lag, 2);
        while (tau <= max_lag && d[tau] >= cfg.voicing_threshold) ++tau;
        if (tau > max_lag) continue;
        while (tau + 1 <= max_lag && d[tau + 1] < d[tau]) ++tau;

        const double period = parabolic_minimum(d, tau);
        const double estimate = audio.sample_rate / period;
        if (estimate >= cfg.fmin && estimate <= cfg.fmax) f0[k] = estimate;
    }
    return MotionTrack(1.0 / cfg.hop, std::move(f0), Unit::hertz, 0.0);
}

MotionTrack intensity_contour(const AudioBuffer& audio, const F0Config& cfg) {
    const Framing f = framing(audio, cfg);
    std::vector<double> db(f.count);
    for (std::size_t k = 0; k < f.count; ++k) {
        const auto begin = audio.samples.begin() + static_cast<std::ptrdiff_t>(f.start(k));
        double energy = 0.0;
        for (auto it = begin; it != begin + static_cast<std::ptrdiff_t>(f.length); ++it) energy += *it * *it;
        const double mean_square = energy / static_cast<double>(f.length);
        db[k] = mean_square > 0.0 ? std::max(10.0 * std::log10(mean_square), kIntensityFloorDb) : kIntensityFloorDb;
    }
    return MotionTrack(1.0 / cfg.hop, std::move(db), Unit::decibels);
}

ProsodyContours prosody_contours(const AudioBuffer& audio, const F0Config& cfg) {
    return {f0_contour(audio, cfg), intensity_contour(audio, cfg), cfg.hop};
}

}  // namespace avprosody
