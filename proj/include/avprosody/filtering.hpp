#pragma once

#include <span>
#include <vector>

#include "avprosody/core_types.hpp"

namespace avprosody {

/// Savitzky-Golay smoothing parameters. The defaults (13 frames, quadratic)
/// are the jitter-reduction setting used for landmark tracks.
struct SgConfig {
    int window = 13;
    int order = 2;

    friend bool operator==(const SgConfig&, const SgConfig&) = default;
};

void validate(const SgConfig& cfg);

/// Central-point smoothing weights, length cfg.window.
std::vector<double> sg_coefficients(const SgConfig& cfg);

/// Weights that evaluate the least-squares fit over a window at stencil
/// offset `offset` in [-(window-1)/2, (window-1)/2]. Offset 0 is sg_coefficients.
std::vector<double> sg_coefficients_at(const SgConfig& cfg, int offset);

/// Interior samples use the central weights; the (window-1)/2 samples at each
/// end are evaluated from the fit over the first/last full window.
std::vector<double> smooth_scalar(std::span<const double> values, const SgConfig& cfg);

/// Smooths the x and y series of all 68 landmarks independently.
LandmarkTrack smooth_landmarks(const LandmarkTrack& track, const SgConfig& cfg);

}  // namespace avprosody
