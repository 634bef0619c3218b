#include "avprosody/filtering.hpp"

#include <Eigen/Dense>

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>

namespace avprosody {

namespace {

using WeightTable = Eigen::MatrixXd;  // row r: weights evaluating the fit at offset r - half

// Solves the least-squares normal equations on the integer stencil once per
// (window, order). The stencil is scaled to [-1, 1] for conditioning.
WeightTable compute_weight_table(const SgConfig& cfg) {
    const int half = (cfg.window - 1) / 2;
    const int terms = cfg.order + 1;
    const double scale = half > 0 ? static_cast<double>(half) : 1.0;

    Eigen::MatrixXd design(cfg.window, terms);
    for (int i = 0; i < cfg.window; ++i) {
        const double u = (i - half) / scale;
        double power = 1.0;
        for (int k = 0; k < terms; ++k) {
            design(i, k) = power;
            power *= u;
        }
    }

    const Eigen::MatrixXd normal = design.transpose() * design;
    const Eigen::LDLT<Eigen::MatrixXd> solver(normal);
    // fitted values at every stencil position = design * N^-1 * design^T * y
    const Eigen::MatrixXd hat = design * solver.solve(design.transpose());
    return hat;
}

const WeightTable& weight_table(const SgConfig& cfg) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::unique_ptr<WeightTable>> cache;

    std::lock_guard lock(mutex);
    auto& slot = cache[{cfg.window, cfg.order}];
    if (!slot) slot = std::make_unique<WeightTable>(compute_weight_table(cfg));
    return *slot;
}

}  // namespace

void validate(const SgConfig& cfg) {
    if (cfg.window < 3 || cfg.window % 2 == 0) {
        throw InputError("Savitzky-Golay window must be an odd integer >= 3, got " + std::to_string(cfg.window));
    }
    if (cfg.order < 0 || cfg.order >= cfg.window) {
        throw InputError("Savitzky-Golay order must satisfy 0 <= order < window, got order " +
                         std::to_string(cfg.order) + " for window " + std::to_string(cfg.window));
    }
}

std::vector<double> sg_coefficients(const SgConfig& cfg) { return sg_coefficients_at(cfg, 0); }

std::vector<double> sg_coefficients_at(const SgConfig& cfg, int offset) {
    validate(cfg);
    const int half = (cfg.window - 1) / 2;
    if (offset < -half || offset > half) {
        throw InputError("stencil offset " + std::to_string(offset) + " outside window");
    }
    const auto& table = weight_table(cfg);
    std::vector<double> weights(static_cast<std::size_t>(cfg.window));
    for (int j = 0; j < cfg.window; ++j) weights[static_cast<std::size_t>(j)] = table(offset + half, j);
    return weights;
}

std::vector<double> smooth_scalar(std::span<const double> values, const SgConfig& cfg) {
    validate(cfg);
    const auto n = values.size();
    const auto window = static_cast<std::size_t>(cfg.window);
    if (n < window) {
        throw InputError("series of length " + std::to_string(n) + " is shorter than the smoothing window " +
                         std::to_string(window));
    }
    const auto half = window / 2;
    const auto& table = weight_table(cfg);

    // Weights sum to one, so smoothing deviations from the evaluated sample
    // gives the same fit while keeping constant stretches bit-exact.
    auto apply = [&](std::size_t row, std::size_t start) {
        const double ref = values[start + row];
        double acc = 0.0;
        for (std::size_t j = 0; j < window; ++j) {
            acc += table(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(j)) * (values[start + j] - ref);
        }
        return ref + acc;
    };

    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (i < half) {
            out[i] = apply(i, 0);
        } else if (i + half >= n) {
            out[i] = apply(window - (n - i), n - window);
        } else {
            out[i] = apply(half, i - half);
        }
    }
    return out;
}

LandmarkTrack smooth_landmarks(const LandmarkTrack& track, const SgConfig& cfg) {
    validate_track(track);
    validate(cfg);
    const auto n = track.frames.size();
    if (n < static_cast<std::size_t>(cfg.window)) {
        throw InputError("track of " + std::to_string(n) + " frames is shorter than the smoothing window " +
                         std::to_string(cfg.window));
    }

    LandmarkTrack out = track;
    std::vector<double> xs(n);
    std::vector<double> ys(n);
    for (std::size_t p = 0; p < kLandmarkCount; ++p) {
        for (std::size_t k = 0; k < n; ++k) {
            xs[k] = track.frames[k].points[p].x;
            ys[k] = track.frames[k].points[p].y;
        }
        const auto sx = smooth_scalar(xs, cfg);
        const auto sy = smooth_scalar(ys, cfg);
        for (std::size_t k = 0; k < n; ++k) out.frames[k].points[p] = {sx[k], sy[k]};
    }
    return out;
}

}  // namespace avprosody
