#include "avprosody/comparison.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace avprosody {

namespace {

constexpr double kBetaEpsilon = 1e-15;
constexpr int kBetaMaxIterations = 500;

// Modified Lentz evaluation of the incomplete beta continued fraction.
double beta_continued_fraction(double a, double b, double x) {
    constexpr double tiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kBetaMaxIterations; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kBetaEpsilon) return h;
    }
    throw NumericalError("incomplete beta continued fraction did not converge");
}

struct Moments {
    double sxx = 0.0;
    double syy = 0.0;
    double sxy = 0.0;
    std::size_t n = 0;
    bool x_constant = true;
    bool y_constant = true;
};

Moments joint_moments(std::span<const double> x, std::span<const double> y) {
    Moments m;
    double mx = 0.0;
    double my = 0.0;
    std::optional<std::size_t> first;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (is_gap(x[i]) || is_gap(y[i])) continue;
        if (!first) first = i;
        // exact comparison: the mean of identical values can round away from them
        m.x_constant = m.x_constant && x[i] == x[*first];
        m.y_constant = m.y_constant && y[i] == y[*first];
        mx += x[i];
        my += y[i];
        ++m.n;
    }
    if (m.n == 0) return m;
    mx /= static_cast<double>(m.n);
    my /= static_cast<double>(m.n);
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (is_gap(x[i]) || is_gap(y[i])) continue;
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        m.sxx += dx * dx;
        m.syy += dy * dy;
        m.sxy += dx * dy;
    }
    return m;
}

MotionTrack truncate(const MotionTrack& track, std::size_t length) {
    if (track.size() <= length) return track;
    return track.with_values(std::vector<double>(track.values().begin(),
                                                 track.values().begin() + static_cast<std::ptrdiff_t>(length)));
}

}  // namespace

MotionTrack resample(const MotionTrack& track, double target_fps) {
    if (track.size() < 2) throw InputError("cannot resample a track with fewer than 2 samples");
    if (!(target_fps > 0.0) || !std::isfinite(target_fps)) throw InputError("target fps must be positive");

    const double ratio = track.fps() / target_fps;  // source index advance per target sample
    const double last = static_cast<double>(track.size() - 1);
    const auto count = static_cast<std::size_t>(std::floor(last / ratio + 1e-9)) + 1;

    std::vector<double> out(count);
    for (std::size_t j = 0; j < count; ++j) {
        double pos = static_cast<double>(j) * ratio;
        const double nearest = std::round(pos);
        if (std::abs(pos - nearest) < 1e-9) pos = nearest;
        pos = std::min(pos, last);
        const auto i = static_cast<std::size_t>(std::floor(pos));
        const double frac = pos - static_cast<double>(i);
        if (frac == 0.0) {
            out[j] = track[i];
            continue;
        }
        const double lo = track[i];
        const double hi = track[i + 1];
        out[j] = (is_gap(lo) || is_gap(hi)) ? kGap : lo + frac * (hi - lo);
    }
    return MotionTrack(target_fps, std::move(out), track.unit(), track.rest_value());
}

std::pair<MotionTrack, MotionTrack> align(const MotionTrack& a, const MotionTrack& b) {
    MotionTrack ra = a;
    MotionTrack rb = b;
    if (a.fps() != b.fps()) {
        const double target = std::min(a.fps(), b.fps());
        if (a.fps() != target) ra = resample(a, target);
        if (b.fps() != target) rb = resample(b, target);
    }
    const std::size_t common = std::min(ra.size(), rb.size());
    return {truncate(ra, common), truncate(rb, common)};
}

double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw InputError("incomplete beta parameters must be positive");
    if (!(x >= 0.0 && x <= 1.0)) throw InputError("incomplete beta argument must lie in [0, 1]");
    if (x == 0.0 || x == 1.0) return x;
    const double log_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double correlation_p_value(double r, std::size_t n) {
    if (n < 3) throw InputError("p-value needs at least 3 samples");
    if (!std::isfinite(r)) throw NumericalError("correlation is not finite");
    const double r2 = std::min(r * r, 1.0);
    if (r2 >= 1.0) return 0.0;
    const double dof = static_cast<double>(n - 2);
    // t^2 = r^2 dof / (1 - r^2), so dof / (dof + t^2) reduces to 1 - r^2
    return incomplete_beta(0.5 * dof, 0.5, 1.0 - r2);
}

ComparisonReport pearson(const MotionTrack& a, const MotionTrack& b) {
    if (a.size() != b.size()) {
        throw InputError("pearson: track lengths differ (" + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()) + ")");
    }
    if (a.fps() != b.fps()) throw InputError("pearson: track frame rates differ");

    const Moments m = joint_moments(a.values(), b.values());
    if (m.n < 3) throw InputError("pearson: fewer than 3 jointly valid samples");
    if (m.x_constant || m.y_constant || m.sxx <= 0.0 || m.syy <= 0.0) throw NumericalError("pearson: correlation undefined for a constant track");

    ComparisonReport report;
    report.r = std::clamp(m.sxy / std::sqrt(m.sxx * m.syy), -1.0, 1.0);
    report.n = m.n;
    report.p_value = correlation_p_value(report.r, m.n);
    return report;
}

std::vector<CorrelationCell> correlation_matrix(const MotionTrack& real, const std::map<double, MotionTrack>& vh) {
    std::vector<CorrelationCell> cells;
    cells.reserve(vh.size());
    for (const auto& [strength, track] : vh) {
        CorrelationCell cell;
        cell.strength = strength;
        try {
            cell.resampled = real.fps() != track.fps();
            auto [ra, rb] = align(real, track);
            cell.report = pearson(ra, rb);
            cell.report->label_a = "real";
            cell.report->label_b = "strength " + std::to_string(static_cast<long long>(std::llround(strength))) + "%";
        } catch (const std::exception& e) {
            cell.report.reset();
            cell.error = e.what();
        }
        cells.push_back(std::move(cell));
    }
    return cells;
}

double magnitude(const MotionTrack& track, MagnitudeFeature feature, const std::optional<FocusInterval>& focus) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    double extremum = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < track.size(); ++i) {
        const double v = track[i];
        if (is_gap(v)) continue;
        if (feature == MagnitudeFeature::focal_extremum) {
            if (!focus) throw InputError("focal-extremum magnitude needs a focus interval");
            const double t = track.time_at(i);
            if (t < focus->start - 1e-9 || t > focus->end + 1e-9) continue;
            extremum = std::max(extremum, std::abs(v - track.rest_value()));
        }
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        any = true;
    }
    if (!any) throw InputError("magnitude: no valid samples in the analysis window");
    return feature == MagnitudeFeature::peak_to_peak ? hi - lo : extremum;
}

StrengthGain estimate_strength_gain(const std::map<double, MotionTrack>& tracks, MagnitudeFeature feature,
                                    const std::optional<FocusInterval>& focus) {
    if (tracks.size() < 2) throw InputError("strength gain needs at least 2 distinct strengths");

    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& [strength, track] : tracks) {
        xs.push_back(strength);
        ys.push_back(magnitude(track, feature, focus));
    }
    const auto n = static_cast<double>(xs.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (!(sxx > 0.0)) throw InputError("strength gain: strengths have zero variance");

    const double slope = sxy / sxx;
    StrengthGain gain;
    gain.per_50_delta = 50.0 * slope;
    gain.intercept = my - slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double e = ys[i] - (gain.intercept + slope * xs[i]);
        ss_res += e * e;
    }
    if (syy > 0.0) {
        gain.fit_r2 = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
    } else {
        gain.fit_r2 = 1.0;  // every magnitude identical and fitted exactly by a flat line
    }
    return gain;
}

}  // namespace avprosody
