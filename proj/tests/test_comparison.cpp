#include <doctest.h>

#include <random>

#include "avprosody/comparison.hpp"
#include "avprosody/synthesis.hpp"
#include "support.hpp"

using namespace avprosody;

namespace {

MotionTrack deg(std::vector<double> v, double fps = 30.0) { return MotionTrack(fps, std::move(v), Unit::degrees); }

MotionTrack random_track(std::mt19937_64& rng, std::size_t n, double fps = 30.0) {
    std::normal_distribution<double> nd(0.0, 3.0);
    std::vector<double> v(n);
    for (double& x : v) x = nd(rng);
    return deg(std::move(v), fps);
}

}  // namespace

TEST_CASE("resample identity and affine exactness") {
    std::mt19937_64 rng(1);
    const auto t = random_track(rng, 40);
    const auto same = resample(t, 30.0);
    REQUIRE(same.size() == t.size());
    for (std::size_t i = 0; i < t.size(); ++i) CHECK(std::abs(same[i] - t[i]) < 1e-12);

    std::vector<double> ramp(61);
    for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = 2.0 + 0.5 * static_cast<double>(i) / 60.0;
    const auto r = deg(ramp, 60.0);
    for (double fps : {7.0, 25.0, 29.97, 48.0, 100.0}) {
        const auto out = resample(r, fps);
        CHECK(out.fps() == fps);
        for (std::size_t i = 0; i < out.size(); ++i) {
            CHECK(out.time_at(i) <= r.duration() + 1e-9);
            CHECK(std::abs(out[i] - (2.0 + 0.5 * out.time_at(i))) < 1e-12);
        }
        const auto twice = resample(out, fps);
        for (std::size_t i = 0; i < out.size(); ++i) CHECK(std::abs(twice[i] - out[i]) < 1e-12);
    }
    CHECK_THROWS_AS(resample(deg({1.0}), 10.0), InputError);
}

TEST_CASE("resample propagates gaps") {
    const auto t = deg({0.0, 1.0, kGap, 3.0, 4.0}, 4.0);
    const auto out = resample(t, 8.0);
    REQUIRE(out.size() == 9);
    CHECK(out[2] == doctest::Approx(1.0));
    CHECK(is_gap(out[3]));
    CHECK(is_gap(out[4]));
    CHECK(is_gap(out[5]));
    CHECK(out[6] == doctest::Approx(3.0));
}

TEST_CASE("align to the lower rate and common span") {
    std::vector<double> a(61), b(31);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = static_cast<double>(i) / 60.0;
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = static_cast<double>(i) / 25.0;
    const auto [x, y] = align(deg(a, 60.0), deg(b, 25.0));
    CHECK(x.fps() == 25.0);
    CHECK(y.fps() == 25.0);
    CHECK(x.size() == y.size());
    CHECK(x.size() == 26);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(x[i] - y[i]) < 1e-12);
}

TEST_CASE("pearson oracles") {
    const auto x = deg({1, 2, 3, 4});
    const auto y = deg({1, 2, 3, 5});
    const auto rep = pearson(x, y);
    CHECK(std::abs(rep.r - 0.98270762982399085) < 1e-14);
    CHECK(rep.n == 4);

    std::mt19937_64 rng(9);
    const auto t = random_track(rng, 50);
    CHECK(pearson(t, t).r == 1.0);
    std::vector<double> neg(t.values().begin(), t.values().end());
    for (double& v : neg) v = -v;
    CHECK(pearson(t, deg(neg)).r == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(pearson(t, t).p_value == 0.0);
}

TEST_CASE("pearson properties") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> coef(-50.0, 50.0);
    for (int trial = 0; trial < 100; ++trial) {
        const auto a = random_track(rng, 20 + trial);
        const auto b = random_track(rng, 20 + trial);
        CHECK(pearson(a, b).r == pearson(b, a).r);
        CHECK(pearson(a, b).p_value == pearson(b, a).p_value);

        double k = coef(rng);
        if (std::abs(k) < 1e-3) k = 1.0;
        const double off = coef(rng);
        std::vector<double> affine(a.values().begin(), a.values().end());
        for (double& v : affine) v = k * v + off;
        CHECK(std::abs(pearson(a, deg(affine)).r - (k > 0 ? 1.0 : -1.0)) < 1e-12);
    }
}

TEST_CASE("pearson pairwise deletion and errors") {
    const auto a = deg({1.0, 2.0, kGap, 4.0, 5.0, 6.0});
    const auto b = deg({2.0, kGap, 6.0, 8.0, 10.0, 12.0});
    const auto rep = pearson(a, b);
    CHECK(rep.n == 4);
    CHECK(rep.r == doctest::Approx(1.0));

    CHECK_THROWS_AS(pearson(deg({1, 2, 3}), deg({1, 2})), InputError);
    CHECK_THROWS_AS(pearson(deg({1, 2, 3}), deg({1, 2, 3}, 25.0)), InputError);
    CHECK_THROWS_AS(pearson(deg({1, 2, kGap}), deg({1, 2, 3})), InputError);
    CHECK_THROWS_AS(pearson(deg({1, 1, 1, 1}), deg({1, 2, 3, 4})), NumericalError);
}

TEST_CASE("incomplete beta and p-values") {
    CHECK(incomplete_beta(1.0, 1.0, 0.3) == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(incomplete_beta(2.0, 3.0, 0.0) == 0.0);
    CHECK(incomplete_beta(2.0, 3.0, 1.0) == 1.0);
    // I_x(a,1) = x^a
    CHECK(incomplete_beta(3.5, 1.0, 0.6) == doctest::Approx(std::pow(0.6, 3.5)).epsilon(1e-13));
    // symmetry I_x(a,b) = 1 - I_{1-x}(b,a)
    CHECK(incomplete_beta(4.0, 9.0, 0.27) == doctest::Approx(1.0 - incomplete_beta(9.0, 4.0, 0.73)).epsilon(1e-13));

    // high-precision reference values
    CHECK(correlation_p_value(0.8, 50) == doctest::Approx(3.1802898550106652e-12).epsilon(1e-9));
    CHECK(correlation_p_value(0.5, 10) == doctest::Approx(0.14111328125).epsilon(1e-12));
    CHECK(correlation_p_value(0.3, 30) == doctest::Approx(0.10724594805795435).epsilon(1e-10));
    CHECK(correlation_p_value(0.0, 30) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(correlation_p_value(1.0, 30) == 0.0);
    CHECK(correlation_p_value(-1.0, 30) == 0.0);
    CHECK(correlation_p_value(-0.5, 10) == correlation_p_value(0.5, 10));
    CHECK_THROWS_AS(correlation_p_value(0.5, 2), InputError);
}

TEST_CASE("p-value monotonicity") {
    for (std::size_t n : {5u, 10u, 30u, 100u}) {
        double prev = 1.1;
        for (double r = 0.0; r < 0.99; r += 0.05) {
            const double p = correlation_p_value(r, n);
            CHECK(p < prev);
            prev = p;
        }
    }
    for (double r : {0.1, 0.4, 0.8}) {
        double prev = 1.1;
        for (std::size_t n = 4; n < 200; n += 7) {
            const double p = correlation_p_value(r, n);
            CHECK(p < prev);
            prev = p;
        }
    }
}

TEST_CASE("correlation matrix") {
    std::mt19937_64 rng(4);
    const auto real = random_track(rng, 60);
    std::map<double, MotionTrack> vh;
    for (double s : {50.0, 100.0, 150.0, 200.0}) vh.emplace(s, apply_strength(real, {s}));
    vh.emplace(0.0, apply_strength(real, {0.0}));
    const auto cells = correlation_matrix(real, vh);
    REQUIRE(cells.size() == 5);
    CHECK(cells[0].strength == 0.0);
    CHECK_FALSE(cells[0].report.has_value());
    CHECK(cells[0].error.find("constant") != std::string::npos);
    for (std::size_t i = 1; i < cells.size(); ++i) {
        REQUIRE(cells[i].report.has_value());
        CHECK(std::abs(cells[i].report->r - 1.0) < 1e-12);
        CHECK_FALSE(cells[i].resampled);
    }
    CHECK(correlation_matrix(real, {}).empty());

    const auto fast = resample(real, 60.0);
    const auto mixed = correlation_matrix(real, {{100.0, fast}});
    REQUIRE(mixed[0].report.has_value());
    CHECK(mixed[0].resampled);
}

TEST_CASE("magnitude features") {
    const auto t = MotionTrack(10.0, {0.0, 1.0, -4.0, 2.0, 0.5, -1.0}, Unit::degrees, 0.0);
    CHECK(magnitude(t, MagnitudeFeature::peak_to_peak) == 6.0);
    CHECK(magnitude(t, MagnitudeFeature::focal_extremum, FocusInterval{0.15, 0.35}) == 4.0);
    CHECK(magnitude(t, MagnitudeFeature::focal_extremum, FocusInterval{0.25, 0.45}) == 2.0);
    CHECK_THROWS_AS(magnitude(t, MagnitudeFeature::focal_extremum), InputError);
}

TEST_CASE("strength gain") {
    std::map<double, MotionTrack> exact;
    for (double s : {50.0, 100.0, 150.0, 200.0}) exact.emplace(s, deg({0.0, 0.04 * s, 0.0}));
    const auto g = estimate_strength_gain(exact);
    CHECK(std::abs(g.per_50_delta - 2.0) < 1e-12);
    CHECK(std::abs(g.fit_r2 - 1.0) < 1e-12);
    CHECK(std::abs(g.intercept) < 1e-12);

    FocusStimulusSpec spec;
    spec.pre_raise_amp = 0.0;
    spec.focal_pitch_amp = 3.5;
    spec.brow_raise_amp = 0.0;
    const auto base = synth_focus_motion(spec).pitch;
    std::map<double, MotionTrack> family;
    for (double s : {50.0, 100.0, 150.0, 200.0}) family.emplace(s, apply_strength(base, {s}));
    CHECK(std::abs(estimate_strength_gain(family).per_50_delta - 1.75) < 1e-9);
    const FocusInterval focus{spec.focus_start, spec.focus_end};
    CHECK(std::abs(estimate_strength_gain(family, MagnitudeFeature::focal_extremum, focus).per_50_delta - 1.75) <
          1e-9);

    CHECK_THROWS_AS(estimate_strength_gain({{100.0, base}}), InputError);
}
