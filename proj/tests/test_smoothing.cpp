#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "verbtrack/errors.hpp"
#include "verbtrack/smoothing.hpp"

using namespace verbtrack;

namespace {

double rms(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        acc += d * d;
    }
    return std::sqrt(acc / a.size());
}

} // namespace

TEST_CASE("polynomials up to degree three are reproduced exactly") {
    SUBCASE("constant") {
        std::vector<double> sig(30, 5.25);
        auto out = smooth_signal(sig, 6);
        for (double v : out) CHECK(v == doctest::Approx(5.25).epsilon(1e-10));
    }
    SUBCASE("line") {
        std::vector<double> sig;
        for (int t = 0; t < 25; ++t) sig.push_back(2.0 * t - 7.0);
        auto out = smooth_signal(sig, 4);
        for (int t = 0; t < 25; ++t)
            CHECK(out[t] == doctest::Approx(sig[t]).epsilon(1e-9));
    }
    SUBCASE("cubic, any piece count") {
        // A C2 piecewise cubic with free knots still contains every global
        // cubic, so the least-squares residual must vanish.
        std::vector<double> sig;
        for (int t = 0; t < 40; ++t) {
            double x = t / 10.0;
            sig.push_back(0.5 * x * x * x - 2.0 * x * x + 3.0 * x - 1.0);
        }
        for (int pieces : {1, 3, 10}) {
            auto out = smooth_signal(sig, pieces);
            for (int t = 0; t < 40; ++t)
                CHECK(out[t] == doctest::Approx(sig[t]).epsilon(1e-7));
        }
    }
}

TEST_CASE("fitting suppresses zero-mean noise around a line") {
    std::mt19937_64 rng(42);
    std::normal_distribution<double> noise(0.0, 5.0);
    std::vector<double> truth, noisy;
    for (int t = 0; t < 80; ++t) {
        truth.push_back(3.0 * t + 11.0);
        noisy.push_back(truth.back() + noise(rng));
    }
    auto fit = smooth_signal(noisy, 10);
    double before = rms(noisy, truth);
    double after = rms(fit, truth);
    CHECK(after < 0.7 * before);
}

TEST_CASE("short signals") {
    SUBCASE("fewer than two samples is an error") {
        CHECK_THROWS_AS(smooth_signal({}, 5), TooShort);
        CHECK_THROWS_AS(smooth_signal({1.0}, 5), TooShort);
    }
    SUBCASE("two samples survive via the single-piece floor") {
        // One cubic span has four coefficients, so two samples are fit with
        // zero residual: the output reproduces the input.
        auto out = smooth_signal({4.0, 9.0}, 10);
        REQUIRE(out.size() == 2);
        CHECK(out[0] == doctest::Approx(4.0).epsilon(1e-9));
        CHECK(out[1] == doctest::Approx(9.0).epsilon(1e-9));
    }
}

TEST_CASE("the effective piece count is capped at a quarter of the samples") {
    // 12 samples cap the spline at 12/4 = 3 spans (6 coefficients), so a
    // request for 100 pieces cannot interpolate 12 noisy points exactly.
    std::mt19937_64 rng(7);
    std::normal_distribution<double> noise(0.0, 2.0);
    std::vector<double> sig;
    for (int t = 0; t < 12; ++t) sig.push_back(noise(rng));
    auto capped = smooth_signal(sig, 100);
    auto explicit3 = smooth_signal(sig, 3);
    double residual = rms(capped, sig);
    CHECK(residual > 1e-6); // genuinely smoothing, not interpolating
    for (int t = 0; t < 12; ++t)
        CHECK(capped[t] == doctest::Approx(explicit3[t]).epsilon(1e-9));
}

TEST_CASE("smooth_track fits each channel and leaves the rest alone") {
    Track track;
    track.video_id = "clip";
    track.class_label = "person";
    track.t0 = 3;
    track.coherence = 12.5;
    std::mt19937_64 rng(99);
    std::normal_distribution<double> noise(0.0, 1.5);
    for (int i = 0; i < 48; ++i) {
        DetectionBox b;
        b.frame = 3 + i;
        b.cx = 100.0 + 2.0 * i + noise(rng);
        b.cy = 50.0 + noise(rng);
        b.w = 20.0 + noise(rng);
        b.h = 40.0 + noise(rng);
        b.score = 0.1 * i;
        b.source_id = "det";
        track.boxes.push_back(b);
    }
    track.t1 = 3 + 47;

    Track fit = smooth_track(track, 10, 5);

    REQUIRE(fit.boxes.size() == track.boxes.size());
    CHECK(fit.video_id == "clip");
    CHECK(fit.t0 == 3);
    CHECK(fit.t1 == 50);
    CHECK(fit.coherence == 12.5);

    std::vector<double> cx, cy, w, h;
    for (const auto& b : track.boxes) {
        cx.push_back(b.cx);
        cy.push_back(b.cy);
        w.push_back(b.w);
        h.push_back(b.h);
    }
    auto scx = smooth_signal(cx, 10);
    auto scy = smooth_signal(cy, 10);
    auto sw = smooth_signal(w, 5);
    auto sh = smooth_signal(h, 5);
    for (std::size_t i = 0; i < fit.boxes.size(); ++i) {
        CHECK(fit.boxes[i].cx == doctest::Approx(scx[i]).epsilon(1e-12));
        CHECK(fit.boxes[i].cy == doctest::Approx(scy[i]).epsilon(1e-12));
        CHECK(fit.boxes[i].w == doctest::Approx(sw[i]).epsilon(1e-12));
        CHECK(fit.boxes[i].h == doctest::Approx(sh[i]).epsilon(1e-12));
        CHECK(fit.boxes[i].frame == track.boxes[i].frame);
        CHECK(fit.boxes[i].score == track.boxes[i].score);
        CHECK(fit.boxes[i].source_id == "det");
    }
}

TEST_CASE("smoothed box dimensions never collapse below one pixel") {
    Track track;
    track.t0 = 0;
    for (int i = 0; i < 20; ++i) {
        DetectionBox b;
        b.frame = i;
        b.cx = 10.0 * i;
        b.cy = 0.0;
        // A steep downward width trend: the line fit dips negative at the end.
        b.w = 40.0 - 2.5 * i;
        b.h = 0.4; // constant sub-pixel height gets floored everywhere
        track.boxes.push_back(b);
    }
    track.t1 = 19;
    Track fit = smooth_track(track, 4, 1);
    bool floored_w = false;
    for (const auto& b : fit.boxes) {
        CHECK(b.w >= 1.0);
        CHECK(b.h == doctest::Approx(1.0));
        if (b.w == 1.0) floored_w = true;
    }
    CHECK(floored_w);
}
