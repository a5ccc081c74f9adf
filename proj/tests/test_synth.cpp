#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "verbtrack/errors.hpp"
#include "verbtrack/synth.hpp"

using namespace verbtrack;

namespace {

ParticipantScript two_phase() {
    // 10 frames at vx=2, then 5 frames of vy=1 with ay=2.
    ParticipantScript p;
    p.name = "agent";
    p.class_label = "person";
    p.x0 = 100.0;
    p.y0 = 200.0;
    p.w = 20.0;
    p.h = 40.0;
    p.segments.push_back(MotionSegment{10, 2.0, 0.0, 0.0, 0.0});
    p.segments.push_back(MotionSegment{5, 0.0, 1.0, 0.0, 2.0});
    return p;
}

bool same_box(const DetectionBox& a, const DetectionBox& b) {
    return a.frame == b.frame && a.cx == b.cx && a.cy == b.cy && a.w == b.w &&
           a.h == b.h && a.score == b.score && a.source_id == b.source_id &&
           a.appearance.has_value() == b.appearance.has_value();
}

} // namespace

TEST_CASE("scripted positions follow piecewise closed forms") {
    auto p = two_phase();
    CHECK(scripted_position(p, 0).x == doctest::Approx(100.0));
    CHECK(scripted_position(p, 0).y == doctest::Approx(200.0));
    CHECK(scripted_position(p, 7).x == doctest::Approx(114.0));
    CHECK(scripted_position(p, 10).x == doctest::Approx(120.0));
    CHECK(scripted_position(p, 10).y == doctest::Approx(200.0));
    // Two frames into the second segment: y += 1*2 + 0.5*2*4.
    CHECK(scripted_position(p, 12).x == doctest::Approx(120.0));
    CHECK(scripted_position(p, 12).y == doctest::Approx(206.0));
    CHECK(scripted_position(p, 15).y == doctest::Approx(230.0));
    // Past the last segment the participant holds its final position.
    CHECK(scripted_position(p, 40).x == doctest::Approx(120.0));
    CHECK(scripted_position(p, 40).y == doctest::Approx(230.0));
}

TEST_CASE("interior frames keep the derivative stencil inside one segment") {
    auto p = two_phase();
    const int fc = 16;
    for (int t = 0; t <= 8; ++t) CHECK(interior_frame(p, t, fc));
    CHECK_FALSE(interior_frame(p, 9, fc));  // stencil straddles the seam
    for (int t = 10; t <= 13; ++t) CHECK(interior_frame(p, t, fc));
    CHECK_FALSE(interior_frame(p, 14, fc)); // t+2 runs off the video
    CHECK_FALSE(interior_frame(p, -1, fc));
    CHECK_FALSE(interior_frame(p, 15, fc));
}

TEST_CASE("a noiseless render reproduces the script exactly") {
    SceneScript script;
    script.video_id = "v";
    script.verb = "run";
    script.frame_count = 20;
    script.participants.push_back(two_phase());

    NoiseConfig quiet; // all rates zero
    auto scene = generate_scene(script, quiet);

    REQUIRE(scene.detections.frame_count == 20);
    REQUIRE(scene.detections.sources.size() == 1);
    CHECK(scene.detections.sources[0].source_id == "person-det");
    CHECK(scene.detections.sources[0].class_label == "person");
    CHECK(scene.detections.sources[0].learned_threshold == 0.0);

    REQUIRE(scene.ground_truth.size() == 1);
    const Track& gt = scene.ground_truth[0];
    CHECK(gt.t0 == 0);
    CHECK(gt.t1 == 19);
    REQUIRE(gt.boxes.size() == 20);

    for (int t = 0; t < 20; ++t) {
        REQUIRE(scene.detections.frames[t].size() == 1);
        const DetectionBox& box = scene.detections.frames[t][0];
        Point pos = scripted_position(script.participants[0], t);
        CHECK(box.cx == doctest::Approx(pos.x).epsilon(1e-12));
        CHECK(box.cy == doctest::Approx(pos.y).epsilon(1e-12));
        CHECK(box.w == 20.0);
        CHECK(box.h == 40.0);
        CHECK(box.projected_depth == 0);
        CHECK_FALSE(box.appearance.has_value());
        // Ground truth carries the exact same geometry at unit score.
        CHECK(gt.boxes[t].cx == box.cx);
        CHECK(gt.boxes[t].score == 1.0);
    }
}

TEST_CASE("rendering is deterministic in the noise seed") {
    auto script = make_archetype_script("chase", 3);
    script.video_id = "chase-3";
    NoiseConfig noise;
    noise.jitter = 3.0;
    noise.size_jitter = 2.0;
    noise.fp_rate = 10.0;
    noise.fn_rate = 0.2;
    noise.seed = 555;
    noise.supply_appearance = true;

    auto a = generate_scene(script, noise);
    auto b = generate_scene(script, noise);
    REQUIRE(a.detections.frame_count == b.detections.frame_count);
    for (int t = 0; t < a.detections.frame_count; ++t) {
        REQUIRE(a.detections.frames[t].size() == b.detections.frames[t].size());
        for (std::size_t i = 0; i < a.detections.frames[t].size(); ++i)
            CHECK(same_box(a.detections.frames[t][i], b.detections.frames[t][i]));
    }
    REQUIRE(a.field.pairs.size() == b.field.pairs.size());
    for (std::size_t t = 0; t < a.field.pairs.size(); ++t)
        CHECK(a.field.pairs[t] == b.field.pairs[t]);

    noise.seed = 556;
    auto c = generate_scene(script, noise);
    bool any_difference = false;
    for (int t = 0; t < a.detections.frame_count && !any_difference; ++t) {
        if (a.detections.frames[t].size() != c.detections.frames[t].size())
            any_difference = true;
        else
            for (std::size_t i = 0; i < a.detections.frames[t].size(); ++i)
                if (!same_box(a.detections.frames[t][i], c.detections.frames[t][i]))
                    any_difference = true;
    }
    CHECK(any_difference);
}

TEST_CASE("correspondences move with the boxes; the background holds still") {
    auto script = make_archetype_script("run", 1);
    NoiseConfig quiet;
    auto scene = generate_scene(script, quiet);
    const Track& gt = scene.ground_truth[0];

    for (std::size_t t = 0; t + 1 < static_cast<std::size_t>(scene.field.frame_count);
         ++t) {
        const DetectionBox& a = gt.boxes[t];
        const DetectionBox& b = gt.boxes[t + 1];
        int inside = 0, still = 0;
        for (const auto& c : scene.field.pairs[t]) {
            if (strictly_inside(a, c.x, c.y)) {
                // Same relative in-box position in both frames.
                double ux = (c.x - a.cx) / a.w;
                double uy = (c.y - a.cy) / a.h;
                CHECK(c.x2 == doctest::Approx(b.cx + ux * b.w).epsilon(1e-9));
                CHECK(c.y2 == doctest::Approx(b.cy + uy * b.h).epsilon(1e-9));
                ++inside;
            } else {
                CHECK(c.x2 == c.x);
                CHECK(c.y2 == c.y);
                ++still;
            }
        }
        CHECK(inside == 16); // 4x4 grid per participant
        CHECK(still > 20);   // generous floor for the background lattice
    }
}

TEST_CASE("noise controls behave statistically") {
    SceneScript script;
    script.video_id = "v";
    script.verb = "run";
    script.frame_count = 400;
    auto p = two_phase();
    p.x0 = 600.0;
    p.y0 = 300.0;
    script.participants.push_back(p);

    SUBCASE("dropout removes roughly the configured fraction") {
        NoiseConfig noise;
        noise.fn_rate = 0.5;
        noise.seed = 9;
        auto scene = generate_scene(script, noise);
        int kept = 0;
        for (const auto& f : scene.detections.frames) kept += f.size();
        CHECK(kept > 400 * 0.35);
        CHECK(kept < 400 * 0.65);
    }
    SUBCASE("spurious detections appear at the configured rate with low scores") {
        NoiseConfig noise;
        noise.fp_rate = 3.0;
        noise.seed = 9;
        auto scene = generate_scene(script, noise);
        int extras = 0;
        double extra_score_sum = 0.0;
        for (const auto& f : scene.detections.frames) {
            REQUIRE(f.size() >= 1);
            for (std::size_t i = 1; i < f.size(); ++i) {
                extras += 1;
                extra_score_sum += f[i].score;
                CHECK(f[i].source_id == "person-det");
                CHECK(f[i].w > 0.0);
            }
        }
        CHECK(extras > 400 * 2.0);
        CHECK(extras < 400 * 4.0);
        CHECK(extra_score_sum / extras < 0.0); // mean is -0.3
    }
    SUBCASE("jitter perturbs centers without moving them far") {
        NoiseConfig noise;
        noise.jitter = 3.0;
        noise.seed = 9;
        auto scene = generate_scene(script, noise);
        double sq = 0.0;
        int n = 0;
        for (int t = 0; t < script.frame_count; ++t) {
            const auto& box = scene.detections.frames[t][0];
            const auto& truth = scene.ground_truth[0].boxes[t];
            double dx = box.cx - truth.cx, dy = box.cy - truth.cy;
            sq += dx * dx + dy * dy;
            n += 1;
        }
        double rms = std::sqrt(sq / (2 * n));
        CHECK(rms > 2.0);
        CHECK(rms < 4.0);
    }
}

TEST_CASE("supplied appearance peaks on the participant's color bins") {
    SceneScript script;
    script.video_id = "v";
    script.verb = "run";
    script.frame_count = 30;
    auto colored = two_phase();
    colored.look_l = 7;
    colored.look_a = 3;
    colored.look_b = 8;
    script.participants.push_back(colored);
    NoiseConfig noise;
    noise.fp_rate = 2.0;
    noise.seed = 4;
    noise.supply_appearance = true;
    auto scene = generate_scene(script, noise);
    int fps_seen = 0;
    for (const auto& f : scene.detections.frames) {
        REQUIRE(f[0].appearance.has_value());
        CHECK(f[0].appearance->l[7] >= 0.7);
        CHECK(f[0].appearance->a[3] >= 0.7);
        CHECK(f[0].appearance->b[8] >= 0.7);
        for (std::size_t i = 1; i < f.size(); ++i) {
            REQUIRE(f[i].appearance.has_value());
            for (double v : f[i].appearance->l)
                CHECK(v == doctest::Approx(1.0 / 12));
            ++fps_seen;
        }
    }
    CHECK(fps_seen > 0);
}

TEST_CASE("archetype scripts stay inside the frame for many variations") {
    for (const auto& verb : archetype_verbs()) {
        for (std::uint64_t variation = 0; variation < 15; ++variation) {
            auto s = make_archetype_script(verb, variation);
            REQUIRE(s.frame_count >= 80);
            REQUIRE(s.frame_count <= 110);
            REQUIRE_FALSE(s.participants.empty());
            for (const auto& p : s.participants) {
                int used = 0;
                for (const auto& seg : p.segments) {
                    used += seg.frames;
                    CHECK(seg.frames >= 0);
                }
                CHECK(used <= s.frame_count - 1);
                for (int t = 0; t < s.frame_count; ++t) {
                    Point pos = scripted_position(p, t);
                    CHECK(pos.x >= p.w / 2 - 1e-6);
                    CHECK(pos.x <= s.width - p.w / 2 + 1e-6);
                    CHECK(pos.y >= p.h / 2 - 1e-6);
                    CHECK(pos.y <= s.height - p.h / 2 + 1e-6);
                }
            }
        }
    }
}

TEST_CASE("verbs with two participants use two detector classes") {
    for (const auto& verb : {"approach", "pick-up", "leave", "chase"}) {
        auto s = make_archetype_script(verb, 0);
        REQUIRE(s.participants.size() == 2);
        CHECK(s.participants[0].class_label != s.participants[1].class_label);
        auto scene = generate_scene(s, NoiseConfig{});
        CHECK(scene.detections.sources.size() == 2);
    }
    for (const auto& verb : {"run", "jump", "fall", "bounce"}) {
        auto s = make_archetype_script(verb, 0);
        CHECK(s.participants.size() == 1);
    }
}

TEST_CASE("scripts vary with the variation seed but not across calls") {
    auto a = make_archetype_script("jump", 5);
    auto b = make_archetype_script("jump", 5);
    CHECK(a.frame_count == b.frame_count);
    REQUIRE(a.participants.size() == b.participants.size());
    CHECK(a.participants[0].x0 == b.participants[0].x0);
    CHECK(a.participants[0].w == b.participants[0].w);

    bool differs = false;
    for (std::uint64_t v = 6; v < 12 && !differs; ++v) {
        auto c = make_archetype_script("jump", v);
        differs = c.frame_count != a.frame_count ||
                  c.participants[0].x0 != a.participants[0].x0;
    }
    CHECK(differs);
}

TEST_CASE("unknown archetypes are rejected") {
    CHECK_THROWS_AS(make_archetype_script("teleport", 0), SchemaError);
}
