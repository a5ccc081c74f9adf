#include <doctest.h>

#include <cmath>
#include <vector>

#include "verbtrack/errors.hpp"
#include "verbtrack/features.hpp"
#include "verbtrack/mathutil.hpp"

using namespace verbtrack;

namespace {

Track linear_track(const std::string& cls, int t0, int n, double x0, double y0,
                   double vx, double vy, double w = 20.0, double h = 40.0) {
    Track t;
    t.video_id = "vid";
    t.class_label = cls;
    t.t0 = t0;
    t.t1 = t0 + n - 1;
    for (int i = 0; i < n; ++i) {
        DetectionBox b;
        b.frame = t0 + i;
        b.cx = x0 + vx * i;
        b.cy = y0 + vy * i;
        b.w = w;
        b.h = h;
        t.boxes.push_back(b);
    }
    return t;
}

int column(const FeatureSchema& schema, const std::string& name) {
    for (std::size_t i = 0; i < schema.names.size(); ++i)
        if (schema.names[i] == name) return static_cast<int>(i);
    REQUIRE(false);
    return -1;
}

} // namespace

TEST_CASE("schemas") {
    auto one = FeatureSchema::single();
    CHECK(one.size() == 8);
    CHECK(one.names[0] == "cx");
    CHECK(one.kinds[5] == FeatureKind::Angular); // velocity_dir
    CHECK(one.kinds[7] == FeatureKind::Angular); // accel_dir
    CHECK(one.kinds[4] == FeatureKind::Linear);  // speed

    auto two = FeatureSchema::pair();
    CHECK(two.size() == 19);
    CHECK(two.names[0] == "agent_cx");
    CHECK(two.names[8] == "patient_cx");
    CHECK(two.names[16] == "distance");
    CHECK(two.names[17] == "bearing");
    CHECK(two.names[18] == "distance_rate");
    CHECK(two.kinds[17] == FeatureKind::Angular);
    CHECK(two.kinds[16] == FeatureKind::Linear);
}

TEST_CASE("role assignment prefers people, then rideables, then coherence") {
    auto person = linear_track("person", 0, 5, 0, 0, 1, 0);
    person.coherence = 1.0;
    auto ball = linear_track("ball", 0, 5, 50, 0, 0, 0);
    ball.coherence = 99.0;
    auto bike = linear_track("Bicycle", 0, 5, 90, 0, 0, 0); // case-insensitive
    bike.coherence = 2.0;

    SUBCASE("person beats a higher-coherence ball") {
        std::vector<Track> tracks = {ball, person};
        auto roles = pick_roles(tracks);
        CHECK(roles.agent->class_label == "person");
        CHECK(roles.patient->class_label == "ball");
    }
    SUBCASE("rideable vehicle outranks other objects") {
        std::vector<Track> tracks = {ball, bike};
        auto roles = pick_roles(tracks);
        CHECK(roles.agent->class_label == "Bicycle");
        CHECK(roles.patient->class_label == "ball");
    }
    SUBCASE("equal priority falls back to coherence") {
        auto ball2 = ball;
        ball2.coherence = 5.0;
        ball2.video_id = "low";
        std::vector<Track> tracks = {ball2, ball};
        auto roles = pick_roles(tracks);
        CHECK(roles.agent->coherence == 99.0);
        CHECK(roles.patient->coherence == 5.0);
    }
    SUBCASE("single track has no patient") {
        std::vector<Track> tracks = {person};
        auto roles = pick_roles(tracks);
        CHECK(roles.agent != nullptr);
        CHECK(roles.patient == nullptr);
    }
    SUBCASE("no tracks at all") {
        std::vector<Track> none;
        CHECK_THROWS_AS(pick_roles(none), NoTracks);
    }
}

TEST_CASE("single-track features on a constant-velocity diagonal") {
    // (0,0) -> (3,4) per frame: speed 5, direction atan2(4,3), zero accel.
    auto t = linear_track("person", 2, 6, 10.0, 20.0, 3.0, 4.0);
    auto s = single_features(t);
    REQUIRE(s.frames.size() == 6);
    CHECK(s.video_id == "vid");
    CHECK(s.schema == FeatureSchema::single());

    int c_cx = column(s.schema, "cx");
    int c_speed = column(s.schema, "speed");
    int c_vdir = column(s.schema, "velocity_dir");
    int c_amag = column(s.schema, "accel_mag");
    int c_adir = column(s.schema, "accel_dir");
    int c_aspect = column(s.schema, "aspect");
    int c_arate = column(s.schema, "aspect_rate");

    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(s.frames[i][c_cx] == doctest::Approx(10.0 + 3.0 * i));
        CHECK(s.frames[i][c_speed] == doctest::Approx(5.0));
        CHECK(s.frames[i][c_vdir] == doctest::Approx(std::atan2(4.0, 3.0)));
        CHECK(s.frames[i][c_amag] == doctest::Approx(0.0));
        CHECK(s.frames[i][c_adir] == 0.0); // (0,0) direction convention
        CHECK(s.frames[i][c_aspect] == doctest::Approx(0.5));
        CHECK(s.frames[i][c_arate] == doctest::Approx(0.0));
    }
}

TEST_CASE("derivatives are forward differences with a replicated tail") {
    Track t;
    t.video_id = "v";
    t.class_label = "ball";
    t.t0 = 0;
    t.t1 = 3;
    std::vector<double> xs = {0.0, 1.0, 4.0, 9.0}; // dx: 1, 3, 5, then 5 again
    for (int i = 0; i < 4; ++i) {
        DetectionBox b;
        b.frame = i;
        b.cx = xs[i];
        b.cy = 0.0;
        b.w = 10.0;
        b.h = 10.0;
        t.boxes.push_back(b);
    }
    auto s = single_features(t);
    int c_speed = column(s.schema, "speed");
    int c_amag = column(s.schema, "accel_mag");
    CHECK(s.frames[0][c_speed] == doctest::Approx(1.0));
    CHECK(s.frames[1][c_speed] == doctest::Approx(3.0));
    CHECK(s.frames[2][c_speed] == doctest::Approx(5.0));
    CHECK(s.frames[3][c_speed] == doctest::Approx(5.0)); // replicated
    // vx: 1,3,5,5 -> ax: 2,2,0, then replicated 0.
    CHECK(s.frames[0][c_amag] == doctest::Approx(2.0));
    CHECK(s.frames[1][c_amag] == doctest::Approx(2.0));
    CHECK(s.frames[2][c_amag] == doctest::Approx(0.0));
    CHECK(s.frames[3][c_amag] == doctest::Approx(0.0));
}

TEST_CASE("angles live in (-pi, pi] and use the screen-down convention") {
    // Straight up the screen: cy decreases, so the direction is atan2(-1, 0).
    auto up = linear_track("ball", 0, 4, 0.0, 100.0, 0.0, -2.0);
    auto s = single_features(up);
    int c_vdir = column(s.schema, "velocity_dir");
    CHECK(s.frames[0][c_vdir] == doctest::Approx(-kPi / 2));

    // Exactly leftward is the branch point: atan2(0, -1) = +pi, kept as +pi.
    auto left = linear_track("ball", 0, 4, 100.0, 0.0, -3.0, 0.0);
    auto sl = single_features(left);
    CHECK(sl.frames[0][c_vdir] == doctest::Approx(kPi));
    CHECK(sl.frames[0][c_vdir] > 0.0);
}

TEST_CASE("tracks under three frames are rejected") {
    auto two = linear_track("person", 0, 2, 0, 0, 1, 1);
    CHECK_THROWS_AS(single_features(two), TooShort);
}

TEST_CASE("motion features are translation invariant") {
    auto a = linear_track("person", 0, 8, 10.0, 20.0, 2.0, -1.0);
    auto b = linear_track("person", 0, 8, 510.0, -380.0, 2.0, -1.0);
    auto sa = single_features(a);
    auto sb = single_features(b);
    // Everything except the raw center coordinates must match.
    for (std::size_t i = 0; i < sa.frames.size(); ++i)
        for (std::size_t j = 2; j < sa.schema.size(); ++j)
            CHECK(sa.frames[i][j] == doctest::Approx(sb.frames[i][j]).epsilon(1e-12));
}

TEST_CASE("pair features crop to the frame intersection") {
    auto agent = linear_track("person", 0, 10, 0.0, 0.0, 1.0, 0.0);
    auto patient = linear_track("ball", 4, 10, 100.0, 0.0, -2.0, 0.0);
    auto s = pair_features(agent, patient);
    // Intersection is [4, 9]: 6 frames.
    REQUIRE(s.frames.size() == 6);
    CHECK(s.schema == FeatureSchema::pair());

    int c_acx = column(s.schema, "agent_cx");
    int c_pcx = column(s.schema, "patient_cx");
    int c_dist = column(s.schema, "distance");
    int c_bear = column(s.schema, "bearing");
    int c_rate = column(s.schema, "distance_rate");
    for (int i = 0; i < 6; ++i) {
        double ax = 4.0 + i;          // agent at frame 4+i
        double px = 100.0 - 2.0 * i;  // patient at frame 4+i
        CHECK(s.frames[i][c_acx] == doctest::Approx(ax));
        CHECK(s.frames[i][c_pcx] == doctest::Approx(px));
        CHECK(s.frames[i][c_dist] == doctest::Approx(px - ax));
        CHECK(s.frames[i][c_bear] == doctest::Approx(0.0)); // patient to the right
    }
    // Distance shrinks by 3 per frame; the tail repeats.
    for (int i = 0; i < 6; ++i)
        CHECK(s.frames[i][c_rate] == doctest::Approx(-3.0));

    // The agent's own columns match a cropped single-track extraction.
    Track cropped = agent;
    cropped.t0 = 4;
    cropped.t1 = 9;
    cropped.boxes.assign(agent.boxes.begin() + 4, agent.boxes.end());
    auto sc = single_features(cropped);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 8; ++j)
            CHECK(s.frames[i][j] == doctest::Approx(sc.frames[i][j]).epsilon(1e-12));
}

TEST_CASE("pair extraction needs at least three shared frames") {
    auto agent = linear_track("person", 0, 5, 0, 0, 1, 0);   // [0, 4]
    auto late = linear_track("ball", 3, 5, 0, 0, 1, 0);      // [3, 7] -> 2 shared
    CHECK_THROWS_AS(pair_features(agent, late), NoOverlap);
    auto disjoint = linear_track("ball", 20, 5, 0, 0, 1, 0); // no shared frames
    CHECK_THROWS_AS(pair_features(agent, disjoint), NoOverlap);
    auto edge = linear_track("ball", 2, 5, 0, 0, 1, 0);      // [2, 6] -> 3 shared
    CHECK_NOTHROW(pair_features(agent, edge));
}
