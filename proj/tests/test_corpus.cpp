#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "verbtrack/errors.hpp"
#include "verbtrack/io.hpp"

using namespace verbtrack;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("verbtrack-test-" + std::to_string(::getpid()) + "-" +
                std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
    static inline int counter = 0;
};

DetectionStream sample_stream() {
    DetectionStream s;
    s.video_id = "vid-1";
    s.frame_count = 3;
    s.sources = {SourceInfo{"det-a", 0.25, "person", std::nullopt},
                 SourceInfo{"det-b", -1.0, "ball", std::string("rolling")}};
    s.frames.assign(3, {});
    AppearanceHistogram hist;
    hist.bins = 12;
    hist.l.assign(12, 1.0 / 12);
    hist.a.assign(12, 1.0 / 12);
    hist.b.assign(12, 1.0 / 12);
    DetectionBox b1{0, 100.5, 200.25, 30.0, 60.0, 1.75, "det-a", 0, hist};
    DetectionBox b2{0, 400.0, 300.0, 40.0, 40.0, -0.5, "det-b", 0, std::nullopt};
    DetectionBox b3{2, 111.0, 202.0, 31.0, 59.0, 2.0, "det-a", 0, std::nullopt};
    s.frames[0] = {b1, b2};
    s.frames[2] = {b3};
    return s;
}

} // namespace

TEST_CASE("detection stream round trip preserves boxes, sources and appearance") {
    TempDir dir;
    DetectionStream s = sample_stream();
    save_detection_stream(s, dir.file("d.jsonl"));
    DetectionStream r = load_detection_stream(dir.file("d.jsonl"));

    CHECK(r.video_id == s.video_id);
    CHECK(r.frame_count == 3);
    REQUIRE(r.sources.size() == 2);
    CHECK(r.sources[0] == s.sources[0]);
    CHECK(r.sources[1] == s.sources[1]);
    REQUIRE(r.frames[0].size() == 2);
    CHECK(r.frames[0][0].cx == 100.5);
    CHECK(r.frames[0][0].score == 1.75);
    REQUIRE(r.frames[0][0].appearance.has_value());
    CHECK(*r.frames[0][0].appearance == *s.frames[0][0].appearance);
    CHECK_FALSE(r.frames[0][1].appearance.has_value());
    CHECK(r.frames[1].empty());
    CHECK(r.frames[2].size() == 1);
}

TEST_CASE("projected boxes are not serialized") {
    TempDir dir;
    DetectionStream s = sample_stream();
    DetectionBox proj = s.frames[0][0];
    proj.frame = 1;
    proj.projected_depth = 1;
    s.frames[1].push_back(proj);
    save_detection_stream(s, dir.file("d.jsonl"));
    DetectionStream r = load_detection_stream(dir.file("d.jsonl"));
    CHECK(r.frames[1].empty());
}

TEST_CASE("detection stream loading validates its input") {
    TempDir dir;

    SUBCASE("empty file") {
        std::ofstream(dir.file("e.jsonl")).close();
        CHECK_THROWS_AS(load_detection_stream(dir.file("e.jsonl")), ParseError);
    }
    SUBCASE("malformed json") {
        std::ofstream(dir.file("m.jsonl")) << "{not json\n";
        CHECK_THROWS_AS(load_detection_stream(dir.file("m.jsonl")), ParseError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_detection_stream(dir.file("absent.jsonl")), ParseError);
    }

    DetectionStream s = sample_stream();
    SUBCASE("nonpositive box size") {
        s.frames[0][0].w = 0.0;
        save_detection_stream(s, dir.file("w.jsonl"));
        CHECK_THROWS_AS(load_detection_stream(dir.file("w.jsonl")), SchemaError);
    }
    SUBCASE("frame out of range") {
        s.frames[2][0].frame = 7;
        save_detection_stream(s, dir.file("f.jsonl"));
        CHECK_THROWS_AS(load_detection_stream(dir.file("f.jsonl")), IndexError);
    }
    SUBCASE("unknown source") {
        s.frames[2][0].source_id = "det-z";
        save_detection_stream(s, dir.file("s.jsonl"));
        CHECK_THROWS_AS(load_detection_stream(dir.file("s.jsonl")), SchemaError);
    }
}

TEST_CASE("motion field round trip and frame validation") {
    TempDir dir;
    MotionField f;
    f.frame_count = 3;
    f.pairs.assign(2, {});
    f.pairs[0] = {Correspondence{1, 2, 3, 4}, Correspondence{5, 6, 7, 8}};
    f.pairs[1] = {Correspondence{-1.5, 0, 2.5, 9}};
    save_motion_field(f, dir.file("m.jsonl"));
    MotionField r = load_motion_field(dir.file("m.jsonl"), 3);
    CHECK(r.frame_count == 3);
    REQUIRE(r.pairs.size() == 2);
    CHECK(r.pairs[0] == f.pairs[0]);
    CHECK(r.pairs[1] == f.pairs[1]);

    // The last frame has no successor, so no correspondence may start there.
    std::ofstream(dir.file("bad.jsonl"))
        << R"({"frame":2,"x":0,"y":0,"x2":1,"y2":1})" << "\n";
    CHECK_THROWS_AS(load_motion_field(dir.file("bad.jsonl"), 3), IndexError);
}

TEST_CASE("manifest round trip keeps order and vocabulary is first-appearance") {
    TempDir dir;
    CorpusManifest m;
    m.videos = {
        ManifestEntry{"v1", "jump", "det/v1.jsonl", "mot/v1.jsonl", 1280, 720},
        ManifestEntry{"v2", "run", "det/v2.jsonl", "mot/v2.jsonl", 1280, 720},
        ManifestEntry{"v3", "jump", "det/v3.jsonl", "mot/v3.jsonl", 640, 480},
    };
    save_manifest(m, dir.file("manifest.json"));
    CorpusManifest r = load_manifest(dir.file("manifest.json"));
    REQUIRE(r.videos.size() == 3);
    CHECK(r.videos[0] == m.videos[0]);
    CHECK(r.videos[2] == m.videos[2]);
    CHECK(r.vocabulary() == std::vector<std::string>{"jump", "run"});
}

TEST_CASE("track round trip preserves interval and boxes") {
    TempDir dir;
    Track t;
    t.video_id = "vid-1";
    t.class_label = "person";
    t.t0 = 2;
    t.t1 = 4;
    t.coherence = 5.25;
    for (int f = 2; f <= 4; ++f) {
        DetectionBox b{f, 10.0 * f, 20.0 + f, 30.0, 60.0, 0.0, "det-a", 0, std::nullopt};
        t.boxes.push_back(b);
    }
    save_tracks({t}, dir.file("tracks.json"));
    auto r = load_tracks(dir.file("tracks.json"), "vid-1");
    REQUIRE(r.size() == 1);
    CHECK(r[0].video_id == "vid-1");
    CHECK(r[0].class_label == "person");
    CHECK(r[0].t0 == 2);
    CHECK(r[0].t1 == 4);
    CHECK(r[0].coherence == 5.25);
    REQUIRE(r[0].boxes.size() == 3);
    CHECK(r[0].boxes[1].frame == 3);
    CHECK(r[0].boxes[1].cx == 30.0);

    SUBCASE("span must be fully covered") {
        Track bad = t;
        bad.boxes.pop_back();
        save_tracks({bad}, dir.file("bad.json"));
        CHECK_THROWS_AS(load_tracks(dir.file("bad.json"), "vid-1"), SchemaError);
    }
}

TEST_CASE("feature series round trip via csv plus schema sidecar") {
    TempDir dir;
    FeatureSeries s;
    s.video_id = "vid-1";
    s.schema = FeatureSchema::single();
    s.frames = {{1.0, 2.0, 0.5, 0.0, 5.0, -3.14, 0.25, 3.0},
                {1.5, 2.5, 0.5, 1e-17, 4.0, 3.14159, 0.0, -3.0}};
    save_feature_series(s, dir.file("f.csv"));
    FeatureSeries r = load_feature_series(dir.file("f.csv"));
    CHECK(r.schema == s.schema);
    REQUIRE(r.frames.size() == 2);
    for (std::size_t t = 0; t < 2; ++t)
        for (std::size_t i = 0; i < 8; ++i)
            CHECK(r.frames[t][i] == s.frames[t][i]); // %.17g is lossless

    SUBCASE("header must match the sidecar") {
        std::ifstream in(dir.file("f.csv"));
        std::string header, rest, line;
        std::getline(in, header);
        while (std::getline(in, line)) rest += line + "\n";
        std::ofstream out(dir.file("f.csv"));
        out << "bogus," << header.substr(header.find(',') + 1) << "\n" << rest;
        out.close();
        CHECK_THROWS_AS(load_feature_series(dir.file("f.csv")), SchemaError);
    }
}

TEST_CASE("model set round trip covers both classifier kinds") {
    TempDir dir;

    SUBCASE("state machine models") {
        HmmModel h;
        h.schema = FeatureSchema::single();
        h.states = 2;
        h.initial = {0.25, 0.75};
        h.trans = {{0.5, 0.5}, {0.125, 0.875}};
        h.output.assign(2, std::vector<Emission>(h.schema.size()));
        for (int k = 0; k < 2; ++k)
            for (std::size_t f = 0; f < h.schema.size(); ++f) {
                h.output[k][f].kind = h.schema.kinds[f];
                h.output[k][f].mean = 0.5 * k + 0.125 * static_cast<double>(f);
                h.output[k][f].spread = 1.0 + k;
            }
        h.training.seed = 42;
        h.training.restarts = 2;
        h.training.iterations = 7;
        h.training.final_loglik = -123.456;
        h.training.loglik_trace = {{-130.0, -125.0}, {-140.0, -123.456}};

        ModelSet m;
        m.kind = ClassifierKind::Hmm;
        m.hmm_states = 2;
        m.seed = 42;
        VerbModel vm;
        vm.verb = "jump";
        vm.kind = ClassifierKind::Hmm;
        vm.agent_hmm = h;
        m.verbs.push_back(vm);

        save_models(m, dir.file("model.json"));
        ModelSet r = load_models(dir.file("model.json"));
        CHECK(r.kind == ClassifierKind::Hmm);
        REQUIRE(r.verbs.size() == 1);
        REQUIRE(r.verbs[0].agent_hmm.has_value());
        CHECK_FALSE(r.verbs[0].pair_hmm.has_value());
        const HmmModel& rh = *r.verbs[0].agent_hmm;
        CHECK(rh.states == 2);
        CHECK(rh.initial == h.initial);
        CHECK(rh.trans == h.trans);
        CHECK(rh.schema == h.schema);
        CHECK(rh.output[1][3].mean == h.output[1][3].mean);
        CHECK(rh.training.final_loglik == h.training.final_loglik);
        CHECK(rh.training.loglik_trace == h.training.loglik_trace);
    }

    SUBCASE("nearest-neighbor banks") {
        ModelSet m;
        m.kind = ClassifierKind::Dtw;
        m.dtw_zscore = true;
        VerbModel vm;
        vm.verb = "run";
        vm.kind = ClassifierKind::Dtw;
        DtwBank bank;
        bank.schema = FeatureSchema::single();
        FeatureSeries ex;
        ex.video_id = "v9";
        ex.schema = bank.schema;
        ex.frames = {{1, 2, 3, 4, 5, 6, 7, 8}, {8, 7, 6, 5, 4, 3, 2, 1}};
        bank.exemplars.push_back({"run", ex});
        ZScore z;
        z.means.assign(8, 0.5);
        z.stds.assign(8, 2.0);
        bank.zscore = z;
        vm.agent_dtw = bank;
        m.verbs.push_back(vm);

        save_models(m, dir.file("model.json"));
        ModelSet r = load_models(dir.file("model.json"));
        CHECK(r.kind == ClassifierKind::Dtw);
        CHECK(r.dtw_zscore);
        REQUIRE(r.verbs.size() == 1);
        REQUIRE(r.verbs[0].agent_dtw.has_value());
        const DtwBank& rb = *r.verbs[0].agent_dtw;
        REQUIRE(rb.exemplars.size() == 1);
        CHECK(rb.exemplars[0].verb == "run");
        CHECK(rb.exemplars[0].series.video_id == "v9");
        CHECK(rb.exemplars[0].series.frames == ex.frames);
        REQUIRE(rb.zscore.has_value());
        CHECK(rb.zscore->stds == z.stds);
    }
}

TEST_CASE("label records and confusion matrices round trip") {
    TempDir dir;
    VideoLabelRecord a;
    a.video_id = "v1";
    a.gold = "jump";
    a.predicted = "run";
    a.scores = {{"jump", -10.0}, {"run", -9.0}};
    a.fold = 2;
    VideoLabelRecord b;
    b.video_id = "v2";
    b.gold = "run";
    b.failed = true;
    b.failure = "no tracks";
    b.fold = 0;
    save_labels({a, b}, dir.file("labels.json"));
    auto r = load_labels(dir.file("labels.json"));
    REQUIRE(r.size() == 2);
    CHECK(r[0].predicted == "run");
    CHECK(r[0].scores.at("jump") == -10.0);
    CHECK(r[0].fold == 2);
    CHECK(r[1].failed);
    CHECK(r[1].failure == "no tracks");

    ConfusionMatrix m = tabulate({"jump", "run"}, {a, b});
    save_confusion(m, {0.5, 0.0}, dir.file("confusion.json"));
    ConfusionMatrix rm = load_confusion(dir.file("confusion.json"));
    CHECK(rm.verbs == m.verbs);
    CHECK(rm.counts == m.counts);
    CHECK(rm.failed == m.failed);
}
