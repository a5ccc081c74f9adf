#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "verbtrack/detection.hpp"

namespace verbtrack {

// Piecewise motion: each segment restarts from its own initial velocity and
// applies constant acceleration, so positions (and their discrete
// derivatives) have closed forms inside every segment.
struct MotionSegment {
    int frames = 0;
    double vx = 0.0, vy = 0.0;
    double ax = 0.0, ay = 0.0;
};

struct ParticipantScript {
    std::string name;
    std::string class_label;
    double x0 = 0.0, y0 = 0.0; // center at frame 0
    double w = 0.0, h = 0.0;
    std::vector<MotionSegment> segments;
    // Peak bins of a supplied appearance histogram (-1 = none attached).
    int look_l = -1, look_a = -1, look_b = -1;
};

struct SceneScript {
    std::string video_id;
    std::string verb;
    int frame_count = 0;
    int width = 1280, height = 720;
    std::vector<ParticipantScript> participants;
};

// Exact center of a participant at frame t (before frame-bound clamping).
struct Point {
    double x = 0.0, y = 0.0;
};
Point scripted_position(const ParticipantScript& p, int t);

// True when frame t and its forward-difference stencil (t, t+1, t+2) stay
// inside one motion segment, i.e. discrete derivatives have closed forms.
bool interior_frame(const ParticipantScript& p, int t, int frame_count);

struct NoiseConfig {
    double jitter = 0.0;        // std of center perturbation (px)
    double size_jitter = 0.0;   // std of width/height perturbation (px)
    double fp_rate = 0.0;       // expected spurious boxes per frame per source
    double fn_rate = 0.0;       // probability a true detection is dropped
    double true_score_mean = 2.0, true_score_std = 0.3;
    double fp_score_mean = -0.3, fp_score_std = 0.25;
    std::uint64_t seed = 0;
    bool supply_appearance = false; // attach histograms to detections
    int grid = 4;                   // correspondence grid per box side
};

struct SyntheticScene {
    std::string verb;
    DetectionStream detections;
    MotionField field;
    std::vector<Track> ground_truth; // one exact track per participant
};

// Renders a script into detections + motion correspondences + ground truth.
// One detection source per class (learned_threshold 0); true boxes are
// jittered, dropped at fn_rate and mixed with Poisson false positives whose
// scores are drawn below the true-score mean. Identical (script, noise)
// inputs reproduce the scene exactly.
SyntheticScene generate_scene(const SceneScript& script, const NoiseConfig& noise);

// The built-in verb repertoire.
std::vector<std::string> archetype_verbs();

// A randomized instance of one verb's motion pattern (start positions,
// speeds, sizes, timing and mirroring vary with the seed).
SceneScript make_archetype_script(const std::string& verb, std::uint64_t variation,
                                  int width = 1280, int height = 720);

// A whole corpus: `per_verb` scenes of every archetype, written by the CLI.
struct CorpusSpec {
    std::vector<std::string> verbs = archetype_verbs();
    int per_verb = 40;
    std::uint64_t seed = 0;
    NoiseConfig noise; // per-scene seeds are derived from `seed`
};

} // namespace verbtrack
