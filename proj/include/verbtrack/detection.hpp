#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "verbtrack/appearance.hpp"

namespace verbtrack {

inline constexpr int kMaxProjectionDepth = 5;

// One detector response. `projected_depth` is 0 for raw detector output and
// 1..5 for boxes propagated forward along the motion field; it is a runtime
// annotation and never written to disk. `appearance` may be attached by the
// pipeline (or supplied directly in the detections file for synthetic data).
struct DetectionBox {
    int frame = 0;
    double cx = 0.0, cy = 0.0;
    double w = 0.0, h = 0.0; // both > 0
    double score = 0.0;
    std::string source_id;
    int projected_depth = 0;
    std::optional<AppearanceHistogram> appearance;
};

inline double iou(const DetectionBox& a, const DetectionBox& b) {
    double ax0 = a.cx - a.w / 2, ax1 = a.cx + a.w / 2;
    double ay0 = a.cy - a.h / 2, ay1 = a.cy + a.h / 2;
    double bx0 = b.cx - b.w / 2, bx1 = b.cx + b.w / 2;
    double by0 = b.cy - b.h / 2, by1 = b.cy + b.h / 2;
    double iw = std::min(ax1, bx1) - std::max(ax0, bx0);
    double ih = std::min(ay1, by1) - std::max(ay0, by0);
    if (iw <= 0.0 || ih <= 0.0) return 0.0;
    double inter = iw * ih;
    return inter / (a.w * a.h + b.w * b.h - inter);
}

// True when (x, y) lies strictly inside the box.
inline bool strictly_inside(const DetectionBox& box, double x, double y) {
    return std::fabs(x - box.cx) < box.w / 2 && std::fabs(y - box.cy) < box.h / 2;
}

// Detector metadata. `learned_threshold` is the operating threshold the
// detector was tuned to; biasing and subinterval caps are expressed
// relative to it. `posture_label` tags pose-specific detectors of one class
// (e.g. several person detectors) that get merged into a single pool.
struct SourceInfo {
    std::string source_id;
    double learned_threshold = 0.0;
    std::string class_label;
    std::optional<std::string> posture_label;

    bool operator==(const SourceInfo&) const = default;
};

// All detections of one video, bucketed per frame.
struct DetectionStream {
    std::string video_id;
    int frame_count = 0;
    std::vector<SourceInfo> sources;
    std::vector<std::vector<DetectionBox>> frames; // size == frame_count

    const SourceInfo* find_source(const std::string& id) const {
        for (const auto& s : sources)
            if (s.source_id == id) return &s;
        return nullptr;
    }
};

// One sparse point correspondence between frame t and t+1.
struct Correspondence {
    double x = 0.0, y = 0.0;   // position in frame t
    double x2 = 0.0, y2 = 0.0; // matched position in frame t+1

    bool operator==(const Correspondence&) const = default;
};

// Sparse point matches for every consecutive frame pair of a video.
struct MotionField {
    int frame_count = 0;
    std::vector<std::vector<Correspondence>> pairs; // size == max(frame_count-1, 0)
};

struct ManifestEntry {
    std::string video_id;
    std::string verb_label;
    std::string detection_stream_path;
    std::string motion_field_path;
    int frame_width = 0;
    int frame_height = 0;

    bool operator==(const ManifestEntry&) const = default;
};

struct CorpusManifest {
    std::vector<ManifestEntry> videos;

    // Distinct verb labels in first-appearance order.
    std::vector<std::string> vocabulary() const {
        std::vector<std::string> out;
        for (const auto& v : videos)
            if (std::find(out.begin(), out.end(), v.verb_label) == out.end())
                out.push_back(v.verb_label);
        return out;
    }
};

// A selected box sequence covering every frame of [t0, t1].
struct Track {
    std::string video_id;
    std::string class_label;
    int t0 = 0, t1 = 0;
    std::vector<DetectionBox> boxes; // boxes[i].frame == t0 + i
    double coherence = 0.0;          // negated path cost of the selection
};

} // namespace verbtrack
