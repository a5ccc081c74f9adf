#pragma once

#include <string>
#include <vector>

#include "verbtrack/detection.hpp"

namespace verbtrack {

enum class FeatureKind { Linear, Angular };

struct FeatureSchema {
    std::vector<std::string> names;
    std::vector<FeatureKind> kinds;

    std::size_t size() const { return names.size(); }
    bool operator==(const FeatureSchema&) const = default;

    static FeatureSchema single(); // the 8 one-track features
    static FeatureSchema pair();   // agent 8 + patient 8 + 3 relative
};

// Fixed-length feature vector per frame; all entries finite by construction.
struct FeatureSeries {
    std::string video_id;
    FeatureSchema schema;
    std::vector<std::vector<double>> frames;
};

struct Roles {
    const Track* agent = nullptr;
    const Track* patient = nullptr; // null for single-participant videos
};

// Ranks tracks by class priority (person first, then rideable vehicles, then
// everything else), breaking ties by coherence; the best is the agent, the
// runner-up (if any) the patient. Throws NoTracks on an empty list.
Roles pick_roles(const std::vector<Track>& tracks);

// Per-frame descriptors of one track: center x/y, aspect ratio and its rate
// of change, speed, velocity direction, acceleration magnitude and
// direction. Derivatives are two-point forward differences with the final
// sample replicated; directions use atan2 with (0,0) -> 0 and live in
// (-pi, pi]. Throws TooShort for tracks under 3 frames.
FeatureSeries single_features(const Track& track);

// Both tracks' single features over the frame-range intersection, plus
// center distance, the direction from agent to patient, and the distance's
// rate of change. Throws NoOverlap when the intersection is under 3 frames.
FeatureSeries pair_features(const Track& agent, const Track& patient);

} // namespace verbtrack
