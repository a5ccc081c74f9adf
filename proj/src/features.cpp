#include "verbtrack/features.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "verbtrack/errors.hpp"
#include "verbtrack/mathutil.hpp"

namespace verbtrack {

namespace {

// Lower rank = stronger claim to the agent role.
int class_priority(const std::string& label) {
    std::string s;
    for (char c : label) s.push_back(static_cast<char>(std::tolower(c)));
    if (s == "person") return 0;
    if (s == "bicycle" || s == "motorcycle" || s == "suv") return 1;
    return 2;
}

// Two-point forward differences; the last slot repeats its predecessor so
// the series keeps its length.
std::vector<double> forward_diff(const std::vector<double>& v) {
    std::vector<double> d(v.size(), 0.0);
    if (v.size() < 2) return d;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) d[i] = v[i + 1] - v[i];
    d[v.size() - 1] = d[v.size() - 2];
    return d;
}

void check_finite(const FeatureSeries& s) {
    for (const auto& row : s.frames)
        for (double v : row)
            if (!std::isfinite(v)) throw SchemaError("non-finite feature value");
}

} // namespace

FeatureSchema FeatureSchema::single() {
    FeatureSchema s;
    s.names = {"cx", "cy", "aspect", "aspect_rate",
               "speed", "velocity_dir", "accel_mag", "accel_dir"};
    s.kinds = {FeatureKind::Linear, FeatureKind::Linear, FeatureKind::Linear,
               FeatureKind::Linear, FeatureKind::Linear, FeatureKind::Angular,
               FeatureKind::Linear, FeatureKind::Angular};
    return s;
}

FeatureSchema FeatureSchema::pair() {
    FeatureSchema s;
    auto one = single();
    for (std::size_t i = 0; i < one.names.size(); ++i) {
        s.names.push_back("agent_" + one.names[i]);
        s.kinds.push_back(one.kinds[i]);
    }
    for (std::size_t i = 0; i < one.names.size(); ++i) {
        s.names.push_back("patient_" + one.names[i]);
        s.kinds.push_back(one.kinds[i]);
    }
    s.names.push_back("distance");
    s.kinds.push_back(FeatureKind::Linear);
    s.names.push_back("bearing"); // direction from agent to patient
    s.kinds.push_back(FeatureKind::Angular);
    s.names.push_back("distance_rate");
    s.kinds.push_back(FeatureKind::Linear);
    return s;
}

Roles pick_roles(const std::vector<Track>& tracks) {
    if (tracks.empty()) throw NoTracks("no tracks to assign roles to");
    std::vector<const Track*> order;
    for (const auto& t : tracks) order.push_back(&t);
    std::stable_sort(order.begin(), order.end(), [](const Track* a, const Track* b) {
        int pa = class_priority(a->class_label), pb = class_priority(b->class_label);
        if (pa != pb) return pa < pb;
        return a->coherence > b->coherence;
    });
    Roles roles;
    roles.agent = order[0];
    if (order.size() > 1) roles.patient = order[1];
    return roles;
}

namespace {

// The 8 per-frame descriptors of a box sequence (already length-checked).
std::vector<std::vector<double>> single_rows(const std::vector<DetectionBox>& boxes) {
    const std::size_t n = boxes.size();
    std::vector<double> cx(n), cy(n), aspect(n);
    for (std::size_t i = 0; i < n; ++i) {
        cx[i] = boxes[i].cx;
        cy[i] = boxes[i].cy;
        aspect[i] = boxes[i].w / boxes[i].h;
    }
    auto d_aspect = forward_diff(aspect);
    auto vx = forward_diff(cx), vy = forward_diff(cy);
    auto ax = forward_diff(vx), ay = forward_diff(vy);

    std::vector<std::vector<double>> rows(n);
    for (std::size_t i = 0; i < n; ++i)
        rows[i] = {cx[i],
                   cy[i],
                   aspect[i],
                   d_aspect[i],
                   std::hypot(vx[i], vy[i]),
                   direction_or_zero(vy[i], vx[i]),
                   std::hypot(ax[i], ay[i]),
                   direction_or_zero(ay[i], ax[i])};
    return rows;
}

std::vector<DetectionBox> crop_boxes(const Track& t, int t0, int t1) {
    std::vector<DetectionBox> out;
    for (int f = t0; f <= t1; ++f) out.push_back(t.boxes[f - t.t0]);
    return out;
}

} // namespace

FeatureSeries single_features(const Track& track) {
    if (track.boxes.size() < 3)
        throw TooShort("track has " + std::to_string(track.boxes.size()) +
                       " frames; need at least 3");
    FeatureSeries s;
    s.video_id = track.video_id;
    s.schema = FeatureSchema::single();
    s.frames = single_rows(track.boxes);
    check_finite(s);
    return s;
}

FeatureSeries pair_features(const Track& agent, const Track& patient) {
    int t0 = std::max(agent.t0, patient.t0);
    int t1 = std::min(agent.t1, patient.t1);
    if (t1 - t0 + 1 < 3)
        throw NoOverlap("tracks share " + std::to_string(std::max(0, t1 - t0 + 1)) +
                        " frames; need at least 3");
    auto a_boxes = crop_boxes(agent, t0, t1);
    auto p_boxes = crop_boxes(patient, t0, t1);
    auto a_rows = single_rows(a_boxes);
    auto p_rows = single_rows(p_boxes);

    const std::size_t n = a_boxes.size();
    std::vector<double> dist(n), bearing(n);
    for (std::size_t i = 0; i < n; ++i) {
        double dx = p_boxes[i].cx - a_boxes[i].cx;
        double dy = p_boxes[i].cy - a_boxes[i].cy;
        dist[i] = std::hypot(dx, dy);
        bearing[i] = direction_or_zero(dy, dx);
    }
    auto d_dist = forward_diff(dist);

    FeatureSeries s;
    s.video_id = agent.video_id;
    s.schema = FeatureSchema::pair();
    s.frames.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& row = s.frames[i];
        row.insert(row.end(), a_rows[i].begin(), a_rows[i].end());
        row.insert(row.end(), p_rows[i].begin(), p_rows[i].end());
        row.push_back(dist[i]);
        row.push_back(bearing[i]);
        row.push_back(d_dist[i]);
    }
    check_finite(s);
    return s;
}

} // namespace verbtrack
