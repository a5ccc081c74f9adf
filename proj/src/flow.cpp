#include "verbtrack/flow.hpp"

#include <algorithm>
#include <cmath>

#include "verbtrack/errors.hpp"

namespace verbtrack {

namespace {

constexpr double kScaleMin = 0.5;
constexpr double kScaleMax = 2.0;

// Least-squares slope of (b - mean_b) against (a - mean_a); 1 when the
// abscissae carry no spread (a single point pins no scale).
double slope_or_one(const std::vector<double>& a, const std::vector<double>& b) {
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) { ma += a[i]; mb += b[i]; }
    ma /= a.size();
    mb /= b.size();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - ma) * (b[i] - mb);
        den += (a[i] - ma) * (a[i] - ma);
    }
    if (den <= 1e-12) return 1.0;
    return num / den;
}

bool inside(const DetectionBox& box, double x, double y) {
    return std::fabs(x - box.cx) <= box.w / 2 && std::fabs(y - box.cy) <= box.h / 2;
}

} // namespace

BoxMotion box_motion(const MotionField& field, int frame, const DetectionBox& box) {
    BoxMotion m;
    if (frame < 0 || frame >= static_cast<int>(field.pairs.size())) return m;
    std::vector<double> xs, ys, xs2, ys2;
    for (const auto& c : field.pairs[frame]) {
        if (!inside(box, c.x, c.y)) continue;
        xs.push_back(c.x);
        ys.push_back(c.y);
        xs2.push_back(c.x2);
        ys2.push_back(c.y2);
    }
    if (xs.empty()) return m;
    double sum_dx = 0.0, sum_dy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sum_dx += xs2[i] - xs[i];
        sum_dy += ys2[i] - ys[i];
    }
    m.vx = sum_dx / xs.size();
    m.vy = sum_dy / ys.size();
    m.sx = std::clamp(slope_or_one(xs, xs2), kScaleMin, kScaleMax);
    m.sy = std::clamp(slope_or_one(ys, ys2), kScaleMin, kScaleMax);
    return m;
}

DetectionBox project_forward(const DetectionBox& box, const MotionField& field,
                             int depth) {
    if (depth < 1 || depth > kMaxProjectionDepth)
        throw OutOfRange("projection depth " + std::to_string(depth) +
                         " outside [1, " + std::to_string(kMaxProjectionDepth) + "]");
    if (box.frame + depth >= field.frame_count)
        throw OutOfRange("projection of frame " + std::to_string(box.frame) +
                         " by " + std::to_string(depth) + " leaves the video");
    DetectionBox cur = box;
    for (int step = 0; step < depth; ++step) {
        BoxMotion m = box_motion(field, cur.frame, cur);
        cur.cx += m.vx;
        cur.cy += m.vy;
        cur.w *= m.sx;
        cur.h *= m.sy;
        cur.frame += 1;
    }
    cur.projected_depth = depth;
    return cur;
}

DetectionStream augment_with_projections(const DetectionStream& stream,
                                         const MotionField& field,
                                         int max_depth) {
    if (max_depth < 0 || max_depth > kMaxProjectionDepth)
        throw OutOfRange("projection cap " + std::to_string(max_depth) +
                         " outside [0, " + std::to_string(kMaxProjectionDepth) + "]");
    DetectionStream out = stream;
    for (int t = 0; t < stream.frame_count; ++t) {
        for (const auto& box : stream.frames[t]) {
            if (box.projected_depth != 0) continue; // only raw boxes spawn copies
            DetectionBox cur = box;
            int reach = std::min(max_depth, stream.frame_count - 1 - t);
            for (int d = 1; d <= reach; ++d) {
                BoxMotion m = box_motion(field, cur.frame, cur);
                cur.cx += m.vx;
                cur.cy += m.vy;
                cur.w *= m.sx;
                cur.h *= m.sy;
                cur.frame += 1;
                cur.projected_depth = d;
                out.frames[cur.frame].push_back(cur);
            }
        }
    }
    return out;
}

} // namespace verbtrack
