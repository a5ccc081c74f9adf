#pragma once

#include "verbtrack/detection.hpp"

namespace verbtrack {

// Mean in-box displacement plus per-axis divergence (scale) factors.
struct BoxMotion {
    double vx = 0.0, vy = 0.0;
    double sx = 1.0, sy = 1.0; // clamped to [0.5, 2.0]
};

// Summarizes the correspondences of frame -> frame+1 whose source points lie
// inside `box`. Velocity is the mean displacement; sx/sy are least-squares
// slopes of next-position against position per axis (how the in-box point
// cloud stretches), clamped to [0.5, 2.0]. With no usable points the motion
// is the identity {0, 0, 1, 1}; with no positional spread the scale is 1.
BoxMotion box_motion(const MotionField& field, int frame, const DetectionBox& box);

// Applies `depth` single-frame projection steps to `box`: advance the center
// by the in-box velocity, scale width/height by the divergence, step the
// frame. Score, source and appearance ride along unchanged; projected_depth
// is set to `depth`. Throws OutOfRange unless 1 <= depth <= 5 and the final
// frame stays inside the video.
DetectionBox project_forward(const DetectionBox& box, const MotionField& field,
                             int depth);

// Returns a copy of the stream where every raw detection (projected_depth 0)
// additionally appears projected into the following `max_depth` frames
// (clipped at the end of the video). Projections never spawn their own
// projections, so each raw box contributes at most max_depth descendants.
DetectionStream augment_with_projections(const DetectionStream& stream,
                                         const MotionField& field,
                                         int max_depth = kMaxProjectionDepth);

} // namespace verbtrack
