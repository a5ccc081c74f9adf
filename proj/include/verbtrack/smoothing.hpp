#pragma once

#include <vector>

#include "verbtrack/detection.hpp"

namespace verbtrack {

// Least-squares fit of a C2 piecewise-cubic spline with `pieces` uniform
// knot spans over [0, n-1], evaluated back at the sample positions. The
// effective piece count is min(pieces, n/4) and at least 1, so short signals
// are never over-parameterized. Throws TooShort for fewer than 2 samples.
std::vector<double> smooth_signal(const std::vector<double>& signal, int pieces);

// Smooths a track's center coordinates (pieces_center spans) and box
// dimensions (pieces_dims spans, floored at 1 px). Frames, scores, sources
// and coherence are untouched.
Track smooth_track(const Track& track, int pieces_center = 10, int pieces_dims = 5);

} // namespace verbtrack
