#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "verbtrack/detection.hpp"
#include "verbtrack/flow.hpp"

namespace verbtrack {

// Edge-cost weights: confidence is rewarded, flow disagreement and appearance
// change are penalized. Defaults follow the usual operating point (flow a
// tenth of confidence, appearance on par with it).
struct CostWeights {
    double confidence = 1.0;
    double flow = 0.1;
    double appearance = 1.0;
};

// Drops every box whose score falls below its source's learned threshold
// minus `offset`. Lowering the bar (offset 1 by default) deliberately floods
// the tracker with weak candidates; the path search sorts them out.
// Throws MissingThreshold when a box's source has no metadata entry.
DetectionStream bias_detections(const DetectionStream& stream, double offset = 1.0);

// Greedy per-frame, per-source non-maxima suppression keeping the highest
// scoring box of any group whose pairwise IoU exceeds `overlap`. Ties go to
// the earlier-indexed box; surviving boxes keep their original order.
DetectionStream nms(const DetectionStream& stream, double overlap = 0.8);

struct Subinterval {
    int t0 = 0, t1 = 0;  // inclusive frame range
    double threshold = 0.0; // min(otsu, learned_threshold + cap_offset)
};

// Finds the frame range over which the object is present: per-frame best
// scores are histogrammed (`bins` buckets), the bin-boundary threshold with
// maximal between-class variance is chosen (ties toward the lower value) and
// capped at learned_threshold + cap_offset; the subinterval spans the first
// to the last frame whose best score clears the result.
// Throws NoObjectPresent when no frame clears it (or the source is empty).
Subinterval subinterval(const DetectionStream& stream, const std::string& source_id,
                        int bins = 50, double cap_offset = 0.4);

// Same, over the union of several sources with an explicit pool threshold
// (merged pools operate at threshold 0 because their scores are offset).
Subinterval subinterval_pool(const DetectionStream& stream,
                             const std::set<std::string>& source_ids,
                             double learned_threshold,
                             int bins = 50, double cap_offset = 0.4);

// Otsu split of a histogram over [lo, hi]: evaluates the `bins` bin-boundary
// candidates and returns the value maximizing between-class variance, ties
// toward the lower boundary. Exposed for the threshold search above.
double otsu_threshold(const std::vector<double>& values, int bins);

// Transition cost from box u (frame t) to box v (frame t+1):
//   -confidence * score(v)
//   + flow * || center(v) - (center(u) + in-box velocity of u) ||
//   + appearance * emd(hist(u), hist(v))   [only if enabled and both present]
double edge_cost(const DetectionBox& u, const DetectionBox& v,
                 const MotionField& field, const CostWeights& weights,
                 bool use_appearance = false);

struct ViterbiStats {
    std::size_t edge_evaluations = 0;
};

// Globally optimal single-object path over [interval.t0, interval.t1]: one
// candidate per frame, minimizing summed edge costs; the first frame charges
// only its confidence term. Ties break toward the earlier-indexed candidate.
// Candidates are the stream's boxes whose source_id is in `source_ids`.
// Throws EmptyFrame when some frame offers no candidate.
Track viterbi_select(const DetectionStream& stream, const MotionField& field,
                     const std::set<std::string>& source_ids,
                     const Subinterval& interval, const CostWeights& weights,
                     bool use_appearance = false, ViterbiStats* stats = nullptr);

// After extracting a track, demote everything it explains: in each frame of
// the track, any detection whose center lies strictly inside the track's box
// is re-assigned the frame's lower-quartile score (the largest of the lowest
// ceil(n/4) pre-rescoring scores among the frame's n detections), so the
// next pass finds the next-best object instead of the same one.
DetectionStream rescore_for_next(const DetectionStream& stream, const Track& track);

// Pools several detectors of one class into one candidate set by subtracting
// each source's subinterval threshold from its scores (putting sources with
// different operating points on a common scale). Box source_ids survive so a
// track still records which detector fired per frame. Sources whose
// subinterval cannot be computed (no detections) contribute nothing.
// The pooled sources are re-listed with learned_threshold 0.
DetectionStream merge_sources(const DetectionStream& stream,
                              const std::vector<std::string>& source_ids,
                              int bins = 50, double cap_offset = 0.4);

struct TrackOptions {
    CostWeights weights;
    int bins = 50;
    double cap_offset = 0.4;
    int projection_depth = kMaxProjectionDepth; // 0 disables projection
    double pool_threshold = 0.0; // learned threshold of the candidate pool
    bool use_pool_threshold = false; // else: single source's own threshold
};

// Extracts up to n tracks of one candidate pool by repeated application:
// subinterval -> optimal path -> rescore. The appearance term joins from the
// second iteration onward (its job is keeping later tracks off earlier
// ones' objects). Stops early when no object remains; tracks come back
// sorted by descending coherence.
std::vector<Track> track_n(const DetectionStream& stream, const MotionField& field,
                           int n, const std::set<std::string>& source_ids,
                           const TrackOptions& opts = {});

} // namespace verbtrack
