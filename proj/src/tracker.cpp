#include "verbtrack/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "verbtrack/errors.hpp"

namespace verbtrack {

DetectionStream bias_detections(const DetectionStream& stream, double offset) {
    DetectionStream out = stream;
    for (auto& frame : out.frames) {
        std::vector<DetectionBox> kept;
        for (auto& box : frame) {
            const SourceInfo* src = out.find_source(box.source_id);
            if (src == nullptr)
                throw MissingThreshold("no metadata for source '" + box.source_id + "'");
            if (box.score >= src->learned_threshold - offset)
                kept.push_back(std::move(box));
        }
        frame = std::move(kept);
    }
    return out;
}

DetectionStream nms(const DetectionStream& stream, double overlap) {
    DetectionStream out = stream;
    for (auto& frame : out.frames) {
        std::vector<std::size_t> order(frame.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return frame[a].score > frame[b].score;
        });
        std::vector<bool> keep(frame.size(), false);
        std::vector<std::size_t> winners;
        for (std::size_t idx : order) {
            bool suppressed = false;
            for (std::size_t w : winners) {
                if (frame[w].source_id != frame[idx].source_id) continue;
                if (iou(frame[w], frame[idx]) > overlap) {
                    suppressed = true;
                    break;
                }
            }
            if (!suppressed) {
                keep[idx] = true;
                winners.push_back(idx);
            }
        }
        std::vector<DetectionBox> kept;
        for (std::size_t i = 0; i < frame.size(); ++i)
            if (keep[i]) kept.push_back(std::move(frame[i]));
        frame = std::move(kept);
    }
    return out;
}

double otsu_threshold(const std::vector<double>& values, int bins) {
    double lo = *std::min_element(values.begin(), values.end());
    double hi = *std::max_element(values.begin(), values.end());
    if (!(hi > lo)) return lo;
    double width = (hi - lo) / bins;
    std::vector<double> count(bins, 0.0);
    for (double v : values) {
        int b = std::min(bins - 1, static_cast<int>((v - lo) / (hi - lo) * bins));
        count[b] += 1.0;
    }
    double total = static_cast<double>(values.size());
    double total_mean = 0.0;
    for (int i = 0; i < bins; ++i)
        total_mean += count[i] * (lo + (i + 0.5) * width);
    total_mean /= total;

    // Sweep the bin-boundary splits, carrying class-0 moments.
    int best_k = 0;
    double best_var = -1.0;
    double w0 = 0.0, sum0 = 0.0;
    for (int k = 0; k < bins; ++k) {
        // Split: bins [0, k) vs [k, bins).
        double var = 0.0;
        if (w0 > 0.0 && w0 < total) {
            double mu0 = sum0 / w0;
            double mu1 = (total_mean * total - sum0) / (total - w0);
            double p0 = w0 / total, p1 = 1.0 - p0;
            var = p0 * p1 * (mu0 - mu1) * (mu0 - mu1);
        }
        // Tolerant comparison keeps mathematically tied splits tied under
        // float noise, so ties resolve toward the lower threshold.
        if (var > best_var + 1e-12 * std::max(1.0, std::fabs(best_var))) {
            best_var = var;
            best_k = k;
        }
        w0 += count[k];
        sum0 += count[k] * (lo + (k + 0.5) * width);
    }
    return lo + best_k * width;
}

namespace {

Subinterval subinterval_impl(const DetectionStream& stream,
                             const std::set<std::string>& ids,
                             double learned, int bins, double cap_offset) {
    std::vector<double> best(stream.frame_count,
                             -std::numeric_limits<double>::infinity());
    for (int t = 0; t < stream.frame_count; ++t)
        for (const auto& box : stream.frames[t])
            if (box.projected_depth == 0 && ids.count(box.source_id))
                best[t] = std::max(best[t], box.score);
    std::vector<double> finite;
    for (double v : best)
        if (std::isfinite(v)) finite.push_back(v);
    if (finite.empty())
        throw NoObjectPresent("no detections for the requested source(s)");
    double tau = std::min(otsu_threshold(finite, bins), learned + cap_offset);
    int t0 = -1, t1 = -1;
    for (int t = 0; t < stream.frame_count; ++t) {
        if (best[t] >= tau) {
            if (t0 < 0) t0 = t;
            t1 = t;
        }
    }
    if (t0 < 0) throw NoObjectPresent("no frame reaches the presence threshold");
    return Subinterval{t0, t1, tau};
}

} // namespace

Subinterval subinterval(const DetectionStream& stream, const std::string& source_id,
                        int bins, double cap_offset) {
    const SourceInfo* src = stream.find_source(source_id);
    if (src == nullptr)
        throw MissingThreshold("no metadata for source '" + source_id + "'");
    return subinterval_impl(stream, {source_id}, src->learned_threshold, bins,
                            cap_offset);
}

Subinterval subinterval_pool(const DetectionStream& stream,
                             const std::set<std::string>& source_ids,
                             double learned_threshold, int bins, double cap_offset) {
    return subinterval_impl(stream, source_ids, learned_threshold, bins, cap_offset);
}

namespace {

double edge_cost_from_pred(double pred_x, double pred_y,
                           const DetectionBox& u, const DetectionBox& v,
                           const CostWeights& w, bool use_appearance) {
    double cost = -w.confidence * v.score;
    cost += w.flow * std::hypot(v.cx - pred_x, v.cy - pred_y);
    if (use_appearance && u.appearance && v.appearance)
        cost += w.appearance * emd(*u.appearance, *v.appearance);
    return cost;
}

} // namespace

double edge_cost(const DetectionBox& u, const DetectionBox& v,
                 const MotionField& field, const CostWeights& weights,
                 bool use_appearance) {
    BoxMotion m = box_motion(field, u.frame, u);
    return edge_cost_from_pred(u.cx + m.vx, u.cy + m.vy, u, v, weights,
                               use_appearance);
}

Track viterbi_select(const DetectionStream& stream, const MotionField& field,
                     const std::set<std::string>& source_ids,
                     const Subinterval& interval, const CostWeights& weights,
                     bool use_appearance, ViterbiStats* stats) {
    const int t0 = interval.t0, t1 = interval.t1;
    std::vector<std::vector<const DetectionBox*>> cand(t1 - t0 + 1);
    for (int t = t0; t <= t1; ++t) {
        for (const auto& box : stream.frames[t])
            if (source_ids.count(box.source_id)) cand[t - t0].push_back(&box);
        if (cand[t - t0].empty())
            throw EmptyFrame("frame " + std::to_string(t) + " has no candidates");
    }

    const std::size_t steps = cand.size();
    std::vector<std::vector<double>> cost(steps);
    std::vector<std::vector<int>> back(steps);
    cost[0].resize(cand[0].size());
    back[0].assign(cand[0].size(), -1);
    for (std::size_t j = 0; j < cand[0].size(); ++j)
        cost[0][j] = -weights.confidence * cand[0][j]->score;

    for (std::size_t s = 1; s < steps; ++s) {
        const auto& prev = cand[s - 1];
        const auto& cur = cand[s];
        // The flow prediction depends only on the predecessor; hoist it.
        std::vector<double> px(prev.size()), py(prev.size());
        for (std::size_t i = 0; i < prev.size(); ++i) {
            BoxMotion m = box_motion(field, prev[i]->frame, *prev[i]);
            px[i] = prev[i]->cx + m.vx;
            py[i] = prev[i]->cy + m.vy;
        }
        cost[s].resize(cur.size());
        back[s].resize(cur.size());
        for (std::size_t j = 0; j < cur.size(); ++j) {
            double best = std::numeric_limits<double>::infinity();
            int arg = -1;
            for (std::size_t i = 0; i < prev.size(); ++i) {
                double c = cost[s - 1][i] +
                           edge_cost_from_pred(px[i], py[i], *prev[i], *cur[j],
                                               weights, use_appearance);
                if (stats) ++stats->edge_evaluations;
                if (c < best) {
                    best = c;
                    arg = static_cast<int>(i);
                }
            }
            cost[s][j] = best;
            back[s][j] = arg;
        }
    }

    std::size_t last = 0;
    for (std::size_t j = 1; j < cost[steps - 1].size(); ++j)
        if (cost[steps - 1][j] < cost[steps - 1][last]) last = j;

    Track track;
    track.video_id = stream.video_id;
    track.t0 = t0;
    track.t1 = t1;
    track.coherence = -cost[steps - 1][last];
    track.boxes.resize(steps);
    int j = static_cast<int>(last);
    for (int s = static_cast<int>(steps) - 1; s >= 0; --s) {
        track.boxes[s] = *cand[s][j];
        j = back[s][j];
    }
    if (const SourceInfo* src = stream.find_source(track.boxes.front().source_id))
        track.class_label = src->class_label;
    return track;
}

DetectionStream rescore_for_next(const DetectionStream& stream, const Track& track) {
    DetectionStream out = stream;
    for (int t = track.t0; t <= track.t1 && t < out.frame_count; ++t) {
        auto& frame = out.frames[t];
        if (frame.empty()) continue;
        std::vector<double> scores;
        scores.reserve(frame.size());
        for (const auto& box : frame) scores.push_back(box.score);
        std::sort(scores.begin(), scores.end());
        std::size_t q = (scores.size() + 3) / 4; // ceil(n/4)
        double quartile = scores[q - 1];
        const DetectionBox& owned = track.boxes[t - track.t0];
        for (auto& box : frame)
            if (strictly_inside(owned, box.cx, box.cy)) box.score = quartile;
    }
    return out;
}

DetectionStream merge_sources(const DetectionStream& stream,
                              const std::vector<std::string>& source_ids,
                              int bins, double cap_offset) {
    DetectionStream out;
    out.video_id = stream.video_id;
    out.frame_count = stream.frame_count;
    out.frames.assign(stream.frame_count, {});

    std::map<std::string, double> offset_of;
    for (const auto& id : source_ids) {
        const SourceInfo* src = stream.find_source(id);
        if (src == nullptr)
            throw MissingThreshold("no metadata for source '" + id + "'");
        try {
            offset_of[id] = subinterval(stream, id, bins, cap_offset).threshold;
        } catch (const NoObjectPresent&) {
            continue; // an absent detector contributes nothing to the pool
        }
        SourceInfo pooled = *src;
        pooled.learned_threshold = 0.0; // scores are offset onto a common scale
        out.sources.push_back(std::move(pooled));
    }
    for (int t = 0; t < stream.frame_count; ++t) {
        for (const auto& box : stream.frames[t]) {
            auto it = offset_of.find(box.source_id);
            if (it == offset_of.end()) continue;
            DetectionBox copy = box;
            copy.score -= it->second;
            out.frames[t].push_back(std::move(copy));
        }
    }
    return out;
}

namespace {

DetectionStream filter_to_sources(const DetectionStream& stream,
                                  const std::set<std::string>& ids) {
    DetectionStream out;
    out.video_id = stream.video_id;
    out.frame_count = stream.frame_count;
    for (const auto& s : stream.sources)
        if (ids.count(s.source_id)) out.sources.push_back(s);
    out.frames.assign(stream.frame_count, {});
    for (int t = 0; t < stream.frame_count; ++t)
        for (const auto& box : stream.frames[t])
            if (ids.count(box.source_id)) out.frames[t].push_back(box);
    return out;
}

} // namespace

std::vector<Track> track_n(const DetectionStream& stream, const MotionField& field,
                           int n, const std::set<std::string>& source_ids,
                           const TrackOptions& opts) {
    DetectionStream work = filter_to_sources(stream, source_ids);
    double learned = opts.pool_threshold;
    if (!opts.use_pool_threshold) {
        learned = -std::numeric_limits<double>::infinity();
        for (const auto& s : work.sources)
            learned = std::max(learned, s.learned_threshold);
    }

    std::vector<Track> tracks;
    for (int i = 0; i < n; ++i) {
        Subinterval si;
        try {
            si = subinterval_pool(work, source_ids, learned, opts.bins,
                                  opts.cap_offset);
        } catch (const NoObjectPresent&) {
            break; // fewer objects than asked for
        }
        DetectionStream candidates =
            opts.projection_depth > 0
                ? augment_with_projections(work, field, opts.projection_depth)
                : work;
        bool use_appearance = i >= 1 && opts.weights.appearance > 0.0;
        tracks.push_back(viterbi_select(candidates, field, source_ids, si,
                                        opts.weights, use_appearance));
        if (i + 1 < n) work = rescore_for_next(work, tracks.back());
    }
    std::stable_sort(tracks.begin(), tracks.end(),
                     [](const Track& a, const Track& b) {
                         return a.coherence > b.coherence;
                     });
    return tracks;
}

} // namespace verbtrack
