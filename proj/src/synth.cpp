#include "verbtrack/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "verbtrack/errors.hpp"
#include "verbtrack/mathutil.hpp"

namespace verbtrack {

Point scripted_position(const ParticipantScript& p, int t) {
    double x = p.x0, y = p.y0;
    int at = 0;
    for (const auto& seg : p.segments) {
        if (t <= at) break;
        int tau = std::min(t - at, seg.frames);
        x += seg.vx * tau + 0.5 * seg.ax * tau * tau;
        y += seg.vy * tau + 0.5 * seg.ay * tau * tau;
        at += seg.frames;
    }
    return {x, y};
}

bool interior_frame(const ParticipantScript& p, int t, int frame_count) {
    if (t < 0 || t + 2 > frame_count - 1) return false;
    int at = 0;
    for (const auto& seg : p.segments) {
        if (t >= at && t + 2 <= at + seg.frames) return true;
        at += seg.frames;
    }
    return false;
}

std::vector<std::string> archetype_verbs() {
    return {"approach", "bounce", "chase", "fall",
            "jump", "leave", "pick-up", "run"};
}

namespace {

AppearanceHistogram peaked_histogram(int bin_l, int bin_a, int bin_b, int bins = 12) {
    auto channel = [bins](int peak) {
        std::vector<double> h(bins, 0.0);
        peak = std::clamp(peak, 0, bins - 1);
        h[peak] = 0.7;
        double rest = 0.3;
        if (peak > 0) { h[peak - 1] += 0.15; rest -= 0.15; }
        if (peak + 1 < bins) { h[peak + 1] += 0.15; rest -= 0.15; }
        h[peak] += rest;
        return h;
    };
    AppearanceHistogram h;
    h.bins = bins;
    h.l = channel(bin_l);
    h.a = channel(bin_a);
    h.b = channel(bin_b);
    return h;
}

AppearanceHistogram uniform_histogram(int bins = 12) {
    AppearanceHistogram h;
    h.bins = bins;
    h.l.assign(bins, 1.0 / bins);
    h.a.assign(bins, 1.0 / bins);
    h.b.assign(bins, 1.0 / bins);
    return h;
}

double clamp_center(double c, double extent, double limit) {
    return std::clamp(c, extent / 2, limit - extent / 2);
}

} // namespace

SyntheticScene generate_scene(const SceneScript& script, const NoiseConfig& noise) {
    SyntheticScene scene;
    scene.verb = script.verb;

    DetectionStream& stream = scene.detections;
    stream.video_id = script.video_id;
    stream.frame_count = script.frame_count;
    stream.frames.assign(script.frame_count, {});

    // One detection source per class present in the scene.
    std::vector<std::string> classes;
    for (const auto& p : script.participants)
        if (std::find(classes.begin(), classes.end(), p.class_label) == classes.end())
            classes.push_back(p.class_label);
    for (const auto& c : classes)
        stream.sources.push_back(SourceInfo{c + "-det", 0.0, c, std::nullopt});

    // Exact ground truth (clamped into the frame).
    std::vector<std::vector<DetectionBox>> truth(script.participants.size());
    for (std::size_t pi = 0; pi < script.participants.size(); ++pi) {
        const auto& p = script.participants[pi];
        Track gt;
        gt.video_id = script.video_id;
        gt.class_label = p.class_label;
        gt.t0 = 0;
        gt.t1 = script.frame_count - 1;
        for (int t = 0; t < script.frame_count; ++t) {
            Point pos = scripted_position(p, t);
            DetectionBox box;
            box.frame = t;
            box.cx = clamp_center(pos.x, p.w, script.width);
            box.cy = clamp_center(pos.y, p.h, script.height);
            box.w = p.w;
            box.h = p.h;
            box.score = 1.0;
            box.source_id = p.class_label + "-det";
            gt.boxes.push_back(box);
        }
        truth[pi] = gt.boxes;
        scene.ground_truth.push_back(std::move(gt));
    }

    std::mt19937_64 rng(noise.seed);
    std::normal_distribution<double> jit(0.0, std::max(1e-12, noise.jitter));
    std::normal_distribution<double> size_jit(0.0, std::max(1e-12, noise.size_jitter));
    std::normal_distribution<double> true_score(noise.true_score_mean,
                                                noise.true_score_std);
    std::normal_distribution<double> fp_score(noise.fp_score_mean, noise.fp_score_std);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    for (int t = 0; t < script.frame_count; ++t) {
        for (std::size_t pi = 0; pi < script.participants.size(); ++pi) {
            const auto& p = script.participants[pi];
            if (unit(rng) < noise.fn_rate) continue; // dropped detection
            DetectionBox box = truth[pi][t];
            if (noise.jitter > 0.0) {
                box.cx += jit(rng);
                box.cy += jit(rng);
            }
            if (noise.size_jitter > 0.0) {
                box.w = std::max(2.0, box.w + size_jit(rng));
                box.h = std::max(2.0, box.h + size_jit(rng));
            }
            box.score = true_score(rng);
            if (noise.supply_appearance)
                box.appearance = peaked_histogram(p.look_l, p.look_a, p.look_b);
            stream.frames[t].push_back(std::move(box));
        }
        // Spurious boxes per source, sized like that class's participants.
        for (const auto& src : stream.sources) {
            double mean_w = 0.0, mean_h = 0.0;
            int cnt = 0;
            for (const auto& p : script.participants)
                if (p.class_label == src.class_label) {
                    mean_w += p.w;
                    mean_h += p.h;
                    ++cnt;
                }
            mean_w /= cnt;
            mean_h /= cnt;
            std::poisson_distribution<int> nfp(noise.fp_rate);
            int count = noise.fp_rate > 0.0 ? nfp(rng) : 0;
            for (int i = 0; i < count; ++i) {
                DetectionBox box;
                box.frame = t;
                box.w = mean_w * (0.5 + unit(rng));
                box.h = mean_h * (0.5 + unit(rng));
                box.cx = clamp_center(unit(rng) * script.width, box.w, script.width);
                box.cy = clamp_center(unit(rng) * script.height, box.h, script.height);
                box.score = fp_score(rng);
                box.source_id = src.source_id;
                if (noise.supply_appearance) box.appearance = uniform_histogram();
                stream.frames[t].push_back(std::move(box));
            }
        }
    }

    // Correspondences: a grid inside every true box following the scripted
    // motion (including the stretch when the box rescales), plus a static
    // background lattice outside the objects.
    MotionField& field = scene.field;
    field.frame_count = script.frame_count;
    field.pairs.assign(std::max(0, script.frame_count - 1), {});
    int g = std::max(2, noise.grid);
    for (int t = 0; t + 1 < script.frame_count; ++t) {
        for (std::size_t pi = 0; pi < script.participants.size(); ++pi) {
            const DetectionBox& a = truth[pi][t];
            const DetectionBox& b = truth[pi][t + 1];
            for (int iy = 0; iy < g; ++iy) {
                for (int ix = 0; ix < g; ++ix) {
                    double ux = (ix + 0.5) / g - 0.5; // relative in-box coords
                    double uy = (iy + 0.5) / g - 0.5;
                    Correspondence c;
                    c.x = a.cx + ux * a.w;
                    c.y = a.cy + uy * a.h;
                    c.x2 = b.cx + ux * b.w;
                    c.y2 = b.cy + uy * b.h;
                    field.pairs[t].push_back(c);
                }
            }
        }
        for (int y = 64; y < script.height; y += 128) {
            for (int x = 64; x < script.width; x += 128) {
                bool covered = false;
                for (std::size_t pi = 0; pi < script.participants.size() && !covered; ++pi)
                    covered = strictly_inside(truth[pi][t], x, y);
                if (covered) continue;
                field.pairs[t].push_back(Correspondence{
                    static_cast<double>(x), static_cast<double>(y),
                    static_cast<double>(x), static_cast<double>(y)});
            }
        }
    }
    return scene;
}

namespace {

struct Draw {
    std::mt19937_64 rng;
    explicit Draw(std::uint64_t seed) : rng(seed) {}
    double range(double a, double b) {
        return std::uniform_real_distribution<double>(a, b)(rng);
    }
    int irange(int a, int b) { // inclusive
        return std::uniform_int_distribution<int>(a, b)(rng);
    }
    bool flip() { return irange(0, 1) == 1; }
};

constexpr double kEdgePad = 12.0;

ParticipantScript person(Draw& d, double x0, double y_ground) {
    ParticipantScript p;
    p.name = "agent";
    p.class_label = "person";
    p.w = d.range(52, 68);
    p.h = d.range(150, 180);
    p.x0 = x0;
    p.y0 = y_ground - p.h / 2;
    p.look_l = 7;
    p.look_a = 3;
    p.look_b = 8;
    return p;
}

ParticipantScript ball(Draw& d, double x0, double y_ground) {
    ParticipantScript p;
    p.name = "patient";
    p.class_label = "ball";
    p.w = d.range(36, 52);
    p.h = p.w;
    p.x0 = x0;
    p.y0 = y_ground - p.h / 2;
    p.look_l = 4;
    p.look_a = 9;
    p.look_b = 2;
    return p;
}

void pad_with_rest(ParticipantScript& p, int frame_count) {
    int used = 0;
    for (const auto& s : p.segments) used += s.frames;
    if (used < frame_count - 1)
        p.segments.push_back(MotionSegment{frame_count - 1 - used, 0, 0, 0, 0});
}

} // namespace

SceneScript make_archetype_script(const std::string& verb, std::uint64_t variation,
                                  int width, int height) {
    Draw d(mix_seed(variation, verb));
    SceneScript s;
    s.verb = verb;
    s.width = width;
    s.height = height;
    s.frame_count = d.irange(80, 110);
    const double ground = height - 100.0;
    const int steps = s.frame_count - 1;
    const int dir = d.flip() ? 1 : -1;

    auto left_edge = [&](double w) { return w / 2 + kEdgePad; };
    auto right_edge = [&](double w) { return width - w / 2 - kEdgePad; };
    auto start_for = [&](double w, double travel) {
        // Start so `travel` (signed) stays inside the frame.
        return travel >= 0 ? left_edge(w) : right_edge(w);
    };

    if (verb == "run") {
        double speed = d.range(11, 15) * dir;
        ParticipantScript p = person(d, 0, ground);
        double max_span = right_edge(p.w) - left_edge(p.w);
        if (std::fabs(speed) * steps > max_span) speed = dir * max_span / steps;
        p.x0 = start_for(p.w, speed * steps);
        p.segments.push_back(MotionSegment{steps, speed, 0, 0, 0});
        s.participants.push_back(p);
    } else if (verb == "approach" || verb == "pick-up") {
        ParticipantScript agent = person(d, 0, ground);
        ParticipantScript patient = ball(d, 0, ground);
        double gap0 = d.range(420, 600);
        double gap1 = verb == "approach" ? d.range(70, 100)
                                         : (agent.w + patient.w) / 2 * 0.5;
        double speed = d.range(6.0, 9.0);
        int t_move = static_cast<int>(std::ceil((gap0 - gap1) / speed));
        int budget = verb == "approach" ? steps - 8 : steps / 2;
        if (t_move > budget) {
            t_move = budget;
            speed = (gap0 - gap1) / t_move;
        }
        if (dir > 0) {
            agent.x0 = left_edge(agent.w);
            patient.x0 = agent.x0 + gap0;
        } else {
            agent.x0 = right_edge(agent.w);
            patient.x0 = agent.x0 - gap0;
        }
        agent.segments.push_back(MotionSegment{t_move, dir * speed, 0, 0, 0});
        if (verb == "pick-up") {
            int dwell = d.irange(4, 8);
            int carry = steps - t_move - dwell;
            double carry_speed = d.range(5.0, 8.0) * dir;
            // Keep the carried pair inside the frame.
            double end_x = patient.x0 + carry_speed * carry;
            double lo = left_edge(agent.w), hi = right_edge(agent.w);
            if (end_x < lo) carry_speed = (lo - patient.x0) / carry;
            if (end_x > hi) carry_speed = (hi - patient.x0) / carry;
            agent.segments.push_back(MotionSegment{dwell, 0, 0, 0, 0});
            agent.segments.push_back(MotionSegment{carry, carry_speed, 0, 0, 0});
            patient.segments.push_back(MotionSegment{t_move + dwell, 0, 0, 0, 0});
            int lift = std::min(5, carry);
            patient.segments.push_back(MotionSegment{lift, carry_speed, -3.0, 0, 0});
            patient.segments.push_back(
                MotionSegment{carry - lift, carry_speed, 0, 0, 0});
        }
        s.participants.push_back(agent);
        s.participants.push_back(patient);
    } else if (verb == "leave") {
        ParticipantScript agent = person(d, 0, ground);
        ParticipantScript patient = ball(d, 0, ground);
        double gap1 = d.range(70, 100);
        int rest = d.irange(8, 15);
        double speed = d.range(6.0, 9.0);
        // The agent walks `dir`-ward away from the patient behind it.
        double travel = speed * (steps - rest);
        double lo = left_edge(agent.w), hi = right_edge(agent.w);
        if (dir > 0) {
            agent.x0 = lo;
            if (agent.x0 + travel > hi) speed = (hi - agent.x0) / (steps - rest);
            patient.x0 = agent.x0 - dir * gap1;
        } else {
            agent.x0 = hi;
            if (agent.x0 - travel < lo) speed = (agent.x0 - lo) / (steps - rest);
            patient.x0 = agent.x0 - dir * gap1;
        }
        patient.x0 = std::clamp(patient.x0, left_edge(patient.w), right_edge(patient.w));
        agent.segments.push_back(MotionSegment{rest, 0, 0, 0, 0});
        agent.segments.push_back(MotionSegment{steps - rest, dir * speed, 0, 0, 0});
        s.participants.push_back(agent);
        s.participants.push_back(patient);
    } else if (verb == "chase") {
        ParticipantScript agent = person(d, 0, ground);
        ParticipantScript patient = ball(d, 0, ground);
        double gap = d.range(140, 220);
        double speed = d.range(7.0, 10.0);
        double lo_a = left_edge(agent.w), hi_a = right_edge(agent.w);
        double lo_p = left_edge(patient.w), hi_p = right_edge(patient.w);
        if (dir > 0) {
            agent.x0 = lo_a;
            patient.x0 = agent.x0 + gap;
            speed = std::min(speed, (hi_p - patient.x0) / steps);
        } else {
            agent.x0 = hi_a;
            patient.x0 = agent.x0 - gap;
            speed = std::min(speed, (patient.x0 - lo_p) / steps);
        }
        agent.segments.push_back(MotionSegment{steps, dir * speed, 0, 0, 0});
        patient.segments.push_back(MotionSegment{steps, dir * speed, 0, 0, 0});
        s.participants.push_back(agent);
        s.participants.push_back(patient);
    } else if (verb == "jump") {
        ParticipantScript p = person(d, 0, ground);
        p.x0 = d.range(left_edge(p.w) + 200, right_edge(p.w) - 200);
        int rest = d.irange(8, 15);
        int flight = 2 * d.irange(10, 15); // even, 20..30 frames in the air
        double h_jump = d.range(70, 130);
        double g = 8.0 * h_jump / (flight * flight);
        double vy0 = -4.0 * h_jump / flight;
        double drift = d.range(-0.6, 0.6);
        p.segments.push_back(MotionSegment{rest, 0, 0, 0, 0});
        p.segments.push_back(MotionSegment{flight, drift, vy0, 0, g});
        s.participants.push_back(p);
    } else if (verb == "fall") {
        ParticipantScript p = person(d, 0, ground);
        p.x0 = d.range(left_edge(p.w) + 200, right_edge(p.w) - 200);
        double drop = d.range(90, 160);
        p.y0 -= drop; // starts on a ledge above the ground line
        int rest = d.irange(8, 15);
        double a = d.range(0.8, 1.4);
        int t_fall = static_cast<int>(std::ceil(std::sqrt(2.0 * drop / a)));
        a = 2.0 * drop / (static_cast<double>(t_fall) * t_fall); // land on a frame
        p.segments.push_back(MotionSegment{rest, 0, 0, 0, 0});
        p.segments.push_back(MotionSegment{t_fall, 0, 0, 0, a});
        s.participants.push_back(p);
    } else if (verb == "bounce") {
        ParticipantScript p = ball(d, 0, ground);
        double drift = d.range(2.0, 5.0) * dir;
        double span = drift * steps;
        p.x0 = start_for(p.w, span);
        if (p.x0 + span < left_edge(p.w) || p.x0 + span > right_edge(p.w))
            drift = (dir > 0 ? right_edge(p.w) - p.x0 : left_edge(p.w) - p.x0) / steps;
        double y_contact = ground - p.h / 2;
        double y_start = d.range(180, 260);
        p.y0 = y_start;
        double drop = y_contact - y_start;
        double g = d.range(0.8, 1.3);
        int t0 = static_cast<int>(std::ceil(std::sqrt(2.0 * drop / g)));
        g = 2.0 * drop / (static_cast<double>(t0) * t0);
        p.segments.push_back(MotionSegment{t0, drift, 0, 0, g});
        double e = d.range(0.65, 0.8);
        double h_prev = drop;
        int used = t0;
        for (int b = 0; b < 3 && used + 4 <= steps; ++b) {
            double h_b = h_prev * e * e;
            int t_b = std::max(4, 2 * static_cast<int>(std::lround(
                                       std::sqrt(2.0 * h_b / g))));
            t_b = std::min(t_b, steps - used);
            if (t_b < 2) break;
            double g_b = 8.0 * h_b / (static_cast<double>(t_b) * t_b);
            p.segments.push_back(
                MotionSegment{t_b, drift, -g_b * t_b / 2.0, 0, g_b});
            used += t_b;
            h_prev = h_b;
        }
        s.participants.push_back(p);
    } else {
        throw SchemaError("unknown archetype verb '" + verb + "'");
    }

    for (auto& p : s.participants) pad_with_rest(p, s.frame_count);
    return s;
}

} // namespace verbtrack
