#include "verbtrack/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "verbtrack/errors.hpp"
#include "verbtrack/mathutil.hpp"

// Everything here recomputes its objective with plain loops and exhaustive
// enumeration; none of it calls the code it exists to check.

namespace verbtrack {

namespace {

constexpr std::uint64_t kPathCap = 3'000'000;
constexpr std::uint64_t kSequenceCap = 2'000'000;
constexpr std::size_t kAlignmentCap = 8;
constexpr int kTransportCap = 4;

struct NaiveMotion {
    double vx = 0.0, vy = 0.0;
};

NaiveMotion naive_box_motion(const MotionField& field, int frame,
                             const DetectionBox& box) {
    NaiveMotion m;
    if (frame < 0 || frame >= static_cast<int>(field.pairs.size())) return m;
    double sx = 0.0, sy = 0.0;
    int n = 0;
    for (const auto& c : field.pairs[frame]) {
        if (std::fabs(c.x - box.cx) <= box.w / 2 &&
            std::fabs(c.y - box.cy) <= box.h / 2) {
            sx += c.x2 - c.x;
            sy += c.y2 - c.y;
            ++n;
        }
    }
    if (n > 0) {
        m.vx = sx / n;
        m.vy = sy / n;
    }
    return m;
}

double naive_emd(const AppearanceHistogram& a, const AppearanceHistogram& b) {
    double total = 0.0;
    const std::vector<double>* va[3] = {&a.l, &a.a, &a.b};
    const std::vector<double>* vb[3] = {&b.l, &b.a, &b.b};
    for (int c = 0; c < 3; ++c) {
        double ca = 0.0, cb = 0.0, acc = 0.0;
        for (int i = 0; i < a.bins; ++i) {
            ca += (*va[c])[i];
            cb += (*vb[c])[i];
            acc += std::fabs(ca - cb);
        }
        total += acc / a.bins;
    }
    return total;
}

} // namespace

OraclePath oracle_best_path(const DetectionStream& stream, const MotionField& field,
                            const std::set<std::string>& source_ids,
                            const Subinterval& interval, const CostWeights& weights,
                            bool use_appearance) {
    std::vector<std::vector<const DetectionBox*>> cands;
    for (int t = interval.t0; t <= interval.t1; ++t) {
        std::vector<const DetectionBox*> here;
        for (const auto& box : stream.frames.at(t))
            if (source_ids.count(box.source_id)) here.push_back(&box);
        if (here.empty())
            throw EmptyFrame("no candidates at frame " + std::to_string(t));
        cands.push_back(std::move(here));
    }
    std::uint64_t paths = 1;
    for (const auto& c : cands) {
        paths *= c.size();
        if (paths > kPathCap)
            throw SizeExceeded("path enumeration exceeds cap");
    }

    const std::size_t T = cands.size();
    std::vector<int> idx(T, 0), best_idx;
    double best_cost = std::numeric_limits<double>::infinity();
    while (true) {
        double cost = 0.0;
        for (std::size_t t = 0; t < T; ++t) {
            const DetectionBox& v = *cands[t][idx[t]];
            cost += -weights.confidence * v.score;
            if (t > 0) {
                const DetectionBox& u = *cands[t - 1][idx[t - 1]];
                NaiveMotion m = naive_box_motion(field, u.frame, u);
                double dx = v.cx - (u.cx + m.vx);
                double dy = v.cy - (u.cy + m.vy);
                cost += weights.flow * std::sqrt(dx * dx + dy * dy);
                if (use_appearance && u.appearance && v.appearance)
                    cost += weights.appearance * naive_emd(*u.appearance, *v.appearance);
            }
        }
        if (cost < best_cost) {
            best_cost = cost;
            best_idx = idx;
        }
        // Advance the odometer (last frame fastest, so earlier tuples win ties).
        std::size_t pos = T;
        while (pos > 0) {
            --pos;
            if (++idx[pos] < static_cast<int>(cands[pos].size())) break;
            idx[pos] = 0;
            if (pos == 0) {
                OraclePath out;
                out.cost = best_cost;
                out.picks = best_idx;
                return out;
            }
        }
    }
}

namespace {

// log I0 by direct long-double power series; converges for every kappa the
// models can produce (the spread cap keeps kappa <= 1e3, far below overflow).
double naive_log_i0(double kappa) {
    long double x = kappa / 2.0L;
    long double term = 1.0L, sum = 1.0L;
    for (int k = 1; k < 5000; ++k) {
        term *= (x * x) / (static_cast<long double>(k) * k);
        sum += term;
        if (term < sum * 1e-20L) break;
    }
    return static_cast<double>(logl(sum));
}

double naive_emission_logpdf(const Emission& e, double x) {
    if (e.kind == FeatureKind::Angular) {
        double delta = x - e.mean;
        while (delta > kPi) delta -= kTwoPi;
        while (delta <= -kPi) delta += kTwoPi;
        return e.spread * std::cos(delta) - std::log(kTwoPi) -
               naive_log_i0(e.spread);
    }
    return -0.5 * std::log(kTwoPi * e.spread) -
           (x - e.mean) * (x - e.mean) / (2.0 * e.spread);
}

} // namespace

double oracle_hmm_loglik(const HmmModel& model, const FeatureSeries& series) {
    if (!(model.schema == series.schema))
        throw SchemaMismatch("model and series schemas differ");
    if (series.frames.empty()) throw EmptySeries("no frames to score");
    const int K = model.states;
    const std::size_t T = series.frames.size();
    double total = 1.0;
    for (std::size_t t = 0; t < T; ++t) {
        total *= K;
        if (total > static_cast<double>(kSequenceCap))
            throw SizeExceeded("state sequence enumeration exceeds cap");
    }

    std::vector<int> state(T, 0);
    double mx = -std::numeric_limits<double>::infinity();
    double acc = 0.0;
    while (true) {
        double lp = std::log(model.initial[state[0]]);
        for (std::size_t t = 0; t < T; ++t) {
            if (t > 0) lp += std::log(model.trans[state[t - 1]][state[t]]);
            const auto& row = series.frames[t];
            for (std::size_t f = 0; f < row.size(); ++f)
                lp += naive_emission_logpdf(model.output[state[t]][f], row[f]);
        }
        if (std::isinf(mx)) {
            mx = lp;
            acc = 1.0;
        } else if (lp <= mx) {
            acc += std::exp(lp - mx);
        } else {
            acc = acc * std::exp(mx - lp) + 1.0;
            mx = lp;
        }
        std::size_t pos = T;
        while (pos > 0) {
            --pos;
            if (++state[pos] < K) break;
            state[pos] = 0;
            if (pos == 0) return mx + std::log(acc);
        }
    }
}

namespace {

double naive_frame_distance(const FeatureSchema& schema, const std::vector<double>& a,
                            const std::vector<double>& b, const ZScore* z) {
    double acc = 0.0;
    for (std::size_t f = 0; f < a.size(); ++f) {
        double d;
        if (schema.kinds[f] == FeatureKind::Angular) {
            d = a[f] - b[f];
            while (d > kPi) d -= kTwoPi;
            while (d <= -kPi) d += kTwoPi;
        } else {
            d = a[f] - b[f];
            if (z) d /= z->stds[f];
        }
        acc += d * d;
    }
    return std::sqrt(acc);
}

void walk_alignments(const std::vector<std::vector<double>>& dist, std::size_t i,
                     std::size_t j, double acc, double& best) {
    acc += dist[i][j];
    if (acc >= best) return; // every extension only adds cost
    if (i + 1 == dist.size() && j + 1 == dist[0].size()) {
        best = acc;
        return;
    }
    if (i + 1 < dist.size()) walk_alignments(dist, i + 1, j, acc, best);
    if (j + 1 < dist[0].size()) walk_alignments(dist, i, j + 1, acc, best);
    if (i + 1 < dist.size() && j + 1 < dist[0].size())
        walk_alignments(dist, i + 1, j + 1, acc, best);
}

} // namespace

double oracle_dtw(const FeatureSeries& a, const FeatureSeries& b,
                  const ZScore* zscore) {
    if (!(a.schema == b.schema)) throw SchemaMismatch("series schemas differ");
    if (a.frames.empty() || b.frames.empty())
        throw EmptySeries("no frames to align");
    if (a.frames.size() > kAlignmentCap || b.frames.size() > kAlignmentCap)
        throw SizeExceeded("alignment enumeration exceeds cap");
    std::vector<std::vector<double>> dist(
        a.frames.size(), std::vector<double>(b.frames.size(), 0.0));
    for (std::size_t i = 0; i < a.frames.size(); ++i)
        for (std::size_t j = 0; j < b.frames.size(); ++j)
            dist[i][j] =
                naive_frame_distance(a.schema, a.frames[i], b.frames[j], zscore);
    double best = std::numeric_limits<double>::infinity();
    walk_alignments(dist, 0, 0, 0.0, best);
    return best;
}

double oracle_otsu(const std::vector<double>& values, int bins) {
    double lo = *std::min_element(values.begin(), values.end());
    double hi = *std::max_element(values.begin(), values.end());
    if (!(hi > lo)) return lo;
    double width = (hi - lo) / bins;
    auto bin_of = [&](double v) {
        return std::min(bins - 1, static_cast<int>((v - lo) / (hi - lo) * bins));
    };
    int best_k = 0;
    double best_var = -1.0;
    for (int k = 0; k < bins; ++k) {
        // Recompute both classes from scratch for this split.
        double n0 = 0.0, s0 = 0.0, n1 = 0.0, s1 = 0.0;
        for (double v : values) {
            int b = bin_of(v);
            double rep = lo + (b + 0.5) * width;
            if (b < k) {
                n0 += 1.0;
                s0 += rep;
            } else {
                n1 += 1.0;
                s1 += rep;
            }
        }
        double var = 0.0;
        if (n0 > 0.0 && n1 > 0.0) {
            double mu0 = s0 / n0, mu1 = s1 / n1;
            double total = n0 + n1;
            var = (n0 / total) * (n1 / total) * (mu0 - mu1) * (mu0 - mu1);
        }
        // Same tolerant tie rule as the streaming version, so mathematically
        // tied splits resolve toward the lower threshold in both.
        if (var > best_var + 1e-12 * std::max(1.0, std::fabs(best_var))) {
            best_var = var;
            best_k = k;
        }
    }
    return lo + best_k * width;
}

namespace {

// Min-cost transport between two mass vectors on a line. With a convex
// ground cost the monotone coupling is optimal, so shipping mass in bin
// order (northwest-corner rule) solves the program exactly.
double transport_cost(const std::vector<double>& supply,
                      const std::vector<double>& demand, int bins) {
    const int n = static_cast<int>(supply.size());
    std::vector<double> s = supply, d = demand;
    const double eps = 1e-15;
    double total = 0.0;
    int i = 0, j = 0;
    while (i < n && j < n) {
        double f = std::min(s[i], d[j]);
        if (f > eps) {
            total += f * std::fabs(i - j) / static_cast<double>(bins);
            s[i] -= f;
            d[j] -= f;
        }
        if (s[i] <= eps)
            ++i;
        else
            ++j;
    }
    return total;
}

} // namespace

double oracle_emd(const AppearanceHistogram& h1, const AppearanceHistogram& h2) {
    if (h1.bins != h2.bins)
        throw SchemaMismatch("histogram bin counts differ");
    if (h1.bins > kTransportCap)
        throw SizeExceeded("transport enumeration exceeds cap");
    double total = 0.0;
    total += transport_cost(h1.l, h2.l, h1.bins);
    total += transport_cost(h1.a, h2.a, h1.bins);
    total += transport_cost(h1.b, h2.b, h1.bins);
    return total;
}

} // namespace verbtrack
