#include "verbtrack/dtw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "verbtrack/errors.hpp"
#include "verbtrack/mathutil.hpp"

namespace verbtrack {

namespace {

double frame_distance(const FeatureSchema& schema, const std::vector<double>& a,
                      const std::vector<double>& b, const ZScore* z) {
    double sum = 0.0;
    for (std::size_t f = 0; f < schema.size(); ++f) {
        double d;
        if (schema.kinds[f] == FeatureKind::Angular) {
            d = angular_distance(a[f], b[f]);
        } else {
            d = a[f] - b[f];
            if (z) d /= z->stds[f];
        }
        sum += d * d;
    }
    return std::sqrt(sum);
}

} // namespace

double dtw_distance(const FeatureSeries& a, const FeatureSeries& b,
                    const ZScore* zscore) {
    if (!(a.schema == b.schema))
        throw SchemaMismatch("series schemas differ");
    if (a.frames.empty() || b.frames.empty())
        throw EmptySeries("cannot align an empty series");
    const std::size_t n = a.frames.size(), m = b.frames.size();
    std::vector<double> prev(m), cur(m);
    prev[0] = frame_distance(a.schema, a.frames[0], b.frames[0], zscore);
    for (std::size_t j = 1; j < m; ++j)
        prev[j] = prev[j - 1] + frame_distance(a.schema, a.frames[0], b.frames[j], zscore);
    for (std::size_t i = 1; i < n; ++i) {
        cur[0] = prev[0] + frame_distance(a.schema, a.frames[i], b.frames[0], zscore);
        for (std::size_t j = 1; j < m; ++j) {
            double best = std::min({prev[j], cur[j - 1], prev[j - 1]});
            cur[j] = best + frame_distance(a.schema, a.frames[i], b.frames[j], zscore);
        }
        std::swap(prev, cur);
    }
    return prev[m - 1];
}

std::string dtw_classify(const DtwBank& bank, const FeatureSeries& query) {
    if (bank.exemplars.empty()) throw EmptyBank("bank holds no exemplars");
    double best = std::numeric_limits<double>::infinity();
    const LabeledSeries* winner = nullptr;
    for (const auto& e : bank.exemplars) {
        double d = dtw_distance(e.series, query,
                                bank.zscore ? &*bank.zscore : nullptr);
        if (d < best) { // strict: ties keep the earliest exemplar
            best = d;
            winner = &e;
        }
    }
    return winner->verb;
}

double dtw_nearest(const DtwBank& bank, const FeatureSeries& query) {
    if (bank.exemplars.empty()) throw EmptyBank("bank holds no exemplars");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& e : bank.exemplars)
        best = std::min(best, dtw_distance(e.series, query,
                                           bank.zscore ? &*bank.zscore : nullptr));
    return best;
}

ZScore fit_zscore(const std::vector<LabeledSeries>& exemplars,
                  const FeatureSchema& schema) {
    const std::size_t F = schema.size();
    ZScore z;
    z.means.assign(F, 0.0);
    z.stds.assign(F, 1.0);
    std::vector<double> sum(F, 0.0), sumsq(F, 0.0);
    double n = 0.0;
    for (const auto& e : exemplars) {
        for (const auto& row : e.series.frames) {
            for (std::size_t f = 0; f < F; ++f) {
                sum[f] += row[f];
                sumsq[f] += row[f] * row[f];
            }
            n += 1.0;
        }
    }
    if (n == 0.0) return z;
    for (std::size_t f = 0; f < F; ++f) {
        if (schema.kinds[f] == FeatureKind::Angular) continue; // left raw
        z.means[f] = sum[f] / n;
        double var = sumsq[f] / n - z.means[f] * z.means[f];
        z.stds[f] = var > 1e-12 ? std::sqrt(var) : 1.0;
    }
    return z;
}

} // namespace verbtrack
