#pragma once

#include <optional>
#include <string>
#include <vector>

#include "verbtrack/features.hpp"

namespace verbtrack {

struct LabeledSeries {
    std::string verb;
    FeatureSeries series;
};

// Optional per-feature standardization learned from training frames and
// applied inside the DTW frame distance. Angular features are left raw
// (their wrapped differences are already bounded); `stds` entries for them
// are 1. Disabled by default: raw pixel/radian units.
struct ZScore {
    std::vector<double> means;
    std::vector<double> stds;
};

struct DtwBank {
    FeatureSchema schema;
    std::vector<LabeledSeries> exemplars;
    std::optional<ZScore> zscore;
};

// Classic dynamic time warping with steps (1,0), (0,1), (1,1) and Euclidean
// per-frame distance (angular components compared on the circle). The cost
// is the raw sum over the optimal alignment, unnormalized.
// Throws SchemaMismatch / EmptySeries.
double dtw_distance(const FeatureSeries& a, const FeatureSeries& b,
                    const ZScore* zscore = nullptr);

// 1-nearest-neighbor over the bank; ties go to the earliest exemplar.
// Throws EmptyBank on an empty bank.
std::string dtw_classify(const DtwBank& bank, const FeatureSeries& query);

// Distance from the query to its nearest exemplar of the bank.
double dtw_nearest(const DtwBank& bank, const FeatureSeries& query);

// Fits standardization statistics over all frames of the exemplars.
ZScore fit_zscore(const std::vector<LabeledSeries>& exemplars,
                  const FeatureSchema& schema);

} // namespace verbtrack
