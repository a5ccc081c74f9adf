#pragma once

#include <set>
#include <string>
#include <vector>

#include "verbtrack/appearance.hpp"
#include "verbtrack/dtw.hpp"
#include "verbtrack/hmm.hpp"
#include "verbtrack/tracker.hpp"

// Brute-force reference implementations used to cross-check the real
// algorithms on small instances. Each recomputes its objective from first
// principles (no shared code with the implementation under test) and throws
// SizeExceeded beyond its enumeration cap.

namespace verbtrack {

struct OraclePath {
    double cost = 0.0;
    std::vector<int> picks; // candidate index per frame
};

// Enumerates every candidate combination over the interval (cap: 3,000,000
// paths) and returns the cheapest, ties toward the lexicographically
// earliest index tuple.
OraclePath oracle_best_path(const DetectionStream& stream, const MotionField& field,
                            const std::set<std::string>& source_ids,
                            const Subinterval& interval, const CostWeights& weights,
                            bool use_appearance = false);

// Sums P(states, observations) over all K^T state sequences (cap: 2,000,000
// sequences) in log space.
double oracle_hmm_loglik(const HmmModel& model, const FeatureSeries& series);

// Depth-first enumeration of all monotone alignments (caps: 8 frames each).
double oracle_dtw(const FeatureSeries& a, const FeatureSeries& b,
                  const ZScore* zscore = nullptr);

// Recomputes the between-class variance of every bin-boundary split from
// scratch and returns the best threshold value (ties toward the lower one).
double oracle_otsu(const std::vector<double>& values, int bins);

// Per-channel min-cost transport solved as an explicit transportation
// program (monotone coupling, optimal for a line metric; cap: 4 bins per
// channel), scaled like emd().
double oracle_emd(const AppearanceHistogram& h1, const AppearanceHistogram& h2);

} // namespace verbtrack
