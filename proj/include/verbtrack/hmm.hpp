#pragma once

#include <cstdint>
#include <vector>

#include "verbtrack/features.hpp"

namespace verbtrack {

// Per-state, per-feature output model: Gaussian for linear features
// (variance floored at 1e-4), von Mises for angular ones (kappa capped at
// 1e3). `spread` holds the variance or the concentration accordingly.
struct Emission {
    FeatureKind kind = FeatureKind::Linear;
    double mean = 0.0;
    double spread = 1.0;
};

struct HmmTrainingInfo {
    std::uint64_t seed = 0;
    int restarts = 0;
    int iterations = 0;      // of the winning restart
    double final_loglik = 0.0;
    std::vector<std::vector<double>> loglik_trace; // per restart, per iteration
};

struct HmmModel {
    FeatureSchema schema;
    int states = 5;
    std::vector<double> initial;               // K
    std::vector<std::vector<double>> trans;    // K x K, rows sum to 1
    std::vector<std::vector<Emission>> output; // K x F
    HmmTrainingInfo training;
};

inline constexpr double kVarianceFloor = 1e-4;
inline constexpr double kKappaCap = 1e3;
// Lower bound on initial/transition probabilities: every state stays
// reachable, so the scaled forward pass is defined for any observation.
inline constexpr double kProbFloor = 1e-8;

// log N(x | mean, var) and log VonMises(x | mean, kappa).
double gaussian_logpdf(double x, double mean, double var);
double von_mises_logpdf(double x, double mean, double kappa);

// Baum-Welch over one or more series sharing a schema. Ergodic start:
// uniform initial probabilities, uniform-plus-jitter transitions, emissions
// from the moments of K equal time segments. Runs `restarts` seeded starts
// for up to `max_iters` iterations each (stop at relative log-likelihood
// improvement < tol) and keeps the best final likelihood.
// Throws DegenerateInput when no series is given, any series is shorter
// than K, or schemas disagree.
HmmModel hmm_train(const std::vector<FeatureSeries>& series, int states,
                   std::uint64_t seed, int restarts = 3, int max_iters = 100,
                   double tol = 1e-6);

// Exact log P(series | model) via the scaled forward algorithm.
// Throws SchemaMismatch / EmptySeries.
double hmm_loglik(const HmmModel& model, const FeatureSeries& series);

} // namespace verbtrack
