#include "verbtrack/hmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "verbtrack/errors.hpp"
#include "verbtrack/mathutil.hpp"

namespace verbtrack {

double gaussian_logpdf(double x, double mean, double var) {
    double d = x - mean;
    return -0.5 * std::log(kTwoPi * var) - d * d / (2.0 * var);
}

double von_mises_logpdf(double x, double mean, double kappa) {
    return kappa * std::cos(x - mean) - std::log(kTwoPi) - log_bessel_i0(kappa);
}

namespace {

double emission_logpdf(const Emission& e, double x) {
    return e.kind == FeatureKind::Linear ? gaussian_logpdf(x, e.mean, e.spread)
                                         : von_mises_logpdf(x, e.mean, e.spread);
}

// Per-frame, per-state log emission densities of one series.
std::vector<std::vector<double>> emission_table(const HmmModel& m,
                                                const FeatureSeries& s) {
    const int K = m.states;
    std::vector<std::vector<double>> logb(s.frames.size(), std::vector<double>(K));
    for (std::size_t t = 0; t < s.frames.size(); ++t)
        for (int k = 0; k < K; ++k) {
            double sum = 0.0;
            for (std::size_t f = 0; f < s.frames[t].size(); ++f)
                sum += emission_logpdf(m.output[k][f], s.frames[t][f]);
            logb[t][k] = sum;
        }
    return logb;
}

struct ForwardResult {
    double loglik = 0.0;
    std::vector<std::vector<double>> alpha; // scaled
    std::vector<double> scale;              // c_t of the shifted emissions
    std::vector<std::vector<double>> bshift; // exp(logb - rowmax)
    std::vector<double> rowmax;
};

// Scaled forward pass; emissions are exponentiated relative to their
// per-frame maximum so extreme densities cannot overflow or vanish.
ForwardResult forward(const HmmModel& m, const std::vector<std::vector<double>>& logb) {
    const int K = m.states;
    const std::size_t T = logb.size();
    ForwardResult r;
    r.alpha.assign(T, std::vector<double>(K, 0.0));
    r.scale.assign(T, 0.0);
    r.bshift.assign(T, std::vector<double>(K, 0.0));
    r.rowmax.assign(T, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
        double mx = -std::numeric_limits<double>::infinity();
        for (int k = 0; k < K; ++k) mx = std::max(mx, logb[t][k]);
        r.rowmax[t] = mx;
        for (int k = 0; k < K; ++k) r.bshift[t][k] = std::exp(logb[t][k] - mx);
    }
    for (std::size_t t = 0; t < T; ++t) {
        double c = 0.0;
        for (int k = 0; k < K; ++k) {
            double a;
            if (t == 0) {
                a = m.initial[k] * r.bshift[0][k];
            } else {
                double in = 0.0;
                for (int j = 0; j < K; ++j)
                    in += r.alpha[t - 1][j] * m.trans[j][k];
                a = in * r.bshift[t][k];
            }
            r.alpha[t][k] = a;
            c += a;
        }
        if (!(c > 0.0) || !std::isfinite(c))
            throw DegenerateInput("forward pass underflowed");
        for (int k = 0; k < K; ++k) r.alpha[t][k] /= c;
        r.scale[t] = c;
        r.loglik += std::log(c) + r.rowmax[t];
    }
    return r;
}

struct Accumulators {
    std::vector<double> pi;
    std::vector<std::vector<double>> trans_num;
    std::vector<double> trans_den;
    // Per state, per feature: weight, sum x, sum x^2, sum cos, sum sin.
    std::vector<std::vector<double>> wsum, sx, sxx, sc, ss;
    int sequences = 0;

    Accumulators(int K, int F)
        : pi(K, 0.0),
          trans_num(K, std::vector<double>(K, 0.0)),
          trans_den(K, 0.0),
          wsum(K, std::vector<double>(F, 0.0)),
          sx(K, std::vector<double>(F, 0.0)),
          sxx(K, std::vector<double>(F, 0.0)),
          sc(K, std::vector<double>(F, 0.0)),
          ss(K, std::vector<double>(F, 0.0)) {}
};

double e_step_series(const HmmModel& m, const FeatureSeries& s, Accumulators& acc) {
    const int K = m.states;
    const std::size_t T = s.frames.size();
    auto logb = emission_table(m, s);
    auto fwd = forward(m, logb);

    std::vector<std::vector<double>> beta(T, std::vector<double>(K, 0.0));
    for (int k = 0; k < K; ++k) beta[T - 1][k] = 1.0;
    for (std::size_t t = T - 1; t-- > 0;) {
        for (int j = 0; j < K; ++j) {
            double sum = 0.0;
            for (int k = 0; k < K; ++k)
                sum += m.trans[j][k] * fwd.bshift[t + 1][k] * beta[t + 1][k];
            beta[t][j] = sum / fwd.scale[t + 1];
        }
    }

    for (std::size_t t = 0; t < T; ++t) {
        for (int k = 0; k < K; ++k) {
            double gamma = fwd.alpha[t][k] * beta[t][k];
            if (t == 0) acc.pi[k] += gamma;
            if (t + 1 < T) acc.trans_den[k] += gamma;
            for (std::size_t f = 0; f < s.schema.size(); ++f) {
                double x = s.frames[t][f];
                acc.wsum[k][f] += gamma;
                if (s.schema.kinds[f] == FeatureKind::Linear) {
                    acc.sx[k][f] += gamma * x;
                    acc.sxx[k][f] += gamma * x * x;
                } else {
                    acc.sc[k][f] += gamma * std::cos(x);
                    acc.ss[k][f] += gamma * std::sin(x);
                }
            }
        }
        if (t + 1 < T) {
            for (int j = 0; j < K; ++j) {
                double aj = fwd.alpha[t][j];
                for (int k = 0; k < K; ++k)
                    acc.trans_num[j][k] += aj * m.trans[j][k] *
                                           fwd.bshift[t + 1][k] * beta[t + 1][k] /
                                           fwd.scale[t + 1];
            }
        }
    }
    acc.sequences += 1;
    return fwd.loglik;
}

// Exact maximizer of sum_j c_j log a_j over the floored simplex
// {a : sum a = 1, a_j >= floor}. Entries too weak for a proportional share
// are pinned to the floor and the remaining mass is re-split; because the
// maximization is over a set containing the previous value, EM stays
// monotone even with the floor active. The floor itself keeps every state
// reachable, so scoring unseen data can never underflow to "impossible".
void floored_share(const std::vector<double>& c, double floor,
                   std::vector<double>& out) {
    const int K = static_cast<int>(c.size());
    std::vector<bool> pinned(K, false);
    for (int pass = 0; pass < K + 1; ++pass) {
        double c_free = 0.0;
        int n_pinned = 0;
        for (int j = 0; j < K; ++j) {
            if (pinned[j])
                ++n_pinned;
            else
                c_free += c[j];
        }
        double mass = 1.0 - floor * n_pinned;
        bool changed = false;
        for (int j = 0; j < K; ++j) {
            if (pinned[j]) {
                out[j] = floor;
                continue;
            }
            out[j] = c_free > 0.0 ? c[j] * mass / c_free : mass / (K - n_pinned);
            if (out[j] < floor) {
                pinned[j] = true;
                changed = true;
            }
        }
        if (!changed) break;
    }
}

void m_step(HmmModel& m, const Accumulators& acc) {
    const int K = m.states;
    floored_share(acc.pi, kProbFloor, m.initial);
    for (int j = 0; j < K; ++j) {
        if (acc.trans_den[j] > 1e-300) {
            floored_share(acc.trans_num[j], kProbFloor, m.trans[j]);
        } // else: state never left — its row has no evidence, keep it
    }
    for (int k = 0; k < K; ++k) {
        for (std::size_t f = 0; f < m.schema.size(); ++f) {
            double w = acc.wsum[k][f];
            if (w <= 1e-300) continue; // starving state keeps old parameters
            Emission& e = m.output[k][f];
            if (e.kind == FeatureKind::Linear) {
                double mean = acc.sx[k][f] / w;
                double var = acc.sxx[k][f] / w - mean * mean;
                e.mean = mean;
                e.spread = std::max(kVarianceFloor, var);
            } else {
                double c = acc.sc[k][f], s = acc.ss[k][f];
                e.mean = (c == 0.0 && s == 0.0) ? 0.0 : wrap_angle(std::atan2(s, c));
                double rbar = std::min(1.0, std::hypot(c, s) / w);
                e.spread = vm_kappa_from_rbar(rbar, kKappaCap);
            }
        }
    }
}

// Moment-based start: emissions from K equal time segments of each series,
// uniform initial state, uniform transitions with multiplicative jitter.
HmmModel init_model(const std::vector<FeatureSeries>& series, int K,
                    std::mt19937_64& rng) {
    const FeatureSchema& schema = series.front().schema;
    const int F = static_cast<int>(schema.size());
    HmmModel m;
    m.schema = schema;
    m.states = K;
    m.initial.assign(K, 1.0 / K);
    m.trans.assign(K, std::vector<double>(K, 0.0));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int j = 0; j < K; ++j) {
        double row_sum = 0.0;
        for (int k = 0; k < K; ++k) {
            m.trans[j][k] = (1.0 + 0.1 * unit(rng)) / K;
            row_sum += m.trans[j][k];
        }
        for (int k = 0; k < K; ++k) m.trans[j][k] /= row_sum;
    }
    m.output.assign(K, std::vector<Emission>(F));
    for (int k = 0; k < K; ++k) {
        for (int f = 0; f < F; ++f) {
            double w = 0.0, sx = 0.0, sxx = 0.0, sc = 0.0, ss = 0.0;
            for (const auto& s : series) {
                const std::size_t T = s.frames.size();
                std::size_t lo = T * k / K, hi = T * (k + 1) / K;
                for (std::size_t t = lo; t < hi; ++t) {
                    double x = s.frames[t][f];
                    w += 1.0;
                    sx += x;
                    sxx += x * x;
                    sc += std::cos(x);
                    ss += std::sin(x);
                }
            }
            Emission& e = m.output[k][f];
            e.kind = schema.kinds[f];
            if (e.kind == FeatureKind::Linear) {
                e.mean = sx / w;
                e.spread = std::max(kVarianceFloor, sxx / w - e.mean * e.mean);
            } else {
                e.mean = (sc == 0.0 && ss == 0.0) ? 0.0 : wrap_angle(std::atan2(ss, sc));
                e.spread = vm_kappa_from_rbar(std::min(1.0, std::hypot(sc, ss) / w),
                                              kKappaCap);
            }
        }
    }
    return m;
}

} // namespace

HmmModel hmm_train(const std::vector<FeatureSeries>& series, int states,
                   std::uint64_t seed, int restarts, int max_iters, double tol) {
    if (series.empty()) throw DegenerateInput("no training series");
    if (states < 1) throw DegenerateInput("need at least one state");
    for (const auto& s : series) {
        if (!(s.schema == series.front().schema))
            throw SchemaMismatch("training series schemas differ");
        if (s.frames.size() < static_cast<std::size_t>(states))
            throw DegenerateInput("series shorter than the state count");
    }

    HmmModel best;
    double best_ll = -std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> traces;
    int best_iterations = 0;

    for (int r = 0; r < restarts; ++r) {
        std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(r)));
        HmmModel m = init_model(series, states, rng);
        std::vector<double> trace;
        double prev = -std::numeric_limits<double>::infinity();
        int iterations = 0;
        for (int it = 0; it < max_iters; ++it) {
            Accumulators acc(states, static_cast<int>(m.schema.size()));
            double ll = 0.0;
            for (const auto& s : series) ll += e_step_series(m, s, acc);
            trace.push_back(ll);
            if (it > 0 && ll - prev <= tol * std::max(1.0, std::fabs(prev))) break;
            m_step(m, acc);
            ++iterations;
            prev = ll;
        }
        if (iterations == max_iters) {
            // every round updated the model; score the final one too
            double ll = 0.0;
            for (const auto& s : series) {
                auto logb = emission_table(m, s);
                ll += forward(m, logb).loglik;
            }
            trace.push_back(ll);
        }
        double final_ll = trace.back();
        traces.push_back(trace);
        if (final_ll > best_ll) {
            best_ll = final_ll;
            best = std::move(m);
            best_iterations = iterations;
        }
    }
    best.training.seed = seed;
    best.training.restarts = restarts;
    best.training.iterations = best_iterations;
    best.training.final_loglik = best_ll;
    best.training.loglik_trace = std::move(traces);
    return best;
}

double hmm_loglik(const HmmModel& model, const FeatureSeries& series) {
    if (!(series.schema == model.schema))
        throw SchemaMismatch("series schema differs from the model's");
    if (series.frames.empty()) throw EmptySeries("cannot score an empty series");
    auto logb = emission_table(model, series);
    return forward(model, logb).loglik;
}

} // namespace verbtrack
