#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "verbtrack/dtw.hpp"
#include "verbtrack/hmm.hpp"

namespace verbtrack {

enum class ClassifierKind { Hmm, Dtw };

// Feature material of one video, as produced by role assignment: the agent's
// single-track series always, the pair series when a patient exists.
struct VideoFeatures {
    std::string video_id;
    FeatureSeries agent;
    std::optional<FeatureSeries> pair;
};

// One verb's classifier. Every verb owns an agent bank trained on all of its
// exemplars' agent series. Verbs with at least one two-participant exemplar
// additionally own a pair bank; verbs without one fall back to the agent
// bank when scoring multi-track videos (causative verbs need the pair
// evidence, inchoative ones never see a patient).
struct VerbModel {
    std::string verb;
    ClassifierKind kind = ClassifierKind::Hmm;
    std::optional<HmmModel> agent_hmm, pair_hmm;
    std::optional<DtwBank> agent_dtw, pair_dtw;

    bool has_pair_bank() const { return pair_hmm.has_value() || pair_dtw.has_value(); }
};

struct ModelSet {
    ClassifierKind kind = ClassifierKind::Hmm;
    int hmm_states = 5;
    std::uint64_t seed = 0;
    bool dtw_zscore = false;
    std::vector<VerbModel> verbs;
};

struct TrainSettings {
    ClassifierKind kind = ClassifierKind::Hmm;
    int hmm_states = 5;
    std::uint64_t seed = 0;
    int hmm_restarts = 3;
    int hmm_max_iters = 100;
    double hmm_tol = 1e-6;
    bool dtw_zscore = false;
};

// Trains one model per verb of the vocabulary from labeled video features.
// Throws NoExemplars(verb) when a vocabulary verb has no usable exemplar.
ModelSet train_verb_models(const std::vector<std::string>& vocabulary,
                           const std::map<std::string, std::string>& verb_of_video,
                           const std::vector<VideoFeatures>& features,
                           const TrainSettings& settings);

struct LabelResult {
    std::string predicted;
    std::map<std::string, double> scores; // one entry per verb
};

// Scores every verb and picks the winner. Single-track videos are scored on
// agent banks. Multi-track videos are scored on pair banks where available
// (agent-bank fallback fills in the remaining verbs' scores), and the
// decision is restricted to pair-bank verbs whenever any verb has one.
// HMM scores are log-likelihoods (higher wins); DTW scores are nearest
// exemplar distances (lower wins). Score ties break on verb name order.
LabelResult label_video(const ModelSet& models, const VideoFeatures& features);

} // namespace verbtrack
