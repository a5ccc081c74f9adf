#include "verbtrack/classify.hpp"

#include <algorithm>
#include <limits>

#include "verbtrack/errors.hpp"
#include "verbtrack/mathutil.hpp"

namespace verbtrack {

ModelSet train_verb_models(const std::vector<std::string>& vocabulary,
                           const std::map<std::string, std::string>& verb_of_video,
                           const std::vector<VideoFeatures>& features,
                           const TrainSettings& settings) {
    ModelSet set;
    set.kind = settings.kind;
    set.hmm_states = settings.hmm_states;
    set.seed = settings.seed;
    set.dtw_zscore = settings.dtw_zscore;

    for (const auto& verb : vocabulary) {
        std::vector<FeatureSeries> agent_series;
        std::vector<FeatureSeries> pair_series;
        for (const auto& vf : features) {
            auto it = verb_of_video.find(vf.video_id);
            if (it == verb_of_video.end() || it->second != verb) continue;
            agent_series.push_back(vf.agent);
            if (vf.pair) pair_series.push_back(*vf.pair);
        }
        if (agent_series.empty())
            throw NoExemplars("verb '" + verb + "' has no usable training videos");

        VerbModel vm;
        vm.verb = verb;
        vm.kind = settings.kind;
        std::uint64_t verb_seed = mix_seed(settings.seed, verb);
        if (settings.kind == ClassifierKind::Hmm) {
            vm.agent_hmm = hmm_train(agent_series, settings.hmm_states, verb_seed,
                                     settings.hmm_restarts, settings.hmm_max_iters,
                                     settings.hmm_tol);
            if (!pair_series.empty())
                vm.pair_hmm = hmm_train(pair_series, settings.hmm_states,
                                        mix_seed(verb_seed, 1),
                                        settings.hmm_restarts, settings.hmm_max_iters,
                                        settings.hmm_tol);
        } else {
            DtwBank agent_bank;
            agent_bank.schema = agent_series.front().schema;
            for (auto& s : agent_series)
                agent_bank.exemplars.push_back({verb, std::move(s)});
            vm.agent_dtw = std::move(agent_bank);
            if (!pair_series.empty()) {
                DtwBank pair_bank;
                pair_bank.schema = pair_series.front().schema;
                for (auto& s : pair_series)
                    pair_bank.exemplars.push_back({verb, std::move(s)});
                vm.pair_dtw = std::move(pair_bank);
            }
        }
        set.verbs.push_back(std::move(vm));
    }

    if (settings.kind == ClassifierKind::Dtw && settings.dtw_zscore) {
        // Shared standardization fitted across all verbs' exemplars so the
        // per-verb distances stay comparable.
        std::vector<LabeledSeries> all_agent, all_pair;
        for (const auto& vm : set.verbs) {
            for (const auto& e : vm.agent_dtw->exemplars) all_agent.push_back(e);
            if (vm.pair_dtw)
                for (const auto& e : vm.pair_dtw->exemplars) all_pair.push_back(e);
        }
        ZScore za = all_agent.empty()
                        ? ZScore{}
                        : fit_zscore(all_agent, all_agent.front().series.schema);
        ZScore zp = all_pair.empty()
                        ? ZScore{}
                        : fit_zscore(all_pair, all_pair.front().series.schema);
        for (auto& vm : set.verbs) {
            vm.agent_dtw->zscore = za;
            if (vm.pair_dtw) vm.pair_dtw->zscore = zp;
        }
    }
    return set;
}

namespace {

double score_agent(const VerbModel& vm, const FeatureSeries& agent) {
    if (vm.kind == ClassifierKind::Hmm) return hmm_loglik(*vm.agent_hmm, agent);
    return dtw_nearest(*vm.agent_dtw, agent);
}

double score_pair(const VerbModel& vm, const FeatureSeries& pair) {
    if (vm.kind == ClassifierKind::Hmm) return hmm_loglik(*vm.pair_hmm, pair);
    return dtw_nearest(*vm.pair_dtw, pair);
}

} // namespace

LabelResult label_video(const ModelSet& models, const VideoFeatures& features) {
    if (models.verbs.empty()) throw NoExemplars("model set is empty");
    const bool multi = features.pair.has_value();
    bool any_pair_bank = false;
    if (multi)
        for (const auto& vm : models.verbs)
            if (vm.has_pair_bank()) any_pair_bank = true;

    LabelResult result;
    std::map<std::string, bool> eligible; // name order; ties keep the first
    for (const auto& vm : models.verbs) {
        double s;
        bool can_win = true;
        if (multi && vm.has_pair_bank()) {
            s = score_pair(vm, *features.pair);
        } else {
            // Single-track video, or fallback for verbs that have never seen
            // a patient; fallback scores lose to pair evidence by decree.
            s = score_agent(vm, features.agent);
            if (multi && any_pair_bank) can_win = false;
        }
        result.scores[vm.verb] = s;
        eligible[vm.verb] = can_win;
    }
    const bool higher_wins = models.kind == ClassifierKind::Hmm;
    double best = higher_wins ? -std::numeric_limits<double>::infinity()
                              : std::numeric_limits<double>::infinity();
    for (const auto& [verb, s] : result.scores) {
        if (!eligible[verb]) continue;
        if (higher_wins ? s > best : s < best) {
            best = s;
            result.predicted = verb;
        }
    }
    return result;
}

} // namespace verbtrack
