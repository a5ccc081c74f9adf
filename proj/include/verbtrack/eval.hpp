#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "verbtrack/classify.hpp"
#include "verbtrack/detection.hpp"

namespace verbtrack {

// Stratified k-fold assignment: every verb's videos are shuffled with the
// given seed and dealt round-robin into k cells, so per-verb cell sizes
// differ by at most one.
struct FoldPlan {
    int k = 5;
    std::uint64_t seed = 0;
    std::map<std::string, std::vector<std::vector<std::string>>> cells; // verb -> k lists

    std::vector<std::string> test_videos(int fold) const;
    std::vector<std::string> train_videos(int fold) const;
};

FoldPlan make_folds(const CorpusManifest& manifest, int k, std::uint64_t seed);

// Row = gold verb, column = predicted verb, plus a dedicated "failed" column
// for videos the pipeline could not label at all.
struct ConfusionMatrix {
    std::vector<std::string> verbs;
    std::vector<std::vector<int>> counts; // V x V
    std::vector<int> failed;              // per gold verb

    int total() const;
    double accuracy() const; // trace / total (failures count as errors)
    double chance_baseline() const { return verbs.empty() ? 0.0 : 1.0 / verbs.size(); }
};

struct VideoLabelRecord {
    std::string video_id;
    std::string gold;
    std::string predicted;            // empty when failed
    std::map<std::string, double> scores;
    int fold = -1;
    bool failed = false;
    std::string failure;              // error text when failed
};

struct CrossValidationResult {
    ConfusionMatrix confusion;
    std::vector<double> fold_accuracies;
    std::vector<VideoLabelRecord> labels; // manifest order
};

// Builds the confusion matrix of predictions against gold labels.
ConfusionMatrix tabulate(const std::vector<std::string>& verbs,
                         const std::vector<VideoLabelRecord>& labels);

// Fixed-width percentage table of the confusion matrix (rows sum to 100).
std::string render_confusion(const ConfusionMatrix& m);

} // namespace verbtrack
