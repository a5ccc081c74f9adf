#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "verbtrack/classify.hpp"
#include "verbtrack/eval.hpp"
#include "verbtrack/tracker.hpp"

namespace verbtrack {

// Every knob of the batch pipeline with its default operating point.
struct PipelineConfig {
    double detection_offset = 1.0;  // biasing below the learned threshold
    double nms_overlap = 0.8;
    double confidence_weight = 1.0;
    double flow_weight = 0.1;
    double appearance_weight = 1.0;
    int projection_depth = 5;       // 0 disables forward projection
    int otsu_bins = 50;
    double cap_offset = 0.4;        // subinterval threshold cap
    double shrink = 0.6;            // appearance box scale
    int spline_pieces_center = 10;
    int spline_pieces_dims = 5;
    int hmm_states = 5;
    std::string classifier = "hmm"; // "hmm" | "dtw"
    int k_folds = 5;
    std::uint64_t seed = 1;
    int tracks_per_class = 1;       // repeated extraction per candidate pool
    bool dtw_zscore = false;        // standardize linear features for DTW
    int jobs = 1;                   // worker threads for per-video stages
};

PipelineConfig load_pipeline_config(const std::string& path);
void save_pipeline_config(const PipelineConfig& config, const std::string& path);

CostWeights cost_weights(const PipelineConfig& config);
ClassifierKind classifier_kind(const std::string& name); // throws SchemaError

// Detection sources grouped by class label, in first-appearance order.
std::vector<std::pair<std::string, std::vector<std::string>>>
class_pools(const DetectionStream& stream);

// bias -> per-source NMS -> per-class pooling (multi-source classes are
// merged on a common score scale) -> repeated optimal-path extraction.
// Classes with no object present simply contribute no tracks.
std::vector<Track> track_video(const DetectionStream& stream, const MotionField& field,
                               const PipelineConfig& config);

std::vector<Track> smooth_tracks(const std::vector<Track>& tracks,
                                 const PipelineConfig& config);

// Role assignment + feature extraction for one video's tracks.
VideoFeatures extract_video_features(const std::string& video_id,
                                     const std::vector<Track>& tracks);

// Stratified k-fold cross-validation over a corpus directory: runs the whole
// pipeline per video once, then trains and labels per fold. Per-video
// pipeline failures land in the confusion matrix's "failed" column.
CrossValidationResult cross_validate(const CorpusManifest& manifest,
                                     const std::string& base_dir,
                                     const PipelineConfig& config);

} // namespace verbtrack
