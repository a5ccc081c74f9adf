#pragma once

#include <string>
#include <vector>

#include "verbtrack/classify.hpp"
#include "verbtrack/detection.hpp"
#include "verbtrack/eval.hpp"
#include "verbtrack/features.hpp"

namespace verbtrack {

// detections.jsonl: one header object {"video_id", "frame_count", "sources"}
// followed by one object per box {"frame","cx","cy","w","h","score",
// "source_id"[,"appearance"]}. projected_depth is never serialized.
DetectionStream load_detection_stream(const std::string& path);
void save_detection_stream(const DetectionStream& stream, const std::string& path);

// motion.jsonl: one object per correspondence {"frame","x","y","x2","y2"},
// where "frame" pairs the frame with its successor.
MotionField load_motion_field(const std::string& path, int frame_count);
void save_motion_field(const MotionField& field, const std::string& path);

// manifest.json: array of video entries; paths are relative to the manifest.
CorpusManifest load_manifest(const std::string& path);
void save_manifest(const CorpusManifest& manifest, const std::string& path);

// tracks.json: array of {class_label, t0, t1, coherence, boxes:[...]}.
// Box scores and runtime annotations are not part of the format.
std::vector<Track> load_tracks(const std::string& path, const std::string& video_id);
void save_tracks(const std::vector<Track>& tracks, const std::string& path);

// features.csv (header + one row per frame) with a <csv>.schema.json sidecar
// recording the name/kind of every column.
FeatureSeries load_feature_series(const std::string& csv_path);
void save_feature_series(const FeatureSeries& series, const std::string& csv_path);

// model.json: classifier kind plus every verb's banks.
ModelSet load_models(const std::string& path);
void save_models(const ModelSet& models, const std::string& path);

// labels.json: per-video {video_id, gold, predicted, scores, fold, failed}.
std::vector<VideoLabelRecord> load_labels(const std::string& path);
void save_labels(const std::vector<VideoLabelRecord>& labels, const std::string& path);

// confusion.json: verb list, count matrix, failed column, accuracies.
ConfusionMatrix load_confusion(const std::string& path);
void save_confusion(const ConfusionMatrix& m, const std::vector<double>& fold_accuracies,
                    const std::string& path);

} // namespace verbtrack
