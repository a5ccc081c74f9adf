#include "verbtrack/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <set>

#include <json.hpp>

#include "verbtrack/errors.hpp"
#include "verbtrack/features.hpp"
#include "verbtrack/flow.hpp"
#include "verbtrack/io.hpp"
#include "verbtrack/mathutil.hpp"
#include "verbtrack/smoothing.hpp"

namespace verbtrack {

namespace {

using nlohmann::json;

const char* kConfigKeys[] = {
    "detection_offset", "nms_overlap",    "confidence_weight",
    "flow_weight",      "appearance_weight", "projection_depth",
    "otsu_bins",        "cap_offset",     "shrink",
    "spline_pieces_center", "spline_pieces_dims", "hmm_states",
    "classifier",       "k_folds",        "seed",
    "tracks_per_class", "dtw_zscore",     "jobs",
};

} // namespace

PipelineConfig load_pipeline_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError("bad config '" + path + "': " + e.what());
    }
    if (!j.is_object()) throw SchemaError("config root must be an object");
    for (const auto& [key, _] : j.items()) {
        bool known = false;
        for (const char* k : kConfigKeys) known |= key == k;
        if (!known) throw SchemaError("unknown config key '" + key + "'");
    }
    PipelineConfig c;
    try {
        c.detection_offset = j.value("detection_offset", c.detection_offset);
        c.nms_overlap = j.value("nms_overlap", c.nms_overlap);
        c.confidence_weight = j.value("confidence_weight", c.confidence_weight);
        c.flow_weight = j.value("flow_weight", c.flow_weight);
        c.appearance_weight = j.value("appearance_weight", c.appearance_weight);
        c.projection_depth = j.value("projection_depth", c.projection_depth);
        c.otsu_bins = j.value("otsu_bins", c.otsu_bins);
        c.cap_offset = j.value("cap_offset", c.cap_offset);
        c.shrink = j.value("shrink", c.shrink);
        c.spline_pieces_center = j.value("spline_pieces_center", c.spline_pieces_center);
        c.spline_pieces_dims = j.value("spline_pieces_dims", c.spline_pieces_dims);
        c.hmm_states = j.value("hmm_states", c.hmm_states);
        c.classifier = j.value("classifier", c.classifier);
        c.k_folds = j.value("k_folds", c.k_folds);
        c.seed = j.value("seed", c.seed);
        c.tracks_per_class = j.value("tracks_per_class", c.tracks_per_class);
        c.dtw_zscore = j.value("dtw_zscore", c.dtw_zscore);
        c.jobs = j.value("jobs", c.jobs);
    } catch (const json::exception& e) {
        throw SchemaError("bad config value in '" + path + "': " + e.what());
    }
    classifier_kind(c.classifier); // validate
    return c;
}

void save_pipeline_config(const PipelineConfig& c, const std::string& path) {
    json j{{"detection_offset", c.detection_offset},
           {"nms_overlap", c.nms_overlap},
           {"confidence_weight", c.confidence_weight},
           {"flow_weight", c.flow_weight},
           {"appearance_weight", c.appearance_weight},
           {"projection_depth", c.projection_depth},
           {"otsu_bins", c.otsu_bins},
           {"cap_offset", c.cap_offset},
           {"shrink", c.shrink},
           {"spline_pieces_center", c.spline_pieces_center},
           {"spline_pieces_dims", c.spline_pieces_dims},
           {"hmm_states", c.hmm_states},
           {"classifier", c.classifier},
           {"k_folds", c.k_folds},
           {"seed", c.seed},
           {"tracks_per_class", c.tracks_per_class},
           {"dtw_zscore", c.dtw_zscore},
           {"jobs", c.jobs}};
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << j.dump(2) << "\n";
}

CostWeights cost_weights(const PipelineConfig& config) {
    CostWeights w;
    w.confidence = config.confidence_weight;
    w.flow = config.flow_weight;
    w.appearance = config.appearance_weight;
    return w;
}

ClassifierKind classifier_kind(const std::string& name) {
    if (name == "hmm") return ClassifierKind::Hmm;
    if (name == "dtw") return ClassifierKind::Dtw;
    throw SchemaError("unknown classifier '" + name + "' (expected hmm or dtw)");
}

std::vector<std::pair<std::string, std::vector<std::string>>>
class_pools(const DetectionStream& stream) {
    std::vector<std::pair<std::string, std::vector<std::string>>> pools;
    for (const auto& src : stream.sources) {
        auto it = std::find_if(pools.begin(), pools.end(), [&](const auto& p) {
            return p.first == src.class_label;
        });
        if (it == pools.end())
            pools.push_back({src.class_label, {src.source_id}});
        else
            it->second.push_back(src.source_id);
    }
    return pools;
}

std::vector<Track> track_video(const DetectionStream& stream, const MotionField& field,
                               const PipelineConfig& config) {
    DetectionStream work = stream;
    bias_detections(work, config.detection_offset);
    work = nms(work, config.nms_overlap);

    TrackOptions opts;
    opts.weights = cost_weights(config);
    opts.bins = config.otsu_bins;
    opts.cap_offset = config.cap_offset;
    opts.projection_depth = config.projection_depth;

    std::vector<Track> out;
    for (const auto& [class_label, ids] : class_pools(work)) {
        std::set<std::string> id_set(ids.begin(), ids.end());
        std::vector<Track> tracks;
        if (ids.size() == 1) {
            tracks = track_n(work, field, config.tracks_per_class, id_set, opts);
        } else {
            // Pool the class's detectors on a shared score scale first.
            DetectionStream merged = merge_sources(work, ids, config.otsu_bins,
                                                   config.cap_offset);
            TrackOptions pooled = opts;
            pooled.use_pool_threshold = true;
            pooled.pool_threshold = 0.0;
            tracks = track_n(merged, field, config.tracks_per_class, id_set, pooled);
        }
        out.insert(out.end(), tracks.begin(), tracks.end());
    }
    return out;
}

std::vector<Track> smooth_tracks(const std::vector<Track>& tracks,
                                 const PipelineConfig& config) {
    std::vector<Track> out;
    out.reserve(tracks.size());
    for (const auto& t : tracks) {
        try {
            out.push_back(smooth_track(t, config.spline_pieces_center,
                                       config.spline_pieces_dims));
        } catch (const TooShort&) {
            out.push_back(t); // a one-box track is its own fit
        }
    }
    return out;
}

VideoFeatures extract_video_features(const std::string& video_id,
                                     const std::vector<Track>& tracks) {
    Roles roles = pick_roles(tracks);
    VideoFeatures vf;
    vf.video_id = video_id;
    vf.agent = single_features(*roles.agent);
    if (roles.patient != nullptr) {
        try {
            vf.pair = pair_features(*roles.agent, *roles.patient);
        } catch (const NoOverlap&) {
            // Disjoint spans carry no interaction evidence; score as single.
        } catch (const TooShort&) {
        }
    }
    return vf;
}

CrossValidationResult cross_validate(const CorpusManifest& manifest,
                                     const std::string& base_dir,
                                     const PipelineConfig& config) {
    namespace fs = std::filesystem;
    const std::size_t n = manifest.videos.size();
    std::vector<std::optional<VideoFeatures>> features(n);
    std::vector<std::string> failures(n);

    parallel_for_indexed(n, config.jobs, [&](std::size_t i) {
        const ManifestEntry& entry = manifest.videos[i];
        try {
            auto stream = load_detection_stream(
                (fs::path(base_dir) / entry.detection_stream_path).string());
            auto field = load_motion_field(
                (fs::path(base_dir) / entry.motion_field_path).string(),
                stream.frame_count);
            auto tracks = smooth_tracks(track_video(stream, field, config), config);
            features[i] = extract_video_features(entry.video_id, tracks);
        } catch (const std::exception& e) {
            failures[i] = e.what();
            if (failures[i].empty()) failures[i] = "pipeline failure";
        }
    });

    std::map<std::string, std::string> verb_of_video;
    std::map<std::string, std::size_t> index_of;
    for (std::size_t i = 0; i < n; ++i) {
        verb_of_video[manifest.videos[i].video_id] = manifest.videos[i].verb_label;
        index_of[manifest.videos[i].video_id] = i;
    }
    const auto vocabulary = manifest.vocabulary();
    FoldPlan folds = make_folds(manifest, config.k_folds, config.seed);

    TrainSettings settings;
    settings.kind = classifier_kind(config.classifier);
    settings.hmm_states = config.hmm_states;
    settings.dtw_zscore = config.dtw_zscore;

    CrossValidationResult result;
    std::map<std::string, VideoLabelRecord> record_of;
    for (int fold = 0; fold < config.k_folds; ++fold) {
        std::vector<VideoFeatures> train_features;
        for (const auto& id : folds.train_videos(fold)) {
            const auto& slot = features[index_of.at(id)];
            if (slot.has_value()) train_features.push_back(*slot);
        }
        settings.seed = mix_seed(config.seed, "fold" + std::to_string(fold));
        ModelSet models =
            train_verb_models(vocabulary, verb_of_video, train_features, settings);

        int correct = 0, seen = 0;
        for (const auto& id : folds.test_videos(fold)) {
            std::size_t i = index_of.at(id);
            VideoLabelRecord rec;
            rec.video_id = id;
            rec.gold = manifest.videos[i].verb_label;
            rec.fold = fold;
            if (!features[i].has_value()) {
                rec.failed = true;
                rec.failure = failures[i];
            } else {
                try {
                    LabelResult lr = label_video(models, *features[i]);
                    rec.predicted = lr.predicted;
                    rec.scores = std::move(lr.scores);
                } catch (const std::exception& e) {
                    rec.failed = true;
                    rec.failure = e.what();
                }
            }
            ++seen;
            if (!rec.failed && rec.predicted == rec.gold) ++correct;
            record_of[id] = std::move(rec);
        }
        result.fold_accuracies.push_back(
            seen > 0 ? static_cast<double>(correct) / seen : 0.0);
    }

    for (const auto& entry : manifest.videos)
        result.labels.push_back(record_of.at(entry.video_id));
    result.confusion = tabulate(vocabulary, result.labels);
    return result;
}

} // namespace verbtrack
