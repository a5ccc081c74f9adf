// Command-line front end for the tracking + verb labeling pipeline.

#include <filesystem>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "verbtrack/eval.hpp"
#include "verbtrack/io.hpp"
#include "verbtrack/mathutil.hpp"
#include "verbtrack/pipeline.hpp"
#include "verbtrack/synth.hpp"

namespace fs = std::filesystem;
using namespace verbtrack;

namespace {

// Shared --config/--seed/... plumbing: flags override file values.
struct ConfigArgs {
    std::string config_path;
    PipelineConfig defaults;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "pipeline config JSON");
        cmd->add_option("--seed", defaults.seed, "master random seed");
        cmd->add_option("--classifier", defaults.classifier, "hmm or dtw");
        cmd->add_option("--k-folds", defaults.k_folds, "cross-validation folds");
        cmd->add_option("--jobs", defaults.jobs, "worker threads");
        cmd->add_option("--tracks-per-class", defaults.tracks_per_class,
                        "tracks extracted per detector class");
        cmd->add_option("--projection-depth", defaults.projection_depth,
                        "forward projection depth (0 disables)");
        cmd->add_option("--appearance-weight", defaults.appearance_weight,
                        "appearance term weight");
        cmd->add_flag("--dtw-zscore", defaults.dtw_zscore,
                      "standardize linear features for DTW");
    }

    PipelineConfig resolve(const CLI::App* cmd) const {
        PipelineConfig c =
            config_path.empty() ? PipelineConfig{} : load_pipeline_config(config_path);
        auto take = [&](const char* flag, auto member) {
            if (cmd->count(flag) > 0) c.*member = defaults.*member;
        };
        take("--seed", &PipelineConfig::seed);
        take("--classifier", &PipelineConfig::classifier);
        take("--k-folds", &PipelineConfig::k_folds);
        take("--jobs", &PipelineConfig::jobs);
        take("--tracks-per-class", &PipelineConfig::tracks_per_class);
        take("--projection-depth", &PipelineConfig::projection_depth);
        take("--appearance-weight", &PipelineConfig::appearance_weight);
        take("--dtw-zscore", &PipelineConfig::dtw_zscore);
        return c;
    }
};

int cmd_synth_gen(const std::string& out_dir, const std::vector<std::string>& verbs,
                  int per_verb, std::uint64_t seed, const NoiseConfig& noise) {
    fs::create_directories(fs::path(out_dir) / "detections");
    fs::create_directories(fs::path(out_dir) / "motion");
    CorpusManifest manifest;
    for (const auto& verb : verbs) {
        for (int i = 0; i < per_verb; ++i) {
            std::string video_id = verb + "-" + std::to_string(i);
            SceneScript script = make_archetype_script(verb, mix_seed(seed, video_id));
            script.video_id = video_id;
            NoiseConfig local = noise;
            local.seed = mix_seed(seed, video_id + "/noise");
            SyntheticScene scene = generate_scene(script, local);

            ManifestEntry entry;
            entry.video_id = video_id;
            entry.verb_label = verb;
            entry.detection_stream_path = "detections/" + video_id + ".jsonl";
            entry.motion_field_path = "motion/" + video_id + ".jsonl";
            entry.frame_width = script.width;
            entry.frame_height = script.height;
            save_detection_stream(scene.detections,
                                  (fs::path(out_dir) / entry.detection_stream_path).string());
            save_motion_field(scene.field,
                              (fs::path(out_dir) / entry.motion_field_path).string());
            manifest.videos.push_back(std::move(entry));
        }
    }
    save_manifest(manifest, (fs::path(out_dir) / "manifest.json").string());
    std::cout << "wrote " << manifest.videos.size() << " videos to " << out_dir
              << "\n";
    return 0;
}

std::vector<Track> run_tracking(const std::string& detections_path,
                                const std::string& motion_path,
                                const PipelineConfig& config) {
    DetectionStream stream = load_detection_stream(detections_path);
    MotionField field = load_motion_field(motion_path, stream.frame_count);
    return track_video(stream, field, config);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"detection-to-track pipeline with verb labeling"};
    app.require_subcommand(1);

    // synth-gen
    auto* gen = app.add_subcommand("synth-gen", "generate a synthetic corpus");
    std::string gen_out = "corpus";
    std::vector<std::string> gen_verbs = archetype_verbs();
    int gen_per_verb = 40;
    std::uint64_t gen_seed = 1;
    NoiseConfig gen_noise;
    gen_noise.jitter = 3.0;
    gen_noise.size_jitter = 2.0;
    gen_noise.fp_rate = 10.0;
    gen_noise.fn_rate = 0.2;
    gen->add_option("--out", gen_out, "output directory")->required();
    gen->add_option("--verbs", gen_verbs, "verbs to generate");
    gen->add_option("--per-verb", gen_per_verb, "videos per verb");
    gen->add_option("--seed", gen_seed, "corpus seed");
    gen->add_option("--jitter", gen_noise.jitter, "center jitter (px)");
    gen->add_option("--size-jitter", gen_noise.size_jitter, "size jitter (px)");
    gen->add_option("--fp-rate", gen_noise.fp_rate, "false positives per frame");
    gen->add_option("--fn-rate", gen_noise.fn_rate, "dropout probability");
    gen->add_flag("--appearance", gen_noise.supply_appearance,
                  "attach appearance histograms");

    // track
    auto* track = app.add_subcommand("track", "detections -> tracks");
    std::string track_det, track_motion, track_out = "tracks.json";
    track->add_option("--detections", track_det, "detections.jsonl")->required();
    track->add_option("--motion", track_motion, "motion.jsonl")->required();
    track->add_option("--out", track_out, "output tracks.json");
    ConfigArgs track_cfg;
    track_cfg.attach(track);

    // smooth
    auto* smooth = app.add_subcommand("smooth", "spline-smooth tracks");
    std::string smooth_in, smooth_out = "smoothed.json", smooth_video;
    smooth->add_option("--tracks", smooth_in, "tracks.json")->required();
    smooth->add_option("--video-id", smooth_video, "video id of the tracks")
        ->required();
    smooth->add_option("--out", smooth_out, "output tracks.json");
    ConfigArgs smooth_cfg;
    smooth_cfg.attach(smooth);

    // extract
    auto* extract = app.add_subcommand("extract", "tracks -> feature series");
    std::string ex_tracks, ex_video, ex_out = "features.csv", ex_pair_out;
    extract->add_option("--tracks", ex_tracks, "tracks.json")->required();
    extract->add_option("--video-id", ex_video, "video id of the tracks")
        ->required();
    extract->add_option("--out", ex_out, "agent feature CSV");
    extract->add_option("--pair-out", ex_pair_out, "pair feature CSV (if any)");

    // train
    auto* train = app.add_subcommand("train", "train verb models from a corpus");
    std::string train_manifest, train_out = "model.json";
    train->add_option("--manifest", train_manifest, "corpus manifest.json")
        ->required();
    train->add_option("--out", train_out, "output model.json");
    ConfigArgs train_cfg;
    train_cfg.attach(train);

    // label
    auto* label = app.add_subcommand("label", "label one video with a model");
    std::string label_model, label_det, label_motion;
    label->add_option("--model", label_model, "model.json")->required();
    label->add_option("--detections", label_det, "detections.jsonl")->required();
    label->add_option("--motion", label_motion, "motion.jsonl")->required();
    ConfigArgs label_cfg;
    label_cfg.attach(label);

    // cv
    auto* cv = app.add_subcommand("cv", "stratified k-fold cross-validation");
    std::string cv_manifest, cv_out_dir = ".";
    cv->add_option("--manifest", cv_manifest, "corpus manifest.json")->required();
    cv->add_option("--out-dir", cv_out_dir, "where labels.json/confusion.json go");
    ConfigArgs cv_cfg;
    cv_cfg.attach(cv);

    // report
    auto* report = app.add_subcommand("report", "render a stored confusion matrix");
    std::string report_in;
    report->add_option("--confusion", report_in, "confusion.json")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed())
            return cmd_synth_gen(gen_out, gen_verbs, gen_per_verb, gen_seed, gen_noise);

        if (track->parsed()) {
            PipelineConfig config = track_cfg.resolve(track);
            auto tracks = run_tracking(track_det, track_motion, config);
            save_tracks(tracks, track_out);
            std::cout << "wrote " << tracks.size() << " tracks to " << track_out
                      << "\n";
            return 0;
        }

        if (smooth->parsed()) {
            PipelineConfig config = smooth_cfg.resolve(smooth);
            auto tracks = load_tracks(smooth_in, smooth_video);
            save_tracks(smooth_tracks(tracks, config), smooth_out);
            std::cout << "wrote " << tracks.size() << " tracks to " << smooth_out
                      << "\n";
            return 0;
        }

        if (extract->parsed()) {
            auto tracks = load_tracks(ex_tracks, ex_video);
            VideoFeatures vf = extract_video_features(ex_video, tracks);
            save_feature_series(vf.agent, ex_out);
            std::cout << "wrote " << vf.agent.frames.size() << " agent rows to "
                      << ex_out << "\n";
            if (!ex_pair_out.empty()) {
                if (vf.pair.has_value()) {
                    save_feature_series(*vf.pair, ex_pair_out);
                    std::cout << "wrote " << vf.pair->frames.size()
                              << " pair rows to " << ex_pair_out << "\n";
                } else {
                    std::cout << "no patient track; pair features skipped\n";
                }
            }
            return 0;
        }

        if (train->parsed()) {
            PipelineConfig config = train_cfg.resolve(train);
            CorpusManifest manifest = load_manifest(train_manifest);
            std::string base = fs::path(train_manifest).parent_path().string();
            if (base.empty()) base = ".";

            std::vector<std::optional<VideoFeatures>> features(manifest.videos.size());
            parallel_for_indexed(manifest.videos.size(), config.jobs, [&](std::size_t i) {
                const auto& entry = manifest.videos[i];
                try {
                    auto stream = load_detection_stream(
                        (fs::path(base) / entry.detection_stream_path).string());
                    auto field = load_motion_field(
                        (fs::path(base) / entry.motion_field_path).string(),
                        stream.frame_count);
                    auto tracks =
                        smooth_tracks(track_video(stream, field, config), config);
                    features[i] = extract_video_features(entry.video_id, tracks);
                } catch (const std::exception&) {
                    // Unusable exemplars are simply left out of training.
                }
            });

            std::map<std::string, std::string> verb_of_video;
            std::vector<VideoFeatures> usable;
            for (std::size_t i = 0; i < manifest.videos.size(); ++i) {
                verb_of_video[manifest.videos[i].video_id] =
                    manifest.videos[i].verb_label;
                if (features[i].has_value()) usable.push_back(*features[i]);
            }
            TrainSettings settings;
            settings.kind = classifier_kind(config.classifier);
            settings.hmm_states = config.hmm_states;
            settings.seed = config.seed;
            settings.dtw_zscore = config.dtw_zscore;
            ModelSet models = train_verb_models(manifest.vocabulary(), verb_of_video,
                                                usable, settings);
            save_models(models, train_out);
            std::cout << "trained " << models.verbs.size() << " verb models ("
                      << usable.size() << "/" << manifest.videos.size()
                      << " exemplars) -> " << train_out << "\n";
            return 0;
        }

        if (label->parsed()) {
            PipelineConfig config = label_cfg.resolve(label);
            ModelSet models = load_models(label_model);
            DetectionStream stream = load_detection_stream(label_det);
            MotionField field = load_motion_field(label_motion, stream.frame_count);
            auto tracks = smooth_tracks(track_video(stream, field, config), config);
            VideoFeatures vf = extract_video_features(stream.video_id, tracks);
            LabelResult lr = label_video(models, vf);
            std::cout << stream.video_id << ": " << lr.predicted << "\n";
            for (const auto& [verb, score] : lr.scores)
                std::cout << "  " << verb << "\t" << score << "\n";
            return 0;
        }

        if (cv->parsed()) {
            PipelineConfig config = cv_cfg.resolve(cv);
            CorpusManifest manifest = load_manifest(cv_manifest);
            std::string base = fs::path(cv_manifest).parent_path().string();
            if (base.empty()) base = ".";
            CrossValidationResult result = cross_validate(manifest, base, config);
            fs::create_directories(cv_out_dir);
            save_labels(result.labels, (fs::path(cv_out_dir) / "labels.json").string());
            save_confusion(result.confusion, result.fold_accuracies,
                           (fs::path(cv_out_dir) / "confusion.json").string());
            std::cout << render_confusion(result.confusion);
            return 0;
        }

        if (report->parsed()) {
            ConfusionMatrix m = load_confusion(report_in);
            std::cout << render_confusion(m);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
