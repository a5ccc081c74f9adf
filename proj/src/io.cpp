#include "verbtrack/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "verbtrack/errors.hpp"

using nlohmann::json;

namespace verbtrack {

namespace {

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open " + path + " for writing");
    return out;
}

json parse_document(std::istream& in, const std::string& path) {
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

json parse_line(const std::string& line, const std::string& where) {
    try {
        return json::parse(line);
    } catch (const json::parse_error& e) {
        throw ParseError(where + ": " + e.what());
    }
}

// Field access that reports schema problems instead of raw library errors.
template <typename T>
T field(const json& j, const char* name, const std::string& where) {
    if (!j.contains(name))
        throw SchemaError(where + ": missing field '" + name + "'");
    try {
        return j.at(name).get<T>();
    } catch (const json::exception& e) {
        throw SchemaError(where + ": bad field '" + name + "': " + e.what());
    }
}

json appearance_to_json(const AppearanceHistogram& h) {
    return json{{"l", h.l}, {"a", h.a}, {"b", h.b}};
}

AppearanceHistogram appearance_from_json(const json& j, const std::string& where) {
    AppearanceHistogram h;
    h.l = field<std::vector<double>>(j, "l", where);
    h.a = field<std::vector<double>>(j, "a", where);
    h.b = field<std::vector<double>>(j, "b", where);
    if (h.l.empty() || h.l.size() != h.a.size() || h.a.size() != h.b.size())
        throw SchemaError(where + ": appearance channels must share a nonzero bin count");
    h.bins = static_cast<int>(h.l.size());
    return h;
}

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

FeatureKind kind_from_string(const std::string& s, const std::string& where) {
    if (s == "linear") return FeatureKind::Linear;
    if (s == "angular") return FeatureKind::Angular;
    throw SchemaError(where + ": unknown feature kind '" + s + "'");
}

const char* kind_to_string(FeatureKind k) {
    return k == FeatureKind::Linear ? "linear" : "angular";
}

json schema_to_json(const FeatureSchema& s) {
    json kinds = json::array();
    for (auto k : s.kinds) kinds.push_back(kind_to_string(k));
    return json{{"names", s.names}, {"kinds", kinds}};
}

FeatureSchema schema_from_json(const json& j, const std::string& where) {
    FeatureSchema s;
    s.names = field<std::vector<std::string>>(j, "names", where);
    for (const auto& k : field<std::vector<std::string>>(j, "kinds", where))
        s.kinds.push_back(kind_from_string(k, where));
    if (s.names.size() != s.kinds.size())
        throw SchemaError(where + ": schema names/kinds length mismatch");
    return s;
}

json hmm_to_json(const HmmModel& m) {
    json output = json::array();
    for (const auto& row : m.output) {
        json jrow = json::array();
        for (const auto& e : row)
            jrow.push_back(json{{"kind", kind_to_string(e.kind)},
                                {"mean", e.mean},
                                {"spread", e.spread}});
        output.push_back(jrow);
    }
    return json{{"schema", schema_to_json(m.schema)},
                {"states", m.states},
                {"initial", m.initial},
                {"trans", m.trans},
                {"output", output},
                {"training", json{{"seed", m.training.seed},
                                  {"restarts", m.training.restarts},
                                  {"iterations", m.training.iterations},
                                  {"final_loglik", m.training.final_loglik},
                                  {"loglik_trace", m.training.loglik_trace}}}};
}

HmmModel hmm_from_json(const json& j, const std::string& where) {
    HmmModel m;
    m.schema = schema_from_json(j.at("schema"), where);
    m.states = field<int>(j, "states", where);
    m.initial = field<std::vector<double>>(j, "initial", where);
    m.trans = field<std::vector<std::vector<double>>>(j, "trans", where);
    for (const auto& jrow : j.at("output")) {
        std::vector<Emission> row;
        for (const auto& je : jrow) {
            Emission e;
            e.kind = kind_from_string(field<std::string>(je, "kind", where), where);
            e.mean = field<double>(je, "mean", where);
            e.spread = field<double>(je, "spread", where);
            row.push_back(e);
        }
        m.output.push_back(std::move(row));
    }
    if (j.contains("training")) {
        const json& t = j.at("training");
        m.training.seed = field<std::uint64_t>(t, "seed", where);
        m.training.restarts = field<int>(t, "restarts", where);
        m.training.iterations = field<int>(t, "iterations", where);
        m.training.final_loglik = field<double>(t, "final_loglik", where);
        if (t.contains("loglik_trace"))
            m.training.loglik_trace =
                t.at("loglik_trace").get<std::vector<std::vector<double>>>();
    }
    if (m.initial.size() != static_cast<std::size_t>(m.states) ||
        m.trans.size() != static_cast<std::size_t>(m.states) ||
        m.output.size() != static_cast<std::size_t>(m.states))
        throw SchemaError(where + ": state count does not match parameter shapes");
    return m;
}

json series_frames_to_json(const FeatureSeries& s) {
    return json(s.frames);
}

json bank_to_json(const DtwBank& b) {
    json exemplars = json::array();
    for (const auto& e : b.exemplars)
        exemplars.push_back(json{{"verb", e.verb},
                                 {"video_id", e.series.video_id},
                                 {"frames", series_frames_to_json(e.series)}});
    json j{{"schema", schema_to_json(b.schema)}, {"exemplars", exemplars}};
    if (b.zscore)
        j["zscore"] = json{{"means", b.zscore->means}, {"stds", b.zscore->stds}};
    else
        j["zscore"] = nullptr;
    return j;
}

DtwBank bank_from_json(const json& j, const std::string& where) {
    DtwBank b;
    b.schema = schema_from_json(j.at("schema"), where);
    for (const auto& je : j.at("exemplars")) {
        LabeledSeries e;
        e.verb = field<std::string>(je, "verb", where);
        e.series.video_id = field<std::string>(je, "video_id", where);
        e.series.schema = b.schema;
        e.series.frames = je.at("frames").get<std::vector<std::vector<double>>>();
        b.exemplars.push_back(std::move(e));
    }
    if (j.contains("zscore") && !j.at("zscore").is_null()) {
        ZScore z;
        z.means = field<std::vector<double>>(j.at("zscore"), "means", where);
        z.stds = field<std::vector<double>>(j.at("zscore"), "stds", where);
        b.zscore = std::move(z);
    }
    return b;
}

} // namespace

DetectionStream load_detection_stream(const std::string& path) {
    auto in = open_in(path);
    DetectionStream stream;
    std::string line;
    int line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::string where = path + ":" + std::to_string(line_no);
        json j = parse_line(line, where);
        if (!have_header) {
            stream.video_id = field<std::string>(j, "video_id", where);
            stream.frame_count = field<int>(j, "frame_count", where);
            if (stream.frame_count < 0)
                throw SchemaError(where + ": negative frame_count");
            if (!j.contains("sources"))
                throw SchemaError(where + ": missing field 'sources'");
            for (const auto& js : j.at("sources")) {
                SourceInfo s;
                s.source_id = field<std::string>(js, "source_id", where);
                s.learned_threshold = field<double>(js, "learned_threshold", where);
                s.class_label = field<std::string>(js, "class_label", where);
                if (js.contains("posture_label") && !js.at("posture_label").is_null())
                    s.posture_label = field<std::string>(js, "posture_label", where);
                stream.sources.push_back(std::move(s));
            }
            stream.frames.assign(stream.frame_count, {});
            have_header = true;
            continue;
        }
        DetectionBox box;
        box.frame = field<int>(j, "frame", where);
        box.cx = field<double>(j, "cx", where);
        box.cy = field<double>(j, "cy", where);
        box.w = field<double>(j, "w", where);
        box.h = field<double>(j, "h", where);
        box.score = field<double>(j, "score", where);
        box.source_id = field<std::string>(j, "source_id", where);
        if (!(box.w > 0.0) || !(box.h > 0.0))
            throw SchemaError(where + ": box dimensions must be positive");
        if (box.frame < 0 || box.frame >= stream.frame_count)
            throw IndexError(where + ": frame " + std::to_string(box.frame) +
                             " outside [0, " + std::to_string(stream.frame_count) + ")");
        if (stream.find_source(box.source_id) == nullptr)
            throw SchemaError(where + ": unknown source_id '" + box.source_id + "'");
        if (j.contains("appearance") && !j.at("appearance").is_null())
            box.appearance = appearance_from_json(j.at("appearance"), where);
        stream.frames[box.frame].push_back(std::move(box));
    }
    if (!have_header) throw ParseError(path + ": empty detections file");
    return stream;
}

void save_detection_stream(const DetectionStream& stream, const std::string& path) {
    auto out = open_out(path);
    json sources = json::array();
    for (const auto& s : stream.sources) {
        json js{{"source_id", s.source_id},
                {"learned_threshold", s.learned_threshold},
                {"class_label", s.class_label}};
        if (s.posture_label) js["posture_label"] = *s.posture_label;
        sources.push_back(std::move(js));
    }
    out << json{{"video_id", stream.video_id},
                {"frame_count", stream.frame_count},
                {"sources", sources}}
               .dump()
        << "\n";
    for (const auto& frame : stream.frames) {
        for (const auto& box : frame) {
            if (box.projected_depth != 0) continue; // projections are recomputed
            json j{{"frame", box.frame}, {"cx", box.cx},       {"cy", box.cy},
                   {"w", box.w},         {"h", box.h},         {"score", box.score},
                   {"source_id", box.source_id}};
            if (box.appearance) j["appearance"] = appearance_to_json(*box.appearance);
            out << j.dump() << "\n";
        }
    }
}

MotionField load_motion_field(const std::string& path, int frame_count) {
    auto in = open_in(path);
    MotionField field_out;
    field_out.frame_count = frame_count;
    field_out.pairs.assign(frame_count > 1 ? frame_count - 1 : 0, {});
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::string where = path + ":" + std::to_string(line_no);
        json j = parse_line(line, where);
        int frame = field<int>(j, "frame", where);
        if (frame < 0 || frame >= frame_count - 1)
            throw IndexError(where + ": frame " + std::to_string(frame) +
                             " has no successor inside the video");
        Correspondence c;
        c.x = field<double>(j, "x", where);
        c.y = field<double>(j, "y", where);
        c.x2 = field<double>(j, "x2", where);
        c.y2 = field<double>(j, "y2", where);
        field_out.pairs[frame].push_back(c);
    }
    return field_out;
}

void save_motion_field(const MotionField& field_in, const std::string& path) {
    auto out = open_out(path);
    for (std::size_t t = 0; t < field_in.pairs.size(); ++t)
        for (const auto& c : field_in.pairs[t])
            out << json{{"frame", static_cast<int>(t)},
                        {"x", c.x},
                        {"y", c.y},
                        {"x2", c.x2},
                        {"y2", c.y2}}
                       .dump()
                << "\n";
}

CorpusManifest load_manifest(const std::string& path) {
    auto in = open_in(path);
    json doc = parse_document(in, path);
    if (!doc.is_array()) throw SchemaError(path + ": manifest must be an array");
    CorpusManifest m;
    for (const auto& j : doc) {
        ManifestEntry e;
        e.video_id = field<std::string>(j, "video_id", path);
        e.verb_label = field<std::string>(j, "verb_label", path);
        e.detection_stream_path = field<std::string>(j, "detection_stream_path", path);
        e.motion_field_path = field<std::string>(j, "motion_field_path", path);
        e.frame_width = field<int>(j, "frame_width", path);
        e.frame_height = field<int>(j, "frame_height", path);
        m.videos.push_back(std::move(e));
    }
    return m;
}

void save_manifest(const CorpusManifest& manifest, const std::string& path) {
    json doc = json::array();
    for (const auto& e : manifest.videos)
        doc.push_back(json{{"video_id", e.video_id},
                           {"verb_label", e.verb_label},
                           {"detection_stream_path", e.detection_stream_path},
                           {"motion_field_path", e.motion_field_path},
                           {"frame_width", e.frame_width},
                           {"frame_height", e.frame_height}});
    open_out(path) << doc.dump(2) << "\n";
}

std::vector<Track> load_tracks(const std::string& path, const std::string& video_id) {
    auto in = open_in(path);
    json doc = parse_document(in, path);
    if (!doc.is_array()) throw SchemaError(path + ": tracks file must be an array");
    std::vector<Track> tracks;
    for (const auto& j : doc) {
        Track t;
        t.video_id = video_id;
        t.class_label = field<std::string>(j, "class_label", path);
        t.t0 = field<int>(j, "t0", path);
        t.t1 = field<int>(j, "t1", path);
        t.coherence = field<double>(j, "coherence", path);
        for (const auto& jb : j.at("boxes")) {
            DetectionBox b;
            b.frame = field<int>(jb, "frame", path);
            b.cx = field<double>(jb, "cx", path);
            b.cy = field<double>(jb, "cy", path);
            b.w = field<double>(jb, "w", path);
            b.h = field<double>(jb, "h", path);
            b.source_id = field<std::string>(jb, "source_id", path);
            if (!(b.w > 0.0) || !(b.h > 0.0))
                throw SchemaError(path + ": track box dimensions must be positive");
            t.boxes.push_back(std::move(b));
        }
        if (t.boxes.size() != static_cast<std::size_t>(t.t1 - t.t0 + 1))
            throw SchemaError(path + ": track does not cover [t0, t1]");
        for (std::size_t i = 0; i < t.boxes.size(); ++i)
            if (t.boxes[i].frame != t.t0 + static_cast<int>(i))
                throw SchemaError(path + ": track box frames must be consecutive");
        tracks.push_back(std::move(t));
    }
    return tracks;
}

void save_tracks(const std::vector<Track>& tracks, const std::string& path) {
    json doc = json::array();
    for (const auto& t : tracks) {
        json boxes = json::array();
        for (const auto& b : t.boxes)
            boxes.push_back(json{{"frame", b.frame},
                                 {"cx", b.cx},
                                 {"cy", b.cy},
                                 {"w", b.w},
                                 {"h", b.h},
                                 {"source_id", b.source_id}});
        doc.push_back(json{{"class_label", t.class_label},
                           {"t0", t.t0},
                           {"t1", t.t1},
                           {"coherence", t.coherence},
                           {"boxes", boxes}});
    }
    open_out(path) << doc.dump() << "\n";
}

FeatureSeries load_feature_series(const std::string& csv_path) {
    auto sidecar_in = open_in(csv_path + ".schema.json");
    json sidecar = parse_document(sidecar_in, csv_path + ".schema.json");
    FeatureSeries series;
    series.video_id = field<std::string>(sidecar, "video_id", csv_path);
    series.schema = schema_from_json(sidecar, csv_path);

    auto in = open_in(csv_path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError(csv_path + ": empty file");
    {
        std::stringstream header(line);
        std::string name;
        std::size_t i = 0;
        while (std::getline(header, name, ',')) {
            if (i >= series.schema.names.size() || name != series.schema.names[i])
                throw SchemaError(csv_path + ": header does not match sidecar schema");
            ++i;
        }
        if (i != series.schema.names.size())
            throw SchemaError(csv_path + ": header does not match sidecar schema");
    }
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string cell;
        std::vector<double> values;
        while (std::getline(row, cell, ',')) {
            try {
                std::size_t used = 0;
                values.push_back(std::stod(cell, &used));
                if (used != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw ParseError(csv_path + ":" + std::to_string(line_no) +
                                 ": bad number '" + cell + "'");
            }
        }
        if (values.size() != series.schema.size())
            throw SchemaError(csv_path + ":" + std::to_string(line_no) +
                              ": wrong column count");
        series.frames.push_back(std::move(values));
    }
    return series;
}

void save_feature_series(const FeatureSeries& series, const std::string& csv_path) {
    {
        auto out = open_out(csv_path);
        for (std::size_t i = 0; i < series.schema.names.size(); ++i)
            out << (i ? "," : "") << series.schema.names[i];
        out << "\n";
        for (const auto& row : series.frames) {
            for (std::size_t i = 0; i < row.size(); ++i)
                out << (i ? "," : "") << fmt_double(row[i]);
            out << "\n";
        }
    }
    json sidecar = schema_to_json(series.schema);
    sidecar["video_id"] = series.video_id;
    open_out(csv_path + ".schema.json") << sidecar.dump(2) << "\n";
}

ModelSet load_models(const std::string& path) {
    auto in = open_in(path);
    json doc = parse_document(in, path);
    ModelSet set;
    std::string kind = field<std::string>(doc, "kind", path);
    if (kind == "hmm") set.kind = ClassifierKind::Hmm;
    else if (kind == "dtw") set.kind = ClassifierKind::Dtw;
    else throw SchemaError(path + ": unknown classifier kind '" + kind + "'");
    set.hmm_states = field<int>(doc, "hmm_states", path);
    set.seed = field<std::uint64_t>(doc, "seed", path);
    set.dtw_zscore = field<bool>(doc, "dtw_zscore", path);
    for (const auto& jv : doc.at("verbs")) {
        VerbModel vm;
        vm.verb = field<std::string>(jv, "verb", path);
        vm.kind = set.kind;
        if (jv.contains("agent_hmm") && !jv.at("agent_hmm").is_null())
            vm.agent_hmm = hmm_from_json(jv.at("agent_hmm"), path);
        if (jv.contains("pair_hmm") && !jv.at("pair_hmm").is_null())
            vm.pair_hmm = hmm_from_json(jv.at("pair_hmm"), path);
        if (jv.contains("agent_dtw") && !jv.at("agent_dtw").is_null())
            vm.agent_dtw = bank_from_json(jv.at("agent_dtw"), path);
        if (jv.contains("pair_dtw") && !jv.at("pair_dtw").is_null())
            vm.pair_dtw = bank_from_json(jv.at("pair_dtw"), path);
        set.verbs.push_back(std::move(vm));
    }
    return set;
}

void save_models(const ModelSet& set, const std::string& path) {
    json verbs = json::array();
    for (const auto& vm : set.verbs) {
        json jv{{"verb", vm.verb}};
        jv["agent_hmm"] = vm.agent_hmm ? hmm_to_json(*vm.agent_hmm) : json(nullptr);
        jv["pair_hmm"] = vm.pair_hmm ? hmm_to_json(*vm.pair_hmm) : json(nullptr);
        jv["agent_dtw"] = vm.agent_dtw ? bank_to_json(*vm.agent_dtw) : json(nullptr);
        jv["pair_dtw"] = vm.pair_dtw ? bank_to_json(*vm.pair_dtw) : json(nullptr);
        verbs.push_back(std::move(jv));
    }
    open_out(path) << json{{"kind", set.kind == ClassifierKind::Hmm ? "hmm" : "dtw"},
                           {"hmm_states", set.hmm_states},
                           {"seed", set.seed},
                           {"dtw_zscore", set.dtw_zscore},
                           {"verbs", verbs}}
                          .dump()
                   << "\n";
}

std::vector<VideoLabelRecord> load_labels(const std::string& path) {
    auto in = open_in(path);
    json doc = parse_document(in, path);
    if (!doc.is_array()) throw SchemaError(path + ": labels file must be an array");
    std::vector<VideoLabelRecord> out;
    for (const auto& j : doc) {
        VideoLabelRecord r;
        r.video_id = field<std::string>(j, "video_id", path);
        r.gold = field<std::string>(j, "gold", path);
        r.predicted = field<std::string>(j, "predicted", path);
        r.fold = field<int>(j, "fold", path);
        r.failed = field<bool>(j, "failed", path);
        if (j.contains("failure")) r.failure = j.at("failure").get<std::string>();
        if (j.contains("scores"))
            r.scores = j.at("scores").get<std::map<std::string, double>>();
        out.push_back(std::move(r));
    }
    return out;
}

void save_labels(const std::vector<VideoLabelRecord>& labels, const std::string& path) {
    json doc = json::array();
    for (const auto& r : labels) {
        json j{{"video_id", r.video_id}, {"gold", r.gold},   {"predicted", r.predicted},
               {"fold", r.fold},         {"failed", r.failed}, {"scores", r.scores}};
        if (r.failed) j["failure"] = r.failure;
        doc.push_back(std::move(j));
    }
    open_out(path) << doc.dump(2) << "\n";
}

ConfusionMatrix load_confusion(const std::string& path) {
    auto in = open_in(path);
    json doc = parse_document(in, path);
    ConfusionMatrix m;
    m.verbs = field<std::vector<std::string>>(doc, "verbs", path);
    m.counts = field<std::vector<std::vector<int>>>(doc, "counts", path);
    m.failed = field<std::vector<int>>(doc, "failed", path);
    return m;
}

void save_confusion(const ConfusionMatrix& m, const std::vector<double>& fold_accuracies,
                    const std::string& path) {
    open_out(path) << json{{"verbs", m.verbs},
                           {"counts", m.counts},
                           {"failed", m.failed},
                           {"total", m.total()},
                           {"accuracy", m.accuracy()},
                           {"fold_accuracies", fold_accuracies}}
                          .dump(2)
                   << "\n";
}

} // namespace verbtrack
