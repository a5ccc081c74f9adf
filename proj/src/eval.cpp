#include "verbtrack/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <random>
#include <sstream>

#include "verbtrack/errors.hpp"
#include "verbtrack/mathutil.hpp"

namespace verbtrack {

std::vector<std::string> FoldPlan::test_videos(int fold) const {
    std::vector<std::string> out;
    for (const auto& [verb, verb_cells] : cells)
        for (const auto& id : verb_cells[fold]) out.push_back(id);
    return out;
}

std::vector<std::string> FoldPlan::train_videos(int fold) const {
    std::vector<std::string> out;
    for (const auto& [verb, verb_cells] : cells)
        for (int c = 0; c < k; ++c)
            if (c != fold)
                for (const auto& id : verb_cells[c]) out.push_back(id);
    return out;
}

FoldPlan make_folds(const CorpusManifest& manifest, int k, std::uint64_t seed) {
    if (k < 2) throw SchemaError("need at least 2 folds");
    FoldPlan plan;
    plan.k = k;
    plan.seed = seed;
    std::map<std::string, std::vector<std::string>> by_verb;
    for (const auto& v : manifest.videos) by_verb[v.verb_label].push_back(v.video_id);
    for (auto& [verb, ids] : by_verb) {
        // Per-verb generator so the assignment of one verb is independent of
        // how many videos the others have.
        std::mt19937_64 rng(mix_seed(seed, verb));
        std::shuffle(ids.begin(), ids.end(), rng);
        auto& verb_cells = plan.cells[verb];
        verb_cells.assign(k, {});
        for (std::size_t i = 0; i < ids.size(); ++i)
            verb_cells[i % k].push_back(ids[i]);
    }
    return plan;
}

int ConfusionMatrix::total() const {
    int sum = 0;
    for (const auto& row : counts)
        for (int c : row) sum += c;
    for (int f : failed) sum += f;
    return sum;
}

double ConfusionMatrix::accuracy() const {
    int t = total();
    if (t == 0) return 0.0;
    int diag = 0;
    for (std::size_t i = 0; i < verbs.size(); ++i) diag += counts[i][i];
    return static_cast<double>(diag) / t;
}

ConfusionMatrix tabulate(const std::vector<std::string>& verbs,
                         const std::vector<VideoLabelRecord>& labels) {
    ConfusionMatrix m;
    m.verbs = verbs;
    m.counts.assign(verbs.size(), std::vector<int>(verbs.size(), 0));
    m.failed.assign(verbs.size(), 0);
    auto index_of = [&](const std::string& v) {
        auto it = std::find(verbs.begin(), verbs.end(), v);
        if (it == verbs.end())
            throw SchemaError("label '" + v + "' is not in the verb list");
        return static_cast<std::size_t>(it - verbs.begin());
    };
    for (const auto& r : labels) {
        std::size_t g = index_of(r.gold);
        if (r.failed)
            m.failed[g] += 1;
        else
            m.counts[g][index_of(r.predicted)] += 1;
    }
    return m;
}

std::string render_confusion(const ConfusionMatrix& m) {
    std::ostringstream out;
    std::size_t w = 8;
    for (const auto& v : m.verbs) w = std::max(w, v.size() + 2);
    auto cell = [&](const std::string& s) {
        out << s;
        for (std::size_t i = s.size(); i < w; ++i) out << ' ';
    };
    cell("");
    for (const auto& v : m.verbs) cell(v);
    cell("failed");
    out << "\n";
    for (std::size_t i = 0; i < m.verbs.size(); ++i) {
        int row_total = m.failed[i];
        for (int c : m.counts[i]) row_total += c;
        cell(m.verbs[i]);
        char buf[32];
        for (std::size_t j = 0; j < m.verbs.size(); ++j) {
            double pct = row_total ? 100.0 * m.counts[i][j] / row_total : 0.0;
            std::snprintf(buf, sizeof buf, "%.1f", pct);
            cell(buf);
        }
        double pct = row_total ? 100.0 * m.failed[i] / row_total : 0.0;
        std::snprintf(buf, sizeof buf, "%.1f", pct);
        cell(buf);
        out << "\n";
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "accuracy: %.1f%% (chance %.1f%%)\n",
                  100.0 * m.accuracy(), 100.0 * m.chance_baseline());
    out << buf;
    return out.str();
}

} // namespace verbtrack
