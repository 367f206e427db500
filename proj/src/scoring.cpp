#include "seedkit/scoring.hpp"

#include <algorithm>
#include <exception>
#include <functional>
#include <set>
#include <thread>

#include "seedkit/image.hpp"
#include "seedkit/vector_metrics.hpp"

namespace seedkit {

namespace {

// Feature model_tag backing each feature-based metric.
const std::map<std::string, std::string>& feature_tags() {
    static const std::map<std::string, std::string> tags = {
        {metric::kAlex2, "alexnet2"},     {metric::kAlex5, "alexnet5"},
        {metric::kInception, "inception"}, {metric::kClip, "clip"},
        {metric::kEffNetDist, "effnet"},   {metric::kEffNetBar, "effnet"},
        {metric::kSwavDist, "swav"},       {metric::kSwavBar, "swav"},
    };
    return tags;
}

bool is_object_metric(const std::string& m) {
    return m == metric::kObjectRecall || m == metric::kObjectPrecision || m == metric::kObjectF1;
}

bool is_two_way(const std::string& m) {
    return m == metric::kAlex2 || m == metric::kAlex5 || m == metric::kInception || m == metric::kClip;
}

// Which input a metric lacks for a pair, or empty when satisfied.
std::string missing_input(const PairRecord& p, const std::string& m) {
    if (is_object_metric(m))
        return p.gt_detections && p.recon_detections ? "" : "detections";
    if (m == metric::kCapSim)
        return p.gt_caption_embedding && p.recon_caption_embedding ? "" : "caption embeddings";
    if (m == metric::kPixCorr || m == metric::kSsim)
        return p.gt_pixels && p.recon_pixels ? "" : "images";
    if (auto it = feature_tags().find(m); it != feature_tags().end())
        return p.gt_features.count(it->second) && p.recon_features.count(it->second)
                   ? ""
                   : "'" + it->second + "' features";
    return "";
}

template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& f) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = t; i < n; i += threads) f(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace

std::vector<PairRecord> assemble_pairs(const std::vector<DetectionSet>& detections,
                                       const std::vector<EmbeddingRecord>& embeddings,
                                       const std::vector<CaptionRecord>& captions,
                                       const std::map<std::string, ManifestEntry>& manifest,
                                       const std::optional<std::string>& caption_tag) {
    std::map<std::string, PairRecord> pairs;
    auto slot = [&](const std::string& id) -> PairRecord& {
        auto& p = pairs[id];
        p.image_id = id;
        return p;
    };
    for (const auto& d : detections)
        (d.role == Role::GT ? slot(d.image_id).gt_detections : slot(d.image_id).recon_detections) = d;

    std::set<std::string> caption_models;
    for (const auto& e : embeddings)
        if (e.kind == EmbeddingKind::CAPTION_TEXT) caption_models.insert(e.model_tag);
    std::optional<std::string> cap_tag = caption_tag;
    if (!cap_tag && caption_models.size() == 1) cap_tag = *caption_models.begin();
    if (!cap_tag && caption_models.size() > 1) {
        if (caption_models.count("caption-embed"))
            cap_tag = "caption-embed";
        else
            throw ValidationError("several caption embedding models present; choose one with a caption tag");
    }

    for (const auto& e : embeddings) {
        auto& p = slot(e.image_id);
        if (e.kind == EmbeddingKind::CAPTION_TEXT) {
            if (e.model_tag != cap_tag) continue;
            (e.role == Role::GT ? p.gt_caption_embedding : p.recon_caption_embedding) = e.vector;
        } else {
            (e.role == Role::GT ? p.gt_features : p.recon_features)[e.model_tag] = e.vector;
        }
    }
    for (const auto& c : captions)
        (c.role == Role::GT ? slot(c.image_id).gt_caption : slot(c.image_id).recon_caption) = c.caption;
    for (const auto& [id, entry] : manifest) {
        auto& p = slot(id);
        p.gt_pixels = load_image(entry.gt_image);
        p.gt_pixels->image_id = id;
        p.gt_pixels->role = Role::GT;
        p.recon_pixels = load_image(entry.recon_image);
        p.recon_pixels->image_id = id;
        p.recon_pixels->role = Role::RECON;
        if (p.gt_pixels->width != p.recon_pixels->width || p.gt_pixels->height != p.recon_pixels->height)
            throw ValidationError("image dimension mismatch for '" + id + "'");
    }

    std::vector<PairRecord> out;
    out.reserve(pairs.size());
    for (auto& [id, p] : pairs) out.push_back(std::move(p));
    return out;
}

std::vector<std::string> expand_metrics(const std::vector<std::string>& requested) {
    std::set<std::string> want;
    for (const auto& m : requested) {
        if (m == "all") {
            want.insert(known_metrics().begin(), known_metrics().end());
            continue;
        }
        if (!is_known_metric(m)) throw ValidationError("unknown metric '" + m + "'");
        want.insert(m);
        if (m == metric::kSeed) want.insert({metric::kObjectF1, metric::kCapSim, metric::kEffNetBar});
    }
    if (want.count(metric::kObjectF1)) want.insert({metric::kObjectRecall, metric::kObjectPrecision});
    std::vector<std::string> out;
    for (const auto& m : known_metrics())
        if (want.count(m)) out.push_back(m);
    return out;
}

void check_inputs(const std::vector<PairRecord>& pairs, const std::vector<std::string>& metrics) {
    if (pairs.empty()) throw ValidationError("no image pairs in the inputs");
    std::string report;
    for (const auto& m : metrics) {
        std::vector<std::string> ids;
        std::string what;
        for (const auto& p : pairs) {
            auto miss = missing_input(p, m);
            if (!miss.empty()) {
                ids.push_back(p.image_id);
                what = miss;
            }
        }
        if (ids.empty()) continue;
        report += "\n  " + m + ": missing " + what + " for " + std::to_string(ids.size()) + " image(s): ";
        for (std::size_t i = 0; i < ids.size() && i < 20; ++i) report += (i ? ", " : "") + ids[i];
        if (ids.size() > 20) report += ", ...";
    }
    if (!report.empty()) throw ValidationError("missing inputs for enabled metrics:" + report);
}

std::vector<MetricVector> score_pairs(const std::vector<PairRecord>& pairs, const ScoreOptions& opts) {
    auto metrics = expand_metrics(opts.metrics);
    check_inputs(pairs, metrics);
    auto enabled = [&](const char* m) { return std::find(metrics.begin(), metrics.end(), m) != metrics.end(); };

    std::vector<MetricVector> rows(pairs.size());
    parallel_for(pairs.size(), opts.threads, [&](std::size_t i) {
        const auto& p = pairs[i];
        auto& r = rows[i];
        r.image_id = p.image_id;
        if (enabled(metric::kObjectF1)) {
            auto s = object_recall_precision(*p.gt_detections, *p.recon_detections, opts.grid, opts.weighting);
            r.scores[metric::kObjectRecall] = s.recall;
            r.scores[metric::kObjectPrecision] = s.precision;
            r.scores[metric::kObjectF1] = s.f1;
            if (s.recall_degenerate) r.degenerate.insert(metric::kObjectRecall);
            if (s.precision_degenerate) r.degenerate.insert(metric::kObjectPrecision);
            if (s.degenerate()) r.degenerate.insert(metric::kObjectF1);
        }
        if (enabled(metric::kCapSim))
            r.scores[metric::kCapSim] = cosine_similarity(*p.gt_caption_embedding, *p.recon_caption_embedding);
        for (const char* m : {metric::kEffNetBar, metric::kSwavBar, metric::kEffNetDist, metric::kSwavDist}) {
            if (!enabled(m)) continue;
            const auto& tag = feature_tags().at(m);
            double c = pearson(p.gt_features.at(tag), p.recon_features.at(tag));
            r.scores[m] = metric_orientation(m) == Orientation::LOWER_BETTER ? 1.0 - c : c;
        }
        if (enabled(metric::kSeed)) {
            r.scores[metric::kSeed] = seed_score(r.scores.at(metric::kObjectF1), r.scores.at(metric::kCapSim),
                                                 r.scores.at(metric::kEffNetBar));
            if (r.degenerate.count(metric::kObjectF1)) r.degenerate.insert(metric::kSeed);
        }
        if (enabled(metric::kPixCorr)) r.scores[metric::kPixCorr] = pixcorr(*p.gt_pixels, *p.recon_pixels);
        if (enabled(metric::kSsim)) r.scores[metric::kSsim] = ssim(*p.gt_pixels, *p.recon_pixels);
    });

    for (const auto& m : metrics) {
        if (!is_two_way(m)) continue;
        const auto& tag = feature_tags().at(m);
        std::vector<std::vector<double>> g, rc;
        for (const auto& p : pairs) {
            g.push_back(p.gt_features.at(tag));
            rc.push_back(p.recon_features.at(tag));
        }
        auto tw = two_way_identification(g, rc);
        for (std::size_t i = 0; i < rows.size(); ++i) rows[i].scores[m] = tw.per_image[i];
    }
    return rows;
}

}  // namespace seedkit
