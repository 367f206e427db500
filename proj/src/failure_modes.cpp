#include "seedkit/failure_modes.hpp"

#include "seedkit/object_metrics.hpp"

namespace seedkit {

NearMissCounts near_miss_counts(const DetectionSet& gt, const DetectionSet& recon, double t,
                                const CategoryVocabulary& vocab) {
    auto recon_t = detected_categories(recon, t);
    std::set<std::string> recon_super;
    for (const auto& c : recon_t) recon_super.insert(vocab.supercategory(c));
    NearMissCounts n;
    for (const auto& c : detected_categories(gt, t)) {
        if (!vocab.is_salient(c)) continue;
        ++n.qualifying;
        if (recon_t.count(c))
            ++n.exact;
        else if (recon_super.count(vocab.supercategory(c)))
            ++n.near_miss;
    }
    return n;
}

SnmResult semantic_near_miss(const std::vector<PairRecord>& pairs, const CategoryVocabulary& vocab,
                             double t) {
    SnmResult r;
    double macro_sum = 0;
    std::size_t macro_n = 0;
    for (const auto& p : pairs) {
        if (!p.gt_detections || !p.recon_detections)
            throw ValidationError("semantic near-miss: pair '" + p.image_id + "' lacks detections");
        auto c = near_miss_counts(*p.gt_detections, *p.recon_detections, t, vocab);
        r.per_image[p.image_id] = c;
        r.qualifying += c.qualifying;
        r.near_misses += c.near_miss;
        r.exact += c.exact;
        if (c.qualifying) {
            macro_sum += static_cast<double>(c.near_miss) / static_cast<double>(c.qualifying);
            ++macro_n;
        }
    }
    if (r.qualifying == 0)
        throw UndefinedError("semantic near-miss: no salient GT category at confidence >= threshold");
    r.micro = static_cast<double>(r.near_misses) / static_cast<double>(r.qualifying);
    r.macro = macro_sum / static_cast<double>(macro_n);
    return r;
}

double snm_rate(const std::vector<PairRecord>& pairs, const CategoryVocabulary& vocab, double t) {
    return semantic_near_miss(pairs, vocab, t).micro;
}

bool is_detail_miss(double object_f1, double seed, double f1_min, double gap_min) {
    return object_f1 > f1_min && object_f1 - seed > gap_min;
}

double sdm_rate(const std::vector<MetricVector>& scores, double f1_min, double gap_min) {
    if (scores.empty()) return 0;
    std::size_t flagged = 0;
    for (const auto& s : scores) {
        if (!s.has("object_f1") || !s.has("seed"))
            throw ValidationError("semantic detail miss: row '" + s.image_id + "' lacks object_f1 or seed");
        if (is_detail_miss(s.scores.at("object_f1"), s.scores.at("seed"), f1_min, gap_min)) ++flagged;
    }
    return static_cast<double>(flagged) / static_cast<double>(scores.size());
}

FailureReport failure_report(const std::vector<PairRecord>& pairs,
                             const std::vector<MetricVector>& scores, const CategoryVocabulary& vocab,
                             double snm_t, double f1_min, double gap_min) {
    FailureReport rep;
    rep.snm_threshold = snm_t;
    rep.sdm_f1_min = f1_min;
    rep.sdm_gap_min = gap_min;
    auto snm = semantic_near_miss(pairs, vocab, snm_t);
    rep.snm_rate = snm.micro;
    rep.snm_rate_macro = snm.macro;
    rep.snm_qualifying = snm.qualifying;
    rep.snm_near_misses = snm.near_misses;
    for (const auto& [id, c] : snm.per_image) rep.per_pair_flags[id].near_miss_count = c.near_miss;
    rep.sdm_rate = sdm_rate(scores, f1_min, gap_min);
    for (const auto& s : scores) {
        bool flag = is_detail_miss(s.scores.at("object_f1"), s.scores.at("seed"), f1_min, gap_min);
        rep.per_pair_flags[s.image_id].detail_miss = flag;
        rep.sdm_pairs += flag;
    }
    return rep;
}

}  // namespace seedkit
