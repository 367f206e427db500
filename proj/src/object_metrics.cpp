#include "seedkit/object_metrics.hpp"

#include <algorithm>
#include <cmath>

namespace seedkit {

namespace {

// Grid points are k / divisor when 1/step is (numerically) an integer.
std::optional<double> integral_divisor(double step) {
    double inv = 1.0 / step;
    double r = std::round(inv);
    if (r >= 1 && std::abs(inv - r) < 1e-9 * r) return r;
    return std::nullopt;
}

double weight_of(const DetectionSet& side, const std::string& category, WeightingMode mode) {
    if (mode != WeightingMode::SIZE && mode != WeightingMode::LOCATION) return 1.0;
    const Detection* d = side.find(category);
    if (!d || !d->bbox)
        throw ValidationError(std::string(to_string(mode)) + " weighting needs a bbox for '" +
                              category + "' in " + side.image_id + "/" + to_string(side.role));
    return mode == WeightingMode::SIZE ? size_weight(*d->bbox) : location_weight(*d->bbox);
}

double hit_credit(const DetectionSet& reference, const DetectionSet& candidate,
                  const std::set<std::string>& candidate_t, const std::string& c, double t,
                  WeightingMode mode) {
    if (!candidate_t.count(c)) return 0.0;
    if (mode != WeightingMode::NUMBER) return 1.0;
    double a = static_cast<double>(reference.instance_count(c, t));
    double b = static_cast<double>(candidate.instance_count(c, t));
    return std::min(a, b) / std::max(a, b);
}

double grid_average(const DetectionSet& reference, const DetectionSet& candidate,
                    const ThresholdGrid& grid, WeightingMode mode) {
    auto ts = grid.samples(reference.max_confidence());
    double sum = 0;
    for (double t : ts) sum += threshold_recall(reference, candidate, t, mode);
    return sum / static_cast<double>(ts.size());
}

}  // namespace

double ThresholdGrid::at(long k) const {
    if (auto d = integral_divisor(step)) return static_cast<double>(k) / *d;
    return static_cast<double>(k) * step;
}

std::vector<double> ThresholdGrid::samples(double cutoff) const {
    if (!(step > 0) || !std::isfinite(step)) throw ValidationError("grid step must be > 0");
    if (!(cutoff >= 0)) throw ValidationError("grid cutoff must be >= 0");
    long k = static_cast<long>(std::floor(cutoff / step));
    while (k > 0 && at(k) > cutoff) --k;
    while (at(k + 1) <= cutoff) ++k;
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(k) + 2);
    for (long i = 0; i <= k; ++i) out.push_back(at(i));
    if (out.back() != cutoff) out.push_back(cutoff);
    return out;
}

const char* to_string(WeightingMode m) {
    switch (m) {
        case WeightingMode::NONE: return "none";
        case WeightingMode::SIZE: return "size";
        case WeightingMode::LOCATION: return "location";
        case WeightingMode::NUMBER: return "number";
    }
    return "none";
}

WeightingMode weighting_from_string(const std::string& s) {
    if (s == "none") return WeightingMode::NONE;
    if (s == "size") return WeightingMode::SIZE;
    if (s == "location") return WeightingMode::LOCATION;
    if (s == "number") return WeightingMode::NUMBER;
    throw ValidationError("unknown weighting mode '" + s + "' (none|size|location|number)");
}

std::set<std::string> detected_categories(const DetectionSet& s, double t) {
    std::set<std::string> out;
    for (const auto& d : s.detections)
        if (d.confidence >= t) out.insert(d.category);
    return out;
}

double size_weight(const BBox& b) { return 1.0 + std::clamp(b.area(), 0.0, 1.0); }

double location_weight(const BBox& b) {
    const double d_max = std::sqrt(0.5);
    double d = std::hypot(b.center_x() - 0.5, b.center_y() - 0.5);
    return 2.0 - std::min(d, d_max) / d_max;
}

double threshold_recall(const DetectionSet& reference, const DetectionSet& candidate, double t,
                        WeightingMode mode) {
    auto ref_t = detected_categories(reference, t);
    auto cand_t = detected_categories(candidate, t);
    if (ref_t.empty()) throw UndefinedError("no reference categories at threshold");
    double num = 0, den = 0;
    for (const auto& c : ref_t) {
        double w = weight_of(reference, c, mode);
        num += w * hit_credit(reference, candidate, cand_t, c, t, mode);
        den += w;
    }
    return num / den;
}

ObjectScore object_recall_precision(const DetectionSet& gt, const DetectionSet& recon,
                                    const ThresholdGrid& grid, WeightingMode mode) {
    ObjectScore s;
    s.recall_degenerate = gt.detections.empty();
    s.precision_degenerate = recon.detections.empty();
    if (!s.recall_degenerate) s.recall = grid_average(gt, recon, grid, mode);
    if (!s.precision_degenerate) s.precision = grid_average(recon, gt, grid, mode);
    if (!s.degenerate() && s.recall > 0 && s.precision > 0)
        s.f1 = 2 * s.recall * s.precision / (s.recall + s.precision);
    return s;
}

std::optional<double> relaxed_recall(const DetectionSet& gt, const DetectionSet& recon, double t,
                                     const CategoryVocabulary& vocab,
                                     const std::set<std::string>& restrict) {
    std::set<std::string> recon_super;
    for (const auto& c : detected_categories(recon, t)) recon_super.insert(vocab.supercategory(c));
    std::size_t qualifying = 0, hits = 0;
    for (const auto& c : detected_categories(gt, t)) {
        if (!restrict.count(c)) continue;
        ++qualifying;
        if (recon_super.count(vocab.supercategory(c))) ++hits;
    }
    if (qualifying == 0) return std::nullopt;
    return static_cast<double>(hits) / static_cast<double>(qualifying);
}

std::optional<double> relaxed_recall(const DetectionSet& gt, const DetectionSet& recon, double t,
                                     const CategoryVocabulary& vocab) {
    return relaxed_recall(gt, recon, t, vocab, vocab.salient());
}

std::optional<double> strict_recall(const DetectionSet& gt, const DetectionSet& recon, double t,
                                    const std::set<std::string>& restrict) {
    auto recon_t = detected_categories(recon, t);
    std::size_t qualifying = 0, hits = 0;
    for (const auto& c : detected_categories(gt, t)) {
        if (!restrict.count(c)) continue;
        ++qualifying;
        if (recon_t.count(c)) ++hits;
    }
    if (qualifying == 0) return std::nullopt;
    return static_cast<double>(hits) / static_cast<double>(qualifying);
}

}  // namespace seedkit
