#include "seedkit/types.hpp"

#include <algorithm>
#include <cctype>

namespace seedkit {

namespace {
std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}
}  // namespace

const char* to_string(Role r) { return r == Role::GT ? "gt" : "recon"; }

Role role_from_string(const std::string& s) {
    auto l = lower(s);
    if (l == "gt") return Role::GT;
    if (l == "recon") return Role::RECON;
    throw ValidationError("role must be \"gt\" or \"recon\", got \"" + s + "\"");
}

const char* to_string(EmbeddingKind k) {
    return k == EmbeddingKind::CAPTION_TEXT ? "caption_text" : "image_feature";
}

EmbeddingKind embedding_kind_from_string(const std::string& s) {
    auto l = lower(s);
    if (l == "caption_text") return EmbeddingKind::CAPTION_TEXT;
    if (l == "image_feature") return EmbeddingKind::IMAGE_FEATURE;
    throw ValidationError("kind must be \"caption_text\" or \"image_feature\", got \"" + s + "\"");
}

void DetectionSet::canonicalize() {
    std::map<std::string, Detection> best;
    std::map<std::string, std::vector<double>> seen;
    for (const auto& d : detections) {
        seen[d.category].push_back(d.confidence);
        auto it = best.find(d.category);
        if (it == best.end() || d.confidence > it->second.confidence) best[d.category] = d;
    }
    // Instance lists from an earlier canonicalization survive re-canonicalization.
    for (auto& [cat, confs] : instances)
        if (confs.size() > seen[cat].size()) seen[cat] = confs;
    for (auto& [cat, confs] : seen) std::sort(confs.begin(), confs.end(), std::greater<>());
    detections.clear();
    for (auto& [cat, d] : best) detections.push_back(std::move(d));
    instances = std::move(seen);
}

const Detection* DetectionSet::find(const std::string& category) const {
    for (const auto& d : detections)
        if (d.category == category) return &d;
    return nullptr;
}

double DetectionSet::max_confidence() const {
    double m = 0;
    for (const auto& d : detections) m = std::max(m, d.confidence);
    return m;
}

std::size_t DetectionSet::instance_count(const std::string& category, double t) const {
    auto it = instances.find(category);
    if (it == instances.end()) {
        const Detection* d = find(category);
        return d && d->confidence >= t ? 1 : 0;
    }
    return static_cast<std::size_t>(
        std::count_if(it->second.begin(), it->second.end(), [t](double c) { return c >= t; }));
}

const RatingGrid& RatingsMatrix::grid(RatingKind kind) const {
    if (kind == RatingKind::SEMANTIC) return semantic;
    if (!perceptual) throw ValidationError("ratings have no perceptual column");
    return *perceptual;
}

std::size_t RatingsMatrix::missing_count(RatingKind kind) const {
    std::size_t n = 0;
    for (const auto& row : grid(kind))
        for (const auto& v : row)
            if (!v) ++n;
    return n;
}

bool RatingsMatrix::complete(RatingKind kind) const { return missing_count(kind) == 0; }

}  // namespace seedkit
