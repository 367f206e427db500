#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "seedkit/types.hpp"
#include "seedkit/vocabulary.hpp"

namespace seedkit {

/// Thresholds t_k = k * step for k = 0..K with t_K <= cutoff, plus the cutoff
/// itself when it is not a grid point. When 1/step is an integer the samples
/// are formed as k / (1/step) so that e.g. 0.6 is the same double as the
/// literal 0.6.
struct ThresholdGrid {
    double step = 0.01;

    double at(long k) const;
    std::vector<double> samples(double cutoff) const;
};

enum class WeightingMode { NONE, SIZE, LOCATION, NUMBER };

const char* to_string(WeightingMode m);
WeightingMode weighting_from_string(const std::string& s);

struct ObjectScore {
    double recall = 0;
    double precision = 0;
    double f1 = 0;
    bool recall_degenerate = false;     // GT had no detections
    bool precision_degenerate = false;  // reconstruction had no detections

    bool degenerate() const { return recall_degenerate || precision_degenerate; }
};

/// Categories detected at threshold t (inclusive: confidence >= t).
std::set<std::string> detected_categories(const DetectionSet& s, double t);

/// 1 + area fraction: zero area -> 1, full image -> 2.
double size_weight(const BBox& b);
/// 2 - d / d_max, d = distance of the box center from the image center and
/// d_max = center-to-corner distance, in normalized coordinates.
double location_weight(const BBox& b);

/// Single-threshold recall of `reference` categories found in `candidate`.
/// Weights come from the reference side. Precision at t is
/// threshold_recall(recon, gt, t, mode). Requires a non-empty reference at t.
double threshold_recall(const DetectionSet& reference, const DetectionSet& candidate, double t,
                        WeightingMode mode = WeightingMode::NONE);

/// Threshold-integrated Object Recall / Precision and their harmonic mean.
/// Recall averages over the grid up to max GT confidence, precision up to max
/// reconstruction confidence. Empty sides are flagged degenerate and score 0.
ObjectScore object_recall_precision(const DetectionSet& gt, const DetectionSet& recon,
                                    const ThresholdGrid& grid = {},
                                    WeightingMode mode = WeightingMode::NONE);

/// Fraction of GT categories (restricted to `restrict`, confidence >= t) whose
/// supercategory appears among reconstruction supercategories at t. nullopt
/// when no GT category qualifies.
std::optional<double> relaxed_recall(const DetectionSet& gt, const DetectionSet& recon, double t,
                                     const CategoryVocabulary& vocab,
                                     const std::set<std::string>& restrict);
/// Restricted to the vocabulary's salient categories.
std::optional<double> relaxed_recall(const DetectionSet& gt, const DetectionSet& recon, double t,
                                     const CategoryVocabulary& vocab);

/// Exact-category counterpart of relaxed_recall with the same restriction.
std::optional<double> strict_recall(const DetectionSet& gt, const DetectionSet& recon, double t,
                                    const std::set<std::string>& restrict);

}  // namespace seedkit
