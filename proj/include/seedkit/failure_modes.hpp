#pragma once

#include <map>
#include <string>
#include <vector>

#include "seedkit/metric_vector.hpp"
#include "seedkit/types.hpp"
#include "seedkit/vocabulary.hpp"

namespace seedkit {

/// Per-image breakdown of the qualifying GT categories (salient, confidence
/// >= t) into exact hits, supercategory-only hits and full misses.
struct NearMissCounts {
    std::size_t qualifying = 0;
    std::size_t exact = 0;
    std::size_t near_miss = 0;
};

NearMissCounts near_miss_counts(const DetectionSet& gt, const DetectionSet& recon, double t,
                                const CategoryVocabulary& vocab);

struct SnmResult {
    double micro = 0;  // near misses / qualifying GT category occurrences
    double macro = 0;  // mean of per-image rates over images with qualifying categories
    std::size_t qualifying = 0;
    std::size_t near_misses = 0;
    std::size_t exact = 0;
    std::map<std::string, NearMissCounts> per_image;
};

/// Semantic near-miss rate. Throws ValidationError when a pair lacks
/// detections and UndefinedError when no GT category qualifies.
SnmResult semantic_near_miss(const std::vector<PairRecord>& pairs, const CategoryVocabulary& vocab,
                             double t = 0.3);
double snm_rate(const std::vector<PairRecord>& pairs, const CategoryVocabulary& vocab, double t = 0.3);

/// Object F1 > f1_min and Object F1 - SEED > gap_min (both strict).
bool is_detail_miss(double object_f1, double seed, double f1_min = 0.7, double gap_min = 0.2);

/// Fraction of score rows flagged by is_detail_miss. Requires object_f1 and
/// seed in every row; 0 for an empty list.
double sdm_rate(const std::vector<MetricVector>& scores, double f1_min = 0.7, double gap_min = 0.2);

struct PairFlags {
    std::size_t near_miss_count = 0;
    bool detail_miss = false;
};

struct FailureReport {
    double snm_rate = 0;        // micro average
    double snm_rate_macro = 0;
    double sdm_rate = 0;
    std::size_t snm_qualifying = 0;
    std::size_t snm_near_misses = 0;
    std::size_t sdm_pairs = 0;
    std::map<std::string, PairFlags> per_pair_flags;
    double snm_threshold = 0.3;
    double sdm_f1_min = 0.7;
    double sdm_gap_min = 0.2;
};

FailureReport failure_report(const std::vector<PairRecord>& pairs,
                             const std::vector<MetricVector>& scores, const CategoryVocabulary& vocab,
                             double snm_t = 0.3, double f1_min = 0.7, double gap_min = 0.2);

}  // namespace seedkit
