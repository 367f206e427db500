#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "seedkit/metric_vector.hpp"
#include "seedkit/types.hpp"

namespace seedkit {

using ScoreMap = std::map<std::string, double>;  // image_id -> score

/// Per-evaluator z-scored ratings and the per-image mean of them.
struct NormalizedRatings {
    std::vector<std::string> evaluator_ids;
    std::vector<std::string> image_ids;
    std::vector<std::vector<std::optional<double>>> z;  // [evaluator][item]
    ScoreMap human_score;                               // images with >= 1 rating
};

/// z = (x - mean) / sd per evaluator, sample sd (n - 1). Constant evaluators
/// (and evaluators with a single rating) map to zeros. Throws ValidationError
/// for an evaluator without ratings.
NormalizedRatings normalize_ratings(const RatingsMatrix& m, RatingKind kind = RatingKind::SEMANTIC);

/// Per-image mean of the raw Likert values.
ScoreMap raw_human_scores(const RatingsMatrix& m, RatingKind kind = RatingKind::SEMANTIC);

enum class AlignmentStat { PAIRWISE, TAU_B, PEARSON };

const char* to_string(AlignmentStat s);
AlignmentStat alignment_stat_from_string(const std::string& s);

struct AlignmentResult {
    double pairwise_accuracy = 0;
    double kendall_tau_b = 0;
    double pearson = 0;
    std::size_t n_items = 0;
};

/// Items are the image_ids present in both maps (at least 2 required).
double alignment_stat(const ScoreMap& metric, const ScoreMap& human, AlignmentStat stat);
AlignmentResult align(const ScoreMap& metric, const ScoreMap& human);

struct ICCResult {
    double icc = 0;
    double f_statistic = 0;
    int df1 = 0;
    int df2 = 0;
    double p_value = 1;
    double ms_rows = 0, ms_cols = 0, ms_error = 0;
    bool no_item_variance = false;  // MSR == 0, icc <= 0
};

/// ICC(2,k) from a complete items x raters table (two-way random effects,
/// average measures). Throws ValidationError when n < 2, k < 2 or ragged.
ICCResult icc_2k(const std::vector<std::vector<double>>& items_by_raters);
/// Throws ValidationError when the chosen rating grid has missing cells.
ICCResult icc_2k(const RatingsMatrix& m, RatingKind kind = RatingKind::SEMANTIC);

struct BootstrapOptions {
    AlignmentStat stat = AlignmentStat::TAU_B;
    int iterations = 1000;
    double level = 0.95;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    bool normalized_human = true;
    RatingKind kind = RatingKind::SEMANTIC;
    int max_redraws = 1000;  // per iteration, for resamples where the statistic is undefined
};

struct BootstrapCI {
    std::string metric_delta_name;
    double lower = 0;
    double upper = 0;
    double point = 0;   // delta on the original evaluators
    int iterations = 0;
    std::uint64_t seed = 0;
    double level = 0.95;
    int redraws = 0;    // resamples discarded because the statistic was undefined
};

/// Percentile CI of stat(metric_a) - stat(metric_b) under resampling evaluators
/// with replacement. Iteration i draws from SplitMix64(stream_seed(seed, i)).
BootstrapCI bootstrap_delta(const RatingsMatrix& ratings, const ScoreMap& metric_a,
                            const ScoreMap& metric_b, const BootstrapOptions& opts,
                            const std::string& name = "a-b");

/// Linear-interpolation (type 7) quantile of sorted data.
double quantile_sorted(const std::vector<double>& sorted, double q);

struct NamedMetric {
    std::string name;
    ScoreMap scores;
    Orientation orientation = Orientation::HIGHER_BETTER;
};

struct CombinationGrid {
    std::vector<std::string> names;
    std::vector<std::vector<double>> values;  // symmetric
    AlignmentStat stat = AlignmentStat::TAU_B;
};

/// Cell (i, j) = stat((metric_i + metric_j) / 2 vs human) over items common to
/// all metrics and the human scores. With z_normalize each metric is first
/// z-scored over those items. Throws ValidationError for LOWER_BETTER inputs.
CombinationGrid combination_grid(const std::vector<NamedMetric>& metrics, const ScoreMap& human,
                                 AlignmentStat stat, bool z_normalize = false);

struct WorstCase {
    std::string image_id;
    double metric_rank = 0;
    double human_rank = 0;
    double discrepancy = 0;
    double metric_score = 0;
    double human_score = 0;
};

/// Items ranked by metric and by human score (rank 1 = highest, ties share the
/// average rank); the k largest |rank differences|, ties broken by image_id.
std::vector<WorstCase> worst_case_judgments(const ScoreMap& metric, const ScoreMap& human,
                                            std::size_t k);

}  // namespace seedkit
