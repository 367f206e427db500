#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace seedkit {

/// Pair classification counts over all n(n-1)/2 unordered pairs.
struct PairCounts {
    std::int64_t pairs = 0;       // n0
    std::int64_t concordant = 0;
    std::int64_t discordant = 0;
    std::int64_t ties_x = 0;      // pairs tied in x (including joint ties)
    std::int64_t ties_y = 0;      // pairs tied in y (including joint ties)
    std::int64_t ties_xy = 0;     // pairs tied in both
};

/// O(n log n) pair counting (sort by x, merge-sort inversions in y).
PairCounts count_pairs(std::span<const double> x, std::span<const double> y);

/// (C - D) / sqrt((n0 - T_x)(n0 - T_y)). Throws UndefinedError("undefined
/// tau-b") when x or y is entirely tied.
double kendall_tau_b(std::span<const double> x, std::span<const double> y);

/// Over pairs with distinct human scores: 1 when the metric orders them the
/// same way, 0.5 when the metric ties, 0 otherwise; averaged. Throws
/// UndefinedError("no orderable pairs") when every human score is tied.
double pairwise_accuracy(std::span<const double> metric, std::span<const double> human);

/// 1-based average ranks; rank 1 is the largest value, ties share the mean rank.
std::vector<double> average_ranks_descending(std::span<const double> x);

}  // namespace seedkit
