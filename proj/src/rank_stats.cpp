#include "seedkit/rank_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "seedkit/types.hpp"

namespace seedkit {

namespace {

// Number of tied pairs among consecutive equal runs of a sorted sequence.
template <class Eq>
std::int64_t tied_pairs(std::size_t n, Eq&& equal_to_prev) {
    std::int64_t total = 0, run = 1;
    for (std::size_t i = 1; i < n; ++i) {
        if (equal_to_prev(i)) {
            ++run;
        } else {
            total += run * (run - 1) / 2;
            run = 1;
        }
    }
    return total + run * (run - 1) / 2;
}

std::int64_t merge_count(std::vector<double>& v, std::vector<double>& buf, std::size_t lo,
                         std::size_t hi) {
    if (hi - lo < 2) return 0;
    std::size_t mid = lo + (hi - lo) / 2;
    std::int64_t swaps = merge_count(v, buf, lo, mid) + merge_count(v, buf, mid, hi);
    std::size_t i = lo, j = mid, k = lo;
    while (i < mid && j < hi) {
        if (v[j] < v[i]) {
            swaps += static_cast<std::int64_t>(mid - i);
            buf[k++] = v[j++];
        } else {
            buf[k++] = v[i++];
        }
    }
    while (i < mid) buf[k++] = v[i++];
    while (j < hi) buf[k++] = v[j++];
    std::copy(buf.begin() + lo, buf.begin() + hi, v.begin() + lo);
    return swaps;
}

}  // namespace

PairCounts count_pairs(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw ValidationError("rank statistic: length mismatch " + std::to_string(x.size()) + " vs " +
                              std::to_string(y.size()));
    const std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i)
        if (std::isnan(x[i]) || std::isnan(y[i])) throw ValidationError("rank statistic: NaN input");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
    });

    PairCounts c;
    c.pairs = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - (n > 0)) / 2;
    c.ties_x = tied_pairs(n, [&](std::size_t i) { return x[order[i]] == x[order[i - 1]]; });
    c.ties_xy = tied_pairs(n, [&](std::size_t i) {
        return x[order[i]] == x[order[i - 1]] && y[order[i]] == y[order[i - 1]];
    });

    std::vector<double> ys(n), buf(n);
    for (std::size_t i = 0; i < n; ++i) ys[i] = y[order[i]];
    c.discordant = merge_count(ys, buf, 0, n);  // ys is now sorted
    c.ties_y = tied_pairs(n, [&](std::size_t i) { return ys[i] == ys[i - 1]; });
    c.concordant = c.pairs - c.ties_x - c.ties_y + c.ties_xy - c.discordant;
    return c;
}

double kendall_tau_b(std::span<const double> x, std::span<const double> y) {
    if (x.size() < 2) throw ValidationError("kendall tau-b needs at least 2 items");
    auto c = count_pairs(x, y);
    auto dx = c.pairs - c.ties_x, dy = c.pairs - c.ties_y;
    if (dx == 0 || dy == 0) throw UndefinedError("undefined tau-b: all values tied");
    return static_cast<double>(c.concordant - c.discordant) /
           std::sqrt(static_cast<double>(dx) * static_cast<double>(dy));
}

double pairwise_accuracy(std::span<const double> metric, std::span<const double> human) {
    if (metric.size() < 2) throw ValidationError("pairwise accuracy needs at least 2 items");
    auto c = count_pairs(metric, human);
    std::int64_t orderable = c.pairs - c.ties_y;
    if (orderable == 0) throw UndefinedError("no orderable pairs: all human scores tied");
    double credit = static_cast<double>(c.concordant) + 0.5 * static_cast<double>(c.ties_x - c.ties_xy);
    return credit / static_cast<double>(orderable);
}

std::vector<double> average_ranks_descending(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] > x[b]; });
    std::vector<double> ranks(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
        double r = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

}  // namespace seedkit
