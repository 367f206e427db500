#pragma once

// Reference implementations used only by tests. Each one takes a different
// route from the library code it checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace oracle {

using ConfMap = std::map<std::string, double>;  // category -> max confidence

/// #{k >= 0 : k / 100 <= x}, matching the 0.01 grid's k / 100 construction.
inline long grid_points_upto(double x, long divisor = 100) {
    if (x < 0) return 0;
    long m = static_cast<long>(std::floor(x * static_cast<double>(divisor)));
    while (static_cast<double>(m + 1) / static_cast<double>(divisor) <= x) ++m;
    while (m >= 0 && static_cast<double>(m) / static_cast<double>(divisor) > x) --m;
    return m + 1;
}

/// Fraction of reference categories present in candidate at threshold t.
inline double ratio_at(const ConfMap& ref, const ConfMap& cand, double t) {
    double num = 0, den = 0;
    for (const auto& [c, conf] : ref) {
        if (conf < t) continue;
        den += 1;
        auto it = cand.find(c);
        if (it != cand.end() && it->second >= t) num += 1;
    }
    return num / den;
}

/// Grid average of the recall step function computed piecewise: the value is
/// constant on every interval between consecutive distinct confidences, so
/// each interval contributes value x (number of grid samples inside it).
inline double piecewise_grid_average(const ConfMap& ref, const ConfMap& cand, long divisor = 100) {
    double cutoff = 0;
    for (const auto& [c, v] : ref) cutoff = std::max(cutoff, v);
    std::set<double> breaks;
    for (const auto& [c, v] : ref)
        if (v <= cutoff) breaks.insert(v);
    for (const auto& [c, v] : cand)
        if (v <= cutoff) breaks.insert(v);
    breaks.insert(cutoff);

    double weighted = 0;
    long samples = 0;
    double prev = -1;
    for (double b : breaks) {
        long count = grid_points_upto(b, divisor) - grid_points_upto(prev, divisor);
        if (count > 0) weighted += ratio_at(ref, cand, b) * static_cast<double>(count);
        samples += count;
        prev = b;
    }
    // The cutoff is sampled on its own when it is not a grid point.
    long m = grid_points_upto(cutoff, divisor) - 1;
    if (static_cast<double>(m) / static_cast<double>(divisor) != cutoff) {
        weighted += ratio_at(ref, cand, cutoff);
        ++samples;
    }
    return weighted / static_cast<double>(samples);
}

/// Kendall tau-b straight from the O(n^2) definition.
inline double tau_b_quadratic(const std::vector<double>& x, const std::vector<double>& y) {
    std::int64_t c = 0, d = 0, tx = 0, ty = 0;
    const std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double dx = x[i] - x[j], dy = y[i] - y[j];
            if (dx == 0) ++tx;
            if (dy == 0) ++ty;
            if (dx == 0 || dy == 0) continue;
            if ((dx > 0) == (dy > 0)) ++c;
            else ++d;
        }
    std::int64_t n0 = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
    return static_cast<double>(c - d) / std::sqrt(static_cast<double>(n0 - tx) * static_cast<double>(n0 - ty));
}

/// Pairwise accuracy by enumerating every unordered pair.
inline double pairwise_enumerated(const std::vector<double>& metric, const std::vector<double>& human) {
    double credit = 0;
    long pairs = 0;
    for (std::size_t i = 0; i < metric.size(); ++i)
        for (std::size_t j = i + 1; j < metric.size(); ++j) {
            if (human[i] == human[j]) continue;
            ++pairs;
            if (metric[i] == metric[j]) credit += 0.5;
            else if ((metric[i] > metric[j]) == (human[i] > human[j])) credit += 1;
        }
    return credit / static_cast<double>(pairs);
}

struct Anova {
    double msr, msc, mse, icc;
};

/// Two-way ANOVA with the residual sum of squares formed explicitly from
/// x_ij - row_i - col_j + grand.
inline Anova icc_anova(const std::vector<std::vector<double>>& x) {
    const std::size_t n = x.size(), k = x[0].size();
    std::vector<double> rm(n, 0), cm(k, 0);
    double g = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j) g += x[i][j];
    g /= static_cast<double>(n * k);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < k; ++j) rm[i] += x[i][j];
        rm[i] /= static_cast<double>(k);
    }
    for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t i = 0; i < n; ++i) cm[j] += x[i][j];
        cm[j] /= static_cast<double>(n);
    }
    double ssr = 0, ssc = 0, sse = 0;
    for (std::size_t i = 0; i < n; ++i) ssr += static_cast<double>(k) * (rm[i] - g) * (rm[i] - g);
    for (std::size_t j = 0; j < k; ++j) ssc += static_cast<double>(n) * (cm[j] - g) * (cm[j] - g);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            double r = x[i][j] - rm[i] - cm[j] + g;
            sse += r * r;
        }
    Anova a;
    a.msr = ssr / static_cast<double>(n - 1);
    a.msc = ssc / static_cast<double>(k - 1);
    a.mse = sse / static_cast<double>((n - 1) * (k - 1));
    a.icc = (a.msr - a.mse) / (a.msr + (a.msc - a.mse) / static_cast<double>(n));
    return a;
}

}  // namespace oracle
