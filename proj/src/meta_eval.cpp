#include "seedkit/meta_eval.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "seedkit/distributions.hpp"
#include "seedkit/rank_stats.hpp"
#include "seedkit/rng.hpp"
#include "seedkit/vector_metrics.hpp"

namespace seedkit {

namespace {

// Per-evaluator z-scores of one rating grid.
std::vector<std::vector<std::optional<double>>> zscore_rows(const RatingsMatrix& m, RatingKind kind) {
    const auto& g = m.grid(kind);
    std::vector<std::vector<std::optional<double>>> z(g.size());
    for (std::size_t e = 0; e < g.size(); ++e) {
        double sum = 0;
        std::size_t n = 0;
        for (const auto& v : g[e])
            if (v) {
                sum += *v;
                ++n;
            }
        if (n == 0)
            throw ValidationError("evaluator '" + m.evaluator_ids[e] + "' has no ratings");
        double mean = sum / static_cast<double>(n);
        double ss = 0;
        for (const auto& v : g[e])
            if (v) ss += (*v - mean) * (*v - mean);
        double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
        z[e].resize(g[e].size());
        for (std::size_t i = 0; i < g[e].size(); ++i)
            if (g[e][i]) z[e][i] = sd > 0 ? (*g[e][i] - mean) / sd : 0.0;
    }
    return z;
}

std::vector<std::vector<std::optional<double>>> raw_rows(const RatingsMatrix& m, RatingKind kind) {
    const auto& g = m.grid(kind);
    std::vector<std::vector<std::optional<double>>> out(g.size());
    for (std::size_t e = 0; e < g.size(); ++e) {
        out[e].resize(g[e].size());
        for (std::size_t i = 0; i < g[e].size(); ++i)
            if (g[e][i]) out[e][i] = static_cast<double>(*g[e][i]);
    }
    return out;
}

ScoreMap column_means(const std::vector<std::vector<std::optional<double>>>& rows,
                      const std::vector<std::string>& image_ids) {
    ScoreMap out;
    for (std::size_t i = 0; i < image_ids.size(); ++i) {
        double s = 0;
        std::size_t n = 0;
        for (const auto& r : rows)
            if (r[i]) {
                s += *r[i];
                ++n;
            }
        if (n) out[image_ids[i]] = s / static_cast<double>(n);
    }
    return out;
}

double stat_of(std::span<const double> metric, std::span<const double> human, AlignmentStat stat) {
    switch (stat) {
        case AlignmentStat::PAIRWISE: return pairwise_accuracy(metric, human);
        case AlignmentStat::TAU_B: return kendall_tau_b(metric, human);
        case AlignmentStat::PEARSON: return pearson(metric, human);
    }
    return 0;
}

void common_vectors(const ScoreMap& metric, const ScoreMap& human, std::vector<double>& m,
                    std::vector<double>& h) {
    for (const auto& [id, hv] : human) {
        auto it = metric.find(id);
        if (it == metric.end()) continue;
        m.push_back(it->second);
        h.push_back(hv);
    }
    if (m.size() < 2) throw ValidationError("alignment needs at least 2 items shared by metric and human scores");
}

}  // namespace

NormalizedRatings normalize_ratings(const RatingsMatrix& m, RatingKind kind) {
    NormalizedRatings n;
    n.evaluator_ids = m.evaluator_ids;
    n.image_ids = m.image_ids;
    n.z = zscore_rows(m, kind);
    n.human_score = column_means(n.z, m.image_ids);
    return n;
}

ScoreMap raw_human_scores(const RatingsMatrix& m, RatingKind kind) {
    return column_means(raw_rows(m, kind), m.image_ids);
}

const char* to_string(AlignmentStat s) {
    switch (s) {
        case AlignmentStat::PAIRWISE: return "pairwise";
        case AlignmentStat::TAU_B: return "tau_b";
        case AlignmentStat::PEARSON: return "pearson";
    }
    return "tau_b";
}

AlignmentStat alignment_stat_from_string(const std::string& s) {
    if (s == "pairwise") return AlignmentStat::PAIRWISE;
    if (s == "tau_b" || s == "kendall") return AlignmentStat::TAU_B;
    if (s == "pearson") return AlignmentStat::PEARSON;
    throw ValidationError("unknown statistic '" + s + "' (pairwise|tau_b|pearson)");
}

double alignment_stat(const ScoreMap& metric, const ScoreMap& human, AlignmentStat stat) {
    std::vector<double> m, h;
    common_vectors(metric, human, m, h);
    return stat_of(m, h, stat);
}

AlignmentResult align(const ScoreMap& metric, const ScoreMap& human) {
    std::vector<double> m, h;
    common_vectors(metric, human, m, h);
    AlignmentResult r;
    r.n_items = m.size();
    r.pairwise_accuracy = pairwise_accuracy(m, h);
    r.kendall_tau_b = kendall_tau_b(m, h);
    r.pearson = pearson(m, h);
    return r;
}

ICCResult icc_2k(const std::vector<std::vector<double>>& x) {
    const std::size_t n = x.size();
    if (n < 2) throw ValidationError("ICC needs at least 2 items");
    const std::size_t k = x[0].size();
    if (k < 2) throw ValidationError("ICC needs at least 2 raters");
    for (const auto& row : x)
        if (row.size() != k) throw ValidationError("ICC needs a rectangular items x raters table");

    double grand = 0;
    std::vector<double> row_mean(n, 0.0), col_mean(k, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            row_mean[i] += x[i][j];
            col_mean[j] += x[i][j];
            grand += x[i][j];
        }
    const double dn = static_cast<double>(n), dk = static_cast<double>(k);
    grand /= dn * dk;
    for (auto& v : row_mean) v /= dk;
    for (auto& v : col_mean) v /= dn;

    double ss_rows = 0, ss_cols = 0, ss_total = 0;
    for (double v : row_mean) ss_rows += (v - grand) * (v - grand);
    for (double v : col_mean) ss_cols += (v - grand) * (v - grand);
    ss_rows *= dk;
    ss_cols *= dn;
    for (const auto& row : x)
        for (double v : row) ss_total += (v - grand) * (v - grand);
    double ss_err = std::max(0.0, ss_total - ss_rows - ss_cols);

    ICCResult r;
    r.df1 = static_cast<int>(n - 1);
    r.df2 = static_cast<int>((n - 1) * (k - 1));
    r.ms_rows = ss_rows / r.df1;
    r.ms_cols = ss_cols / static_cast<double>(k - 1);
    r.ms_error = ss_err / r.df2;
    // Sums of squares that are zero up to rounding are snapped to zero.
    const double scale = std::max(ss_total, 1.0) * 1e-13;
    if (ss_err < scale) r.ms_error = 0;
    if (ss_rows < scale) r.ms_rows = 0;
    r.no_item_variance = r.ms_rows == 0;

    double den = r.ms_rows + (r.ms_cols - r.ms_error) / dn;
    if (den == 0) throw UndefinedError("ICC undefined: ratings have no variance");
    r.icc = (r.ms_rows - r.ms_error) / den;
    if (r.ms_error == 0) {
        r.f_statistic = r.ms_rows > 0 ? std::numeric_limits<double>::infinity()
                                      : std::numeric_limits<double>::quiet_NaN();
        r.p_value = r.ms_rows > 0 ? 0.0 : 1.0;
    } else {
        r.f_statistic = r.ms_rows / r.ms_error;
        r.p_value = f_upper_tail(r.f_statistic, r.df1, r.df2);
    }
    return r;
}

ICCResult icc_2k(const RatingsMatrix& m, RatingKind kind) {
    const auto& g = m.grid(kind);
    if (m.missing_count(kind) != 0)
        throw ValidationError("ICC(2,k) needs a complete ratings matrix; " +
                              std::to_string(m.missing_count(kind)) + " cells are missing");
    std::vector<std::vector<double>> x(m.n_items(), std::vector<double>(m.n_evaluators()));
    for (std::size_t e = 0; e < m.n_evaluators(); ++e)
        for (std::size_t i = 0; i < m.n_items(); ++i) x[i][e] = *g[e][i];
    return icc_2k(x);
}

double quantile_sorted(const std::vector<double>& s, double q) {
    if (s.empty()) throw ValidationError("quantile of empty data");
    double pos = q * static_cast<double>(s.size() - 1);
    auto lo = static_cast<std::size_t>(std::floor(pos));
    std::size_t hi = std::min(lo + 1, s.size() - 1);
    double frac = pos - static_cast<double>(lo);
    if (frac == 0 || s[lo] == s[hi]) return s[lo];
    return s[lo] + frac * (s[hi] - s[lo]);
}

BootstrapCI bootstrap_delta(const RatingsMatrix& ratings, const ScoreMap& metric_a,
                            const ScoreMap& metric_b, const BootstrapOptions& opts,
                            const std::string& name) {
    if (opts.iterations < 1) throw ValidationError("bootstrap needs at least 1 iteration");
    if (!(opts.level > 0 && opts.level < 1)) throw ValidationError("bootstrap level must be in (0,1)");
    const std::size_t k = ratings.n_evaluators(), n = ratings.n_items();
    if (k == 0) throw ValidationError("bootstrap needs at least 1 evaluator");

    auto rows = opts.normalized_human ? zscore_rows(ratings, opts.kind) : raw_rows(ratings, opts.kind);
    std::vector<double> a(n), b(n);
    std::vector<std::string> missing;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& id = ratings.image_ids[i];
        auto ia = metric_a.find(id), ib = metric_b.find(id);
        if (ia == metric_a.end() || ib == metric_b.end()) {
            missing.push_back(id);
            continue;
        }
        a[i] = ia->second;
        b[i] = ib->second;
    }
    if (!missing.empty()) {
        std::string list;
        for (std::size_t i = 0; i < missing.size() && i < 10; ++i) list += (i ? ", " : "") + missing[i];
        throw ValidationError("bootstrap: metrics do not cover " + std::to_string(missing.size()) +
                              " rated images (" + list + (missing.size() > 10 ? ", ..." : "") + ")");
    }

    // Delta for one multiset of evaluators; throws UndefinedError when either
    // statistic is undefined on the resample.
    auto delta_for = [&](const std::vector<std::size_t>& drawn) {
        std::vector<double> sum(n, 0.0);
        std::vector<std::size_t> cnt(n, 0);
        for (std::size_t e : drawn)
            for (std::size_t i = 0; i < n; ++i)
                if (rows[e][i]) {
                    sum[i] += *rows[e][i];
                    ++cnt[i];
                }
        std::vector<double> h, va, vb;
        for (std::size_t i = 0; i < n; ++i) {
            if (!cnt[i]) continue;
            h.push_back(sum[i] / static_cast<double>(cnt[i]));
            va.push_back(a[i]);
            vb.push_back(b[i]);
        }
        if (h.size() < 2) throw UndefinedError("fewer than 2 rated items in resample");
        return stat_of(va, h, opts.stat) - stat_of(vb, h, opts.stat);
    };

    BootstrapCI ci;
    ci.metric_delta_name = name;
    ci.iterations = opts.iterations;
    ci.seed = opts.seed;
    ci.level = opts.level;
    {
        std::vector<std::size_t> all(k);
        for (std::size_t e = 0; e < k; ++e) all[e] = e;
        ci.point = delta_for(all);
    }

    const auto iters = static_cast<std::size_t>(opts.iterations);
    std::vector<double> deltas(iters);
    std::vector<int> redraws(iters, 0);
    auto run_iteration = [&](std::size_t it) {
        SplitMix64 rng(SplitMix64::stream_seed(opts.seed, it));
        std::vector<std::size_t> drawn(k);
        for (int attempt = 0;; ++attempt) {
            for (auto& e : drawn) e = static_cast<std::size_t>(rng.below(k));
            try {
                deltas[it] = delta_for(drawn);
                return;
            } catch (const UndefinedError&) {
                if (attempt >= opts.max_redraws)
                    throw UndefinedError("bootstrap: statistic undefined on " +
                                         std::to_string(attempt + 1) + " consecutive resamples");
                ++redraws[it];
            }
        }
    };

    unsigned threads = std::max(1u, std::min<unsigned>(opts.threads, static_cast<unsigned>(iters)));
    if (threads == 1) {
        for (std::size_t it = 0; it < iters; ++it) run_iteration(it);
    } else {
        std::vector<std::exception_ptr> errors(threads);
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&, t] {
                try {
                    for (std::size_t it = t; it < iters; it += threads) run_iteration(it);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        for (auto& th : pool) th.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    for (int r : redraws) ci.redraws += r;
    std::sort(deltas.begin(), deltas.end());
    double alpha = 1 - opts.level;
    ci.lower = quantile_sorted(deltas, alpha / 2);
    ci.upper = quantile_sorted(deltas, 1 - alpha / 2);
    return ci;
}

CombinationGrid combination_grid(const std::vector<NamedMetric>& metrics, const ScoreMap& human,
                                 AlignmentStat stat, bool z_normalize) {
    if (metrics.empty()) throw ValidationError("combination grid needs at least one metric");
    for (const auto& m : metrics)
        if (m.orientation != Orientation::HIGHER_BETTER)
            throw ValidationError("combination grid: metric '" + m.name +
                                  "' is lower-is-better; convert it to correlation form first");

    std::vector<std::string> ids;
    for (const auto& [id, _] : human) {
        bool everywhere = std::all_of(metrics.begin(), metrics.end(),
                                      [&](const NamedMetric& m) { return m.scores.count(id) != 0; });
        if (everywhere) ids.push_back(id);
    }
    if (ids.size() < 2) throw ValidationError("combination grid: fewer than 2 items shared by all metrics");

    std::vector<double> h;
    for (const auto& id : ids) h.push_back(human.at(id));
    std::vector<std::vector<double>> cols;
    for (const auto& m : metrics) {
        std::vector<double> v;
        for (const auto& id : ids) v.push_back(m.scores.at(id));
        if (z_normalize) {
            double mean = 0;
            for (double x : v) mean += x;
            mean /= static_cast<double>(v.size());
            double ss = 0;
            for (double x : v) ss += (x - mean) * (x - mean);
            double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
            if (sd == 0) throw UndefinedError("combination grid: metric '" + m.name + "' is constant");
            for (double& x : v) x = (x - mean) / sd;
        }
        cols.push_back(std::move(v));
    }

    CombinationGrid g;
    g.stat = stat;
    for (const auto& m : metrics) g.names.push_back(m.name);
    const std::size_t p = metrics.size();
    g.values.assign(p, std::vector<double>(p, 0.0));
    std::vector<double> combo(ids.size());
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i; j < p; ++j) {
            for (std::size_t r = 0; r < ids.size(); ++r) combo[r] = (cols[i][r] + cols[j][r]) / 2;
            double v;
            try {
                v = stat_of(combo, h, stat);
            } catch (const UndefinedError&) {
                v = std::numeric_limits<double>::quiet_NaN();
            }
            g.values[i][j] = g.values[j][i] = v;
        }
    return g;
}

std::vector<WorstCase> worst_case_judgments(const ScoreMap& metric, const ScoreMap& human,
                                            std::size_t k) {
    std::vector<std::string> ids;
    std::vector<double> m, h;
    for (const auto& [id, hv] : human) {
        auto it = metric.find(id);
        if (it == metric.end()) continue;
        ids.push_back(id);
        m.push_back(it->second);
        h.push_back(hv);
    }
    if (ids.size() < k)
        throw ValidationError("worst-case listing: requested " + std::to_string(k) + " items but only " +
                              std::to_string(ids.size()) + " are shared");
    auto rm = average_ranks_descending(m), rh = average_ranks_descending(h);
    std::vector<WorstCase> all;
    for (std::size_t i = 0; i < ids.size(); ++i)
        all.push_back({ids[i], rm[i], rh[i], std::abs(rm[i] - rh[i]), m[i], h[i]});
    std::stable_sort(all.begin(), all.end(), [](const WorstCase& a, const WorstCase& b) {
        if (a.discrepancy != b.discrepancy) return a.discrepancy > b.discrepancy;
        return a.image_id < b.image_id;
    });
    all.resize(k);
    return all;
}

}  // namespace seedkit
