#include "seedkit/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>
#include <openssl/evp.h>

#include "seedkit/failure_modes.hpp"
#include "seedkit/io.hpp"
#include "seedkit/meta_eval.hpp"
#include "seedkit/metric_vector.hpp"
#include "seedkit/scoring.hpp"
#include "seedkit/svg.hpp"
#include "seedkit/vector_metrics.hpp"
#include "seedkit/vocabulary.hpp"

#ifndef SEEDKIT_VERSION
#define SEEDKIT_VERSION "0.0.0"
#endif

namespace seedkit {

using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

const char* version() { return SEEDKIT_VERSION; }

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw Error("SHA-256 computation failed");
    static const char* hexd = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hexd[md[i] >> 4];
        out += hexd[md[i] & 15];
    }
    return out;
}

// ---------------------------------------------------------------- RunConfig

void RunConfig::validate() const {
    static const std::set<std::string> subcommands = {"score", "meta-eval", "failure-modes", "render", "validate"};
    if (!subcommands.count(subcommand)) throw ValidationError("unknown subcommand '" + subcommand + "'");
    if (!(grid_step > 0 && grid_step <= 1)) throw ValidationError("--grid-step must be in (0, 1]");
    weighting_from_string(weighting);
    if (!(snm_threshold >= 0 && snm_threshold <= 1)) throw ValidationError("--snm-threshold must be in [0, 1]");
    if (!std::isfinite(sdm_f1_min) || !std::isfinite(sdm_gap_min))
        throw ValidationError("--sdm-f1-min / --sdm-gap-min must be finite");
    if (bootstrap_iters < 1) throw ValidationError("--bootstrap-iters must be >= 1");
    if (!(bootstrap_level > 0 && bootstrap_level < 1)) throw ValidationError("--bootstrap-level must be in (0, 1)");
    if (rating_kind != "semantic" && rating_kind != "perceptual")
        throw ValidationError("--rating-kind must be semantic or perceptual");
    alignment_stat_from_string(grid_stat);
    if (worst_k < 0) throw ValidationError("--worst-k must be >= 0");
    chart_kind_from_string(chart);
    if (threads < 1) throw ValidationError("--threads must be >= 1");
    if (out.empty()) throw ValidationError("--out must not be empty");
    for (const auto& d : deltas)
        if (std::count(d.begin(), d.end(), ':') != 1 || d.front() == ':' || d.back() == ':')
            throw ValidationError("--delta expects metric_a:metric_b, got '" + d + "'");
    for (const auto& m : metrics)
        if (m.empty()) throw ValidationError("--metrics contains an empty name");

    auto need = [&](const std::optional<std::string>& v, const char* flag) {
        if (!v) throw ValidationError(subcommand + " requires " + flag);
    };
    if (subcommand == "score" && !detections && !embeddings && !manifest)
        throw ValidationError("score requires at least one of --detections, --embeddings, --manifest");
    if (subcommand == "meta-eval") {
        need(ratings, "--ratings");
        if (!scores && !detections && !embeddings && !manifest)
            throw ValidationError("meta-eval requires --scores or raw inputs to score");
    }
    if (subcommand == "failure-modes") {
        need(detections, "--detections");
        if (!scores && !embeddings)
            throw ValidationError("failure-modes requires --scores or --embeddings (for SEED)");
    }
    if (subcommand == "render") need(input, "--input");
}

std::string RunConfig::to_json() const {
    ojson j;
    auto opt = [](const std::optional<std::string>& v) { return v ? ojson(*v) : ojson(nullptr); };
    j["subcommand"] = subcommand;
    j["detections"] = opt(detections);
    j["embeddings"] = opt(embeddings);
    j["captions"] = opt(captions);
    j["manifest"] = opt(manifest);
    j["ratings"] = opt(ratings);
    j["scores"] = opt(scores);
    j["vocab"] = opt(vocab);
    j["input"] = opt(input);
    j["caption-tag"] = opt(caption_tag);
    j["metrics"] = metrics;
    j["grid-step"] = grid_step;
    j["weighting"] = weighting;
    j["snm-threshold"] = snm_threshold;
    j["sdm-f1-min"] = sdm_f1_min;
    j["sdm-gap-min"] = sdm_gap_min;
    j["bootstrap-iters"] = bootstrap_iters;
    j["seed"] = seed;
    j["bootstrap-level"] = bootstrap_level;
    j["delta"] = deltas;
    j["rating-kind"] = rating_kind;
    j["human-raw"] = human_raw;
    j["grid-stat"] = grid_stat;
    j["grid-znorm"] = grid_znorm;
    j["worst-k"] = worst_k;
    j["chart"] = chart;
    j["title"] = title;
    j["out"] = out;
    j["strict"] = strict;
    return j.dump();
}

void RunConfig::merge_json(const std::string& text, const std::vector<std::string>& explicitly_set) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("config file: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("config file must hold a JSON object");
    auto given = [&](const std::string& k) {
        return std::find(explicitly_set.begin(), explicitly_set.end(), k) != explicitly_set.end();
    };
    auto str_list = [](const nlohmann::json& v) {
        if (v.is_string()) {
            std::vector<std::string> out;
            std::istringstream ss(v.get<std::string>());
            std::string item;
            while (std::getline(ss, item, ','))
                if (!item.empty()) out.push_back(item);
            return out;
        }
        return v.get<std::vector<std::string>>();
    };
    try {
        for (auto& [k, v] : j.items()) {
            if (given(k)) continue;
            if (k == "detections") detections = v.get<std::string>();
            else if (k == "embeddings") embeddings = v.get<std::string>();
            else if (k == "captions") captions = v.get<std::string>();
            else if (k == "manifest") manifest = v.get<std::string>();
            else if (k == "ratings") ratings = v.get<std::string>();
            else if (k == "scores") scores = v.get<std::string>();
            else if (k == "vocab") vocab = v.get<std::string>();
            else if (k == "input") input = v.get<std::string>();
            else if (k == "caption-tag") caption_tag = v.get<std::string>();
            else if (k == "metrics") metrics = str_list(v);
            else if (k == "grid-step") grid_step = v.get<double>();
            else if (k == "weighting") weighting = v.get<std::string>();
            else if (k == "snm-threshold") snm_threshold = v.get<double>();
            else if (k == "sdm-f1-min") sdm_f1_min = v.get<double>();
            else if (k == "sdm-gap-min") sdm_gap_min = v.get<double>();
            else if (k == "bootstrap-iters") bootstrap_iters = v.get<int>();
            else if (k == "seed") seed = v.get<std::uint64_t>();
            else if (k == "bootstrap-level") bootstrap_level = v.get<double>();
            else if (k == "delta") deltas = str_list(v);
            else if (k == "rating-kind") rating_kind = v.get<std::string>();
            else if (k == "human-raw") human_raw = v.get<bool>();
            else if (k == "grid-stat") grid_stat = v.get<std::string>();
            else if (k == "grid-znorm") grid_znorm = v.get<bool>();
            else if (k == "worst-k") worst_k = v.get<int>();
            else if (k == "chart") chart = v.get<std::string>();
            else if (k == "title") title = v.get<std::string>();
            else if (k == "out") out = v.get<std::string>();
            else if (k == "strict") strict = v.get<bool>();
            else if (k == "threads") threads = v.get<unsigned>();
            else throw ValidationError("config file: unknown key '" + k + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("config file: ") + e.what());
    }
}

// ------------------------------------------------------------- provenance

namespace {

struct Digests {
    std::map<std::string, std::string> by_path;

    std::string read(const std::string& path) {
        auto text = read_text_file(path);
        by_path[path] = sha256_hex(text);
        return text;
    }
    void add(const std::string& path) { read(path); }
};

ojson provenance(const RunConfig& cfg, const Digests& d) {
    ojson p;
    p["tool"] = "seedkit";
    p["tool_version"] = version();
    p["config"] = ojson::parse(cfg.to_json());
    ojson inputs = ojson::array();
    for (const auto& [path, digest] : d.by_path) inputs.push_back({{"path", path}, {"sha256", digest}});
    p["inputs"] = inputs;
    return p;
}

std::string xml_text(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '&') out += "&amp;";
        else if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else out += c;
    }
    return out;
}

std::string with_svg_metadata(const std::string& svg, const ojson& prov) {
    auto open = svg.find("<svg");
    auto end = svg.find(">\n", open);
    if (open == std::string::npos || end == std::string::npos) return svg;
    return svg.substr(0, end + 2) + "<metadata>" + xml_text(prov.dump()) + "</metadata>\n" + svg.substr(end + 2);
}

std::vector<std::string> csv_trailer(const ojson& prov) { return {"provenance " + prov.dump()}; }

ojson number_or_null(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

const CategoryVocabulary& vocabulary(const RunConfig& cfg, Digests& d, std::optional<CategoryVocabulary>& holder) {
    if (!cfg.vocab) return CategoryVocabulary::builtin();
    holder = CategoryVocabulary::from_json(d.read(*cfg.vocab));
    return *holder;
}

LoadOptions load_options(const RunConfig& cfg) {
    LoadOptions o;
    o.strict = cfg.strict;
    return o;
}

std::vector<PairRecord> load_pairs(const RunConfig& cfg, const CategoryVocabulary& vocab, Digests& d) {
    std::vector<DetectionSet> dets;
    std::vector<EmbeddingRecord> embs;
    std::vector<CaptionRecord> caps;
    std::map<std::string, ManifestEntry> manifest;
    if (cfg.detections) {
        d.add(*cfg.detections);
        dets = load_detections(*cfg.detections, vocab, load_options(cfg));
    }
    if (cfg.embeddings) {
        d.add(*cfg.embeddings);
        embs = load_embeddings(*cfg.embeddings);
    }
    if (cfg.captions) {
        d.add(*cfg.captions);
        caps = load_captions(*cfg.captions);
    }
    if (cfg.manifest) {
        d.add(*cfg.manifest);
        manifest = load_manifest(*cfg.manifest);
        for (const auto& [id, e] : manifest) {
            d.add(e.gt_image);
            d.add(e.recon_image);
        }
    }
    return assemble_pairs(dets, embs, caps, manifest, cfg.caption_tag);
}

ScoreOptions score_options(const RunConfig& cfg, const std::vector<std::string>& metrics) {
    ScoreOptions o;
    if (!metrics.empty()) o.metrics = metrics;
    o.grid.step = cfg.grid_step;
    o.weighting = weighting_from_string(cfg.weighting);
    o.threads = cfg.threads;
    return o;
}

std::string table_line(const std::string& label, const std::vector<double>& values) {
    std::string s = label;
    s.resize(std::max<std::size_t>(s.size(), 20), ' ');
    for (double v : values) {
        auto f = format_csv_number(v);
        s += "  " + std::string(f.size() < 10 ? 10 - f.size() : 0, ' ') + f;
    }
    return s + "\n";
}

RatingKind rating_kind(const RunConfig& cfg) {
    return cfg.rating_kind == "perceptual" ? RatingKind::PERCEPTUAL : RatingKind::SEMANTIC;
}

}  // namespace

// ------------------------------------------------------------------ score

CommandOutput cmd_score(const RunConfig& cfg) {
    cfg.validate();
    Digests digests;
    std::optional<CategoryVocabulary> vh;
    const auto& vocab = vocabulary(cfg, digests, vh);
    auto pairs = load_pairs(cfg, vocab, digests);
    auto opts = score_options(cfg, cfg.metrics);
    auto columns = expand_metrics(opts.metrics);
    auto rows = score_pairs(pairs, opts);
    auto prov = provenance(cfg, digests);

    CommandOutput out;
    out.files["scores.csv"] = scores_to_csv(rows, columns, csv_trailer(prov));
    out.files["scores.jsonl"] = scores_to_jsonl(rows);

    auto summary = summarize(rows, columns);
    ojson rep;
    rep["n_pairs"] = rows.size();
    rep["metrics"] = columns;
    ojson mean = ojson::object(), mean_nd = ojson::object(), cnt = ojson::object();
    for (const auto& c : columns) {
        mean[c] = summary.mean.count(c) ? number_or_null(summary.mean.at(c)) : ojson(nullptr);
        mean_nd[c] = summary.mean_non_degenerate.count(c) ? number_or_null(summary.mean_non_degenerate.at(c))
                                                          : ojson(nullptr);
        cnt[c] = summary.count_non_degenerate.at(c);
    }
    rep["mean"] = mean;
    rep["mean_non_degenerate"] = mean_nd;
    rep["count_non_degenerate"] = cnt;
    SsimParams sp;
    rep["ssim_params"] = {{"window", sp.window}, {"sigma", sp.sigma},     {"k1", sp.k1},
                          {"k2", sp.k2},         {"dynamic_range", sp.dynamic_range},
                          {"luma", "0.299R+0.587G+0.114B"}, {"windows", "valid"}};
    rep["object_grid"] = {{"step", cfg.grid_step}, {"comparison", "confidence >= t"},
                          {"weighting", cfg.weighting}};
    rep["provenance"] = prov;
    out.files["score_report.json"] = rep.dump(2) + "\n";

    std::vector<double> means;
    for (const auto& c : columns) means.push_back(summary.mean.count(c) ? summary.mean.at(c) : std::nan(""));
    std::string hdr = "metric means over " + std::to_string(rows.size()) + " pairs\n";
    for (std::size_t i = 0; i < columns.size(); ++i) hdr += table_line(columns[i], {means[i]});
    out.summary = hdr;
    return out;
}

// -------------------------------------------------------------- meta-eval

namespace {

// Scores either read from --scores or computed from raw inputs.
std::vector<MetricVector> obtain_scores(const RunConfig& cfg, Digests& digests,
                                        std::vector<PairRecord>* pairs_out = nullptr,
                                        const std::vector<std::string>& default_metrics = {}) {
    if (cfg.scores) return parse_scores(digests.read(*cfg.scores));
    std::optional<CategoryVocabulary> vh;
    const auto& vocab = vocabulary(cfg, digests, vh);
    auto pairs = load_pairs(cfg, vocab, digests);
    auto rows = score_pairs(pairs, score_options(cfg, cfg.metrics.empty() ? default_metrics : cfg.metrics));
    if (pairs_out) *pairs_out = std::move(pairs);
    return rows;
}

std::string list_ids(const std::vector<std::string>& ids) {
    std::string s;
    for (std::size_t i = 0; i < ids.size() && i < 20; ++i) s += (i ? ", " : "") + ids[i];
    if (ids.size() > 20) s += ", ... (" + std::to_string(ids.size()) + " total)";
    return s.empty() ? "(none)" : s;
}

}  // namespace

CommandOutput cmd_meta_eval(const RunConfig& cfg) {
    cfg.validate();
    Digests digests;
    auto ratings = parse_ratings(digests.read(*cfg.ratings));
    auto kind = rating_kind(cfg);
    auto rows = obtain_scores(cfg, digests);
    std::map<std::string, std::pair<std::string, std::string>> captions;
    if (cfg.captions) {
        digests.add(*cfg.captions);
        for (const auto& c : load_captions(*cfg.captions))
            (c.role == Role::GT ? captions[c.image_id].first : captions[c.image_id].second) = c.caption;
    }

    std::set<std::string> rated(ratings.image_ids.begin(), ratings.image_ids.end()), scored;
    for (const auto& r : rows) scored.insert(r.image_id);
    if (rated != scored) {
        std::vector<std::string> only_rated, only_scored;
        std::set_difference(rated.begin(), rated.end(), scored.begin(), scored.end(), std::back_inserter(only_rated));
        std::set_difference(scored.begin(), scored.end(), rated.begin(), rated.end(), std::back_inserter(only_scored));
        throw ValidationError("image_id mismatch between scores and ratings\n  rated but not scored: " +
                              list_ids(only_rated) + "\n  scored but not rated: " + list_ids(only_scored));
    }

    ScoreMap human = cfg.human_raw ? raw_human_scores(ratings, kind) : normalize_ratings(ratings, kind).human_score;

    std::vector<std::string> names;
    if (cfg.scores && !cfg.metrics.empty()) {
        names = cfg.metrics;
    } else {
        names = score_columns(rows);
    }
    std::map<std::string, ScoreMap> raw;
    for (const auto& n : names) {
        ScoreMap m;
        for (const auto& r : rows)
            if (auto it = r.scores.find(n); it != r.scores.end()) m[r.image_id] = it->second;
        if (m.empty()) throw ValidationError("metric '" + n + "' not present in the scores");
        raw[n] = std::move(m);
    }
    auto oriented = [&](const std::string& n) {
        ScoreMap m = raw.at(n);
        if (metric_orientation(n) == Orientation::LOWER_BETTER)
            for (auto& [_, v] : m) v = -v;
        return m;
    };

    auto prov = provenance(cfg, digests);
    CommandOutput out;
    ojson rep;
    rep["rating_kind"] = cfg.rating_kind;
    rep["human_score"] = cfg.human_raw ? "raw_mean" : "z_normalized_mean";
    rep["n_items"] = ratings.n_items();
    rep["n_evaluators"] = ratings.n_evaluators();
    rep["missing_ratings"] = ratings.missing_count(kind);

    // Alignment table.
    LabeledTable align_table;
    align_table.title = "Alignment with human ratings";
    align_table.col_labels = {"pairwise_accuracy", "kendall_tau_b", "pearson"};
    std::ostringstream csv;
    csv << "metric,orientation,pairwise_accuracy,kendall_tau_b,pearson,n_items\n";
    ojson arows = ojson::array();
    std::string summary = "metric                pairwise   tau_b      pearson\n";
    for (const auto& n : names) {
        auto m = oriented(n);
        auto safe = [&](AlignmentStat s) {
            try {
                return alignment_stat(m, human, s);
            } catch (const UndefinedError&) {
                return std::nan("");
            }
        };
        double pa = safe(AlignmentStat::PAIRWISE), tb = safe(AlignmentStat::TAU_B), pr = safe(AlignmentStat::PEARSON);
        std::size_t n_items = 0;
        for (const auto& [id, _] : m) n_items += human.count(id);
        const char* orient = metric_orientation(n) == Orientation::LOWER_BETTER ? "lower_better(negated)" : "higher_better";
        csv << n << ',' << orient << ',' << format_csv_number(pa) << ',' << format_csv_number(tb) << ','
            << format_csv_number(pr) << ',' << n_items << '\n';
        arows.push_back({{"metric", n}, {"orientation", orient}, {"pairwise_accuracy", number_or_null(pa)},
                         {"kendall_tau_b", number_or_null(tb)}, {"pearson", number_or_null(pr)}, {"n_items", n_items}});
        align_table.row_labels.push_back(n);
        align_table.values.push_back({pa, tb, pr});
        summary += table_line(n, {pa, tb, pr});
    }
    for (const auto& t : csv_trailer(prov)) csv << "# " << t << '\n';
    rep["alignment"] = arows;
    out.files["alignment.csv"] = csv.str();
    out.files["alignment_bar.svg"] = with_svg_metadata(render_bar_svg(align_table), prov);

    // Inter-rater agreement.
    if (ratings.complete(kind) && ratings.n_items() >= 2 && ratings.n_evaluators() >= 2) {
        try {
            auto icc = icc_2k(ratings, kind);
            rep["icc"] = {{"icc", icc.icc},          {"f_statistic", number_or_null(icc.f_statistic)},
                          {"df1", icc.df1},          {"df2", icc.df2},
                          {"p_value", icc.p_value},  {"no_item_variance", icc.no_item_variance}};
            summary += "ICC(2,k) = " + format_csv_number(icc.icc) + " (p = " + format_csv_number(icc.p_value) + ")\n";
        } catch (const UndefinedError& e) {
            rep["icc"] = {{"error", e.what()}};
        }
    } else {
        rep["icc"] = {{"error", "ICC(2,k) needs a complete ratings matrix with >= 2 items and >= 2 evaluators"}};
    }

    // Bootstrap deltas.
    ojson boots = ojson::array();
    for (const auto& d : cfg.deltas) {
        auto colon = d.find(':');
        std::string a = d.substr(0, colon), b = d.substr(colon + 1);
        if (!raw.count(a) || !raw.count(b))
            throw ValidationError("--delta names a metric not being evaluated: '" + d + "'");
        for (auto stat : {AlignmentStat::PAIRWISE, AlignmentStat::TAU_B, AlignmentStat::PEARSON}) {
            BootstrapOptions bo;
            bo.stat = stat;
            bo.iterations = cfg.bootstrap_iters;
            bo.level = cfg.bootstrap_level;
            bo.seed = cfg.seed;
            bo.threads = cfg.threads;
            bo.normalized_human = !cfg.human_raw;
            bo.kind = kind;
            auto ci = bootstrap_delta(ratings, oriented(a), oriented(b), bo, a + "-" + b);
            boots.push_back({{"delta", ci.metric_delta_name}, {"stat", to_string(stat)}, {"point", ci.point},
                             {"lower", ci.lower}, {"upper", ci.upper}, {"level", ci.level},
                             {"iterations", ci.iterations}, {"seed", ci.seed}, {"redraws", ci.redraws}});
            summary += "delta " + ci.metric_delta_name + " [" + to_string(stat) + "]: " + format_csv_number(ci.point) +
                       " CI [" + format_csv_number(ci.lower) + ", " + format_csv_number(ci.upper) + "]\n";
        }
    }
    rep["bootstrap"] = boots;

    // Combination grid over higher-is-better forms.
    std::vector<NamedMetric> grid_metrics;
    std::set<std::string> in_grid;
    for (const auto& n : names) {
        if (metric_orientation(n) == Orientation::HIGHER_BETTER) {
            grid_metrics.push_back({n, raw.at(n), Orientation::HIGHER_BETTER});
            in_grid.insert(n);
        }
    }
    for (const auto& n : names) {
        if (metric_orientation(n) != Orientation::LOWER_BETTER) continue;
        std::string corr_name = n.substr(0, n.rfind("_dist")) + "_bar";
        if (in_grid.count(corr_name)) continue;
        ScoreMap m = raw.at(n);
        for (auto& [_, v] : m) v = 1.0 - v;
        grid_metrics.push_back({corr_name, std::move(m), Orientation::HIGHER_BETTER});
        in_grid.insert(corr_name);
    }
    auto gstat = alignment_stat_from_string(cfg.grid_stat);
    auto grid = combination_grid(grid_metrics, human, gstat, cfg.grid_znorm);
    std::ostringstream gcsv;
    gcsv << "metric";
    for (const auto& n : grid.names) gcsv << ',' << n;
    gcsv << '\n';
    for (std::size_t i = 0; i < grid.names.size(); ++i) {
        gcsv << grid.names[i];
        for (double v : grid.values[i]) gcsv << ',' << format_csv_number(v);
        gcsv << '\n';
    }
    for (const auto& t : csv_trailer(prov)) gcsv << "# " << t << '\n';
    out.files["combination_grid.csv"] = gcsv.str();
    ojson gvals = ojson::array();
    for (const auto& row : grid.values) {
        ojson r = ojson::array();
        for (double v : row) r.push_back(number_or_null(v));
        gvals.push_back(r);
    }
    rep["combination_grid"] = {{"stat", to_string(gstat)}, {"z_normalized", cfg.grid_znorm},
                               {"metrics", grid.names}, {"values", gvals}};
    LabeledTable heat{std::string("Metric combinations vs human (") + to_string(gstat) + ")", grid.names,
                      grid.names, grid.values};
    out.files["combination_heatmap.svg"] = with_svg_metadata(render_heatmap_svg(heat), prov);

    // Worst-case judgments, with captions when available.
    ojson worst = ojson::object();
    for (const auto& n : names) {
        auto m = oriented(n);
        std::size_t shared = 0;
        for (const auto& [id, _] : m) shared += human.count(id);
        auto cases = worst_case_judgments(m, human, std::min<std::size_t>(cfg.worst_k, shared));
        ojson list = ojson::array();
        for (const auto& w : cases) {
            ojson e = {{"image_id", w.image_id},         {"metric_rank", w.metric_rank},
                       {"human_rank", w.human_rank},     {"discrepancy", w.discrepancy},
                       {"metric_score", w.metric_score}, {"human_score", w.human_score}};
            if (auto it = captions.find(w.image_id); it != captions.end()) {
                e["gt_caption"] = it->second.first;
                e["recon_caption"] = it->second.second;
            }
            list.push_back(e);
        }
        worst[n] = list;
    }
    ojson wrep;
    wrep["k"] = cfg.worst_k;
    wrep["ranking"] = "rank 1 = highest score; ties share the average rank";
    wrep["metrics"] = worst;
    wrep["provenance"] = prov;
    out.files["worst_cases.json"] = wrep.dump(2) + "\n";

    rep["provenance"] = prov;
    out.files["meta_eval.json"] = rep.dump(2) + "\n";
    out.summary = summary;
    return out;
}

// ---------------------------------------------------------- failure modes

CommandOutput cmd_failure_modes(const RunConfig& cfg) {
    cfg.validate();
    Digests digests;
    std::optional<CategoryVocabulary> vh;
    const auto& vocab = vocabulary(cfg, digests, vh);

    std::vector<MetricVector> rows;
    std::vector<PairRecord> pairs;
    if (cfg.scores) {
        rows = parse_scores(digests.read(*cfg.scores));
        digests.add(*cfg.detections);
        auto dets = load_detections(*cfg.detections, vocab, load_options(cfg));
        pairs = assemble_pairs(dets, {}, {});
    } else {
        RunConfig c = cfg;
        if (c.metrics.empty()) c.metrics = {metric::kSeed};
        rows = obtain_scores(c, digests, &pairs);
    }
    if (pairs.empty()) throw ValidationError("failure-modes: empty dataset");
    std::sort(rows.begin(), rows.end(), [](const MetricVector& a, const MetricVector& b) { return a.image_id < b.image_id; });

    auto rep = failure_report(pairs, rows, vocab, cfg.snm_threshold, cfg.sdm_f1_min, cfg.sdm_gap_min);
    auto prov = provenance(cfg, digests);

    ojson j;
    j["snm_rate"] = rep.snm_rate;
    j["snm_rate_macro"] = rep.snm_rate_macro;
    j["snm_qualifying_categories"] = rep.snm_qualifying;
    j["snm_near_misses"] = rep.snm_near_misses;
    j["sdm_rate"] = rep.sdm_rate;
    j["sdm_pairs"] = rep.sdm_pairs;
    j["n_pairs"] = rows.size();
    j["thresholds"] = {{"snm_threshold", rep.snm_threshold},
                       {"sdm_f1_min", rep.sdm_f1_min},
                       {"sdm_gap_min", rep.sdm_gap_min},
                       {"snm_categories", "salient"},
                       {"snm_aggregation", "micro"}};
    ojson flags = ojson::object();
    std::ostringstream csv;
    csv << "image_id,near_miss_count,detail_miss\n";
    for (const auto& [id, f] : rep.per_pair_flags) {
        flags[id] = {{"near_miss_count", f.near_miss_count}, {"detail_miss", f.detail_miss}};
        csv << id << ',' << f.near_miss_count << ',' << (f.detail_miss ? 1 : 0) << '\n';
    }
    for (const auto& t : csv_trailer(prov)) csv << "# " << t << '\n';
    j["per_pair_flags"] = flags;
    j["provenance"] = prov;

    CommandOutput out;
    out.files["failure_report.json"] = j.dump(2) + "\n";
    out.files["failure_flags.csv"] = csv.str();
    out.summary = "semantic near-miss rate: " + format_csv_number(rep.snm_rate) + " (" +
                  std::to_string(rep.snm_near_misses) + "/" + std::to_string(rep.snm_qualifying) +
                  " salient GT categories)\nsemantic detail-miss rate: " + format_csv_number(rep.sdm_rate) + " (" +
                  std::to_string(rep.sdm_pairs) + "/" + std::to_string(rows.size()) + " pairs)\n";
    return out;
}

// ------------------------------------------------------------------ render

CommandOutput cmd_render(const RunConfig& cfg) {
    cfg.validate();
    Digests digests;
    auto table = parse_labeled_csv(digests.read(*cfg.input), {"n_items", "orientation"});
    table.title = cfg.title;
    auto prov = provenance(cfg, digests);
    CommandOutput out;
    std::string stem = fs::path(*cfg.input).stem().string();
    out.files[stem + ".svg"] = with_svg_metadata(render_svg(table, chart_kind_from_string(cfg.chart)), prov);
    out.summary = "rendered " + stem + ".svg\n";
    return out;
}

// ---------------------------------------------------------------- validate

CommandOutput cmd_validate(const RunConfig& cfg) {
    cfg.validate();
    Digests digests;
    std::optional<CategoryVocabulary> vh;
    const auto& vocab = vocabulary(cfg, digests, vh);
    std::string s;
    if (cfg.detections) s += "detections: " + std::to_string(load_detections(*cfg.detections, vocab, load_options(cfg)).size()) + " records OK\n";
    if (cfg.embeddings) s += "embeddings: " + std::to_string(load_embeddings(*cfg.embeddings).size()) + " records OK\n";
    if (cfg.captions) s += "captions: " + std::to_string(load_captions(*cfg.captions).size()) + " records OK\n";
    if (cfg.ratings) {
        auto r = load_ratings(*cfg.ratings);
        s += "ratings: " + std::to_string(r.n_evaluators()) + " evaluators x " + std::to_string(r.n_items()) +
             " items, " + std::to_string(r.missing_count()) + " missing OK\n";
    }
    if (cfg.manifest) {
        auto m = load_manifest(*cfg.manifest);
        assemble_pairs({}, {}, {}, m);
        s += "manifest: " + std::to_string(m.size()) + " image pairs OK\n";
    }
    if (cfg.scores) s += "scores: " + std::to_string(load_scores(*cfg.scores).size()) + " rows OK\n";
    if (s.empty()) throw ValidationError("validate: no input files given");
    CommandOutput out;
    out.summary = s;
    return out;
}

CommandOutput run_command(const RunConfig& cfg) {
    if (cfg.subcommand == "score") return cmd_score(cfg);
    if (cfg.subcommand == "meta-eval") return cmd_meta_eval(cfg);
    if (cfg.subcommand == "failure-modes") return cmd_failure_modes(cfg);
    if (cfg.subcommand == "render") return cmd_render(cfg);
    if (cfg.subcommand == "validate") return cmd_validate(cfg);
    throw ValidationError("unknown subcommand '" + cfg.subcommand + "'");
}

void write_outputs(const std::string& dir, const CommandOutput& out) {
    if (out.files.empty()) return;
    std::vector<fs::path> written;
    try {
        fs::create_directories(dir);
        for (const auto& [name, content] : out.files) {
            fs::path target = fs::path(dir) / name;
            fs::path tmp = target;
            tmp += ".tmp";
            {
                std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
                if (!f) throw Error("cannot write '" + tmp.string() + "'");
                written.push_back(tmp);
                f << content;
                f.close();
                if (!f) throw Error("write failed for '" + tmp.string() + "'");
            }
            fs::rename(tmp, target);
            written.back() = target;
        }
    } catch (...) {
        std::error_code ec;
        for (const auto& p : written) fs::remove(p, ec);
        throw;
    }
}

}  // namespace seedkit
