#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "seedkit/io.hpp"
#include "seedkit/report.hpp"
#include "seedkit/types.hpp"

namespace {

struct Flags {
    std::string detections, embeddings, captions, manifest, ratings, scores, vocab, input, caption_tag;
    std::string metrics, config;
    seedkit::RunConfig cfg;
};

void add_common(CLI::App* sub, Flags& f) {
    sub->add_option("--detections", f.detections, "detections.jsonl");
    sub->add_option("--embeddings", f.embeddings, "embeddings.jsonl");
    sub->add_option("--captions", f.captions, "captions.jsonl");
    sub->add_option("--manifest", f.manifest, "manifest.json mapping image_id to GT/recon PNGs");
    sub->add_option("--ratings", f.ratings, "ratings.csv (evaluator_id,image_id,semantic[,perceptual])");
    sub->add_option("--scores", f.scores, "precomputed scores CSV or JSONL");
    sub->add_option("--vocab", f.vocab, "category vocabulary JSON (default: built-in 82 categories)");
    sub->add_option("--caption-tag", f.caption_tag, "model_tag of the caption embeddings to use");
    sub->add_option("--metrics", f.metrics, "comma-separated metric names, or 'all'");
    sub->add_option("--grid-step", f.cfg.grid_step, "Object F1 threshold grid step");
    sub->add_option("--weighting", f.cfg.weighting, "Object F1 weighting: none|size|location|number");
    sub->add_option("--snm-threshold", f.cfg.snm_threshold, "semantic near-miss confidence threshold");
    sub->add_option("--sdm-f1-min", f.cfg.sdm_f1_min, "detail-miss Object F1 cutoff");
    sub->add_option("--sdm-gap-min", f.cfg.sdm_gap_min, "detail-miss Object F1 - SEED cutoff");
    sub->add_option("--bootstrap-iters", f.cfg.bootstrap_iters, "bootstrap iterations");
    sub->add_option("--bootstrap-level", f.cfg.bootstrap_level, "bootstrap CI level");
    sub->add_option("--seed", f.cfg.seed, "bootstrap RNG seed");
    sub->add_option("--delta", f.cfg.deltas, "metric_a:metric_b pair for a bootstrap delta CI (repeatable)");
    sub->add_option("--rating-kind", f.cfg.rating_kind, "semantic|perceptual");
    sub->add_flag("--human-raw", f.cfg.human_raw, "use raw per-image rating means instead of z-normalized means");
    sub->add_option("--grid-stat", f.cfg.grid_stat, "combination grid statistic: pairwise|tau_b|pearson");
    sub->add_flag("--grid-znorm", f.cfg.grid_znorm, "z-normalize metrics before averaging in the grid");
    sub->add_option("--worst-k", f.cfg.worst_k, "worst-case judgments listed per metric");
    sub->add_option("--input", f.input, "render: CSV table to draw");
    sub->add_option("--chart", f.cfg.chart, "render: bar|heatmap");
    sub->add_option("--title", f.cfg.title, "render: chart title");
    sub->add_option("--out", f.cfg.out, "output directory");
    sub->add_flag("--strict,!--no-strict", f.cfg.strict, "reject unknown categories (default) or drop them");
    sub->add_option("--threads", f.cfg.threads, "worker threads");
    sub->add_option("--config", f.config, "JSON config file; explicit flags take precedence");
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"seedkit: score reconstruction/ground-truth image pairs and meta-evaluate metrics"};
    app.set_version_flag("--version", seedkit::version());
    app.require_subcommand(1);

    Flags flags;
    std::vector<CLI::App*> subs = {
        app.add_subcommand("score", "compute per-pair metrics"),
        app.add_subcommand("meta-eval", "align metrics with human ratings"),
        app.add_subcommand("failure-modes", "semantic near-miss and detail-miss rates"),
        app.add_subcommand("render", "draw a CSV table as an SVG bar chart or heatmap"),
        app.add_subcommand("validate", "check input files against the formats"),
    };
    for (auto* s : subs) add_common(s, flags);

    CLI11_PARSE(app, argc, argv);

    CLI::App* used = nullptr;
    for (auto* s : subs)
        if (s->parsed()) used = s;

    try {
        auto& cfg = flags.cfg;
        cfg.subcommand = used->get_name();
        auto set = [&](const char* name, const std::string& v, std::optional<std::string>& dst) {
            if (used->count(std::string("--") + name)) dst = v;
        };
        set("detections", flags.detections, cfg.detections);
        set("embeddings", flags.embeddings, cfg.embeddings);
        set("captions", flags.captions, cfg.captions);
        set("manifest", flags.manifest, cfg.manifest);
        set("ratings", flags.ratings, cfg.ratings);
        set("scores", flags.scores, cfg.scores);
        set("vocab", flags.vocab, cfg.vocab);
        set("input", flags.input, cfg.input);
        set("caption-tag", flags.caption_tag, cfg.caption_tag);
        if (used->count("--metrics")) cfg.metrics = split_commas(flags.metrics);

        if (used->count("--config")) {
            std::vector<std::string> explicit_keys;
            for (const auto* opt : used->get_options()) {
                if (opt->count() == 0) continue;
                auto name = opt->get_name(false, true);
                if (name.rfind("--", 0) == 0) name = name.substr(2);
                explicit_keys.push_back(name);
            }
            if (used->count("--no-strict")) explicit_keys.push_back("strict");
            cfg.merge_json(seedkit::read_text_file(flags.config), explicit_keys);
        }

        auto out = seedkit::run_command(cfg);
        seedkit::write_outputs(cfg.out, out);
        std::cout << out.summary;
        for (const auto& [name, _] : out.files) std::cout << "wrote " << cfg.out << "/" << name << "\n";
        return 0;
    } catch (const seedkit::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
