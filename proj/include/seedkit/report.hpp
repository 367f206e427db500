#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace seedkit {

const char* version();

/// Every setting of one CLI invocation. Serialized into each report so a run
/// can be reproduced; `threads` is an execution detail and is left out.
struct RunConfig {
    std::string subcommand;

    std::optional<std::string> detections, embeddings, captions, manifest, ratings, scores, vocab;
    std::optional<std::string> input;        // render: table CSV
    std::optional<std::string> caption_tag;  // caption embedding model_tag

    std::vector<std::string> metrics;  // empty: subcommand default
    double grid_step = 0.01;
    std::string weighting = "none";
    double snm_threshold = 0.3;
    double sdm_f1_min = 0.7;
    double sdm_gap_min = 0.2;

    int bootstrap_iters = 1000;
    std::uint64_t seed = 0;
    double bootstrap_level = 0.95;
    std::vector<std::string> deltas;  // "metric_a:metric_b"

    std::string rating_kind = "semantic";
    bool human_raw = false;
    std::string grid_stat = "tau_b";
    bool grid_znorm = false;
    int worst_k = 10;

    std::string chart = "heatmap";
    std::string title;

    std::string out = "out";
    bool strict = true;
    unsigned threads = 1;

    /// Throws ValidationError on any out-of-range setting or missing input.
    void validate() const;
    std::string to_json() const;
    /// Applies keys of a JSON config object (flag names, e.g. "grid-step").
    void merge_json(const std::string& text, const std::vector<std::string>& explicitly_set);
};

/// Files produced by one command, by file name, plus a console summary.
struct CommandOutput {
    std::map<std::string, std::string> files;
    std::string summary;
};

CommandOutput cmd_score(const RunConfig& cfg);
CommandOutput cmd_meta_eval(const RunConfig& cfg);
CommandOutput cmd_failure_modes(const RunConfig& cfg);
CommandOutput cmd_render(const RunConfig& cfg);
CommandOutput cmd_validate(const RunConfig& cfg);
CommandOutput run_command(const RunConfig& cfg);

/// Writes every file into `dir` (created if needed). On any failure, files
/// already written by this call are removed and the error is rethrown.
void write_outputs(const std::string& dir, const CommandOutput& out);

std::string sha256_hex(const std::string& bytes);

}  // namespace seedkit
