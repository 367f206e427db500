#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

namespace seedkit {

enum class Orientation { HIGHER_BETTER, LOWER_BETTER };

namespace metric {
inline constexpr const char* kPixCorr = "pixcorr";
inline constexpr const char* kSsim = "ssim";
inline constexpr const char* kAlex2 = "alexnet2_2way";
inline constexpr const char* kAlex5 = "alexnet5_2way";
inline constexpr const char* kInception = "inception_2way";
inline constexpr const char* kClip = "clip_2way";
inline constexpr const char* kEffNetDist = "effnet_dist";
inline constexpr const char* kSwavDist = "swav_dist";
inline constexpr const char* kEffNetBar = "effnet_bar";
inline constexpr const char* kSwavBar = "swav_bar";
inline constexpr const char* kObjectRecall = "object_recall";
inline constexpr const char* kObjectPrecision = "object_precision";
inline constexpr const char* kObjectF1 = "object_f1";
inline constexpr const char* kCapSim = "cap_sim";
inline constexpr const char* kSeed = "seed";
}  // namespace metric

/// Every metric the scorer knows, in report column order.
const std::vector<std::string>& known_metrics();
bool is_known_metric(const std::string& name);
/// Lower-is-better for the correlation-distance metrics; everything else
/// (including unknown externally produced columns) is higher-is-better.
Orientation metric_orientation(const std::string& name);

/// Scores of one GT/reconstruction pair. `degenerate` names the object
/// metrics whose side had no detections (reported as 0, excluded from the
/// non-degenerate means).
struct MetricVector {
    std::string image_id;
    std::map<std::string, double> scores;
    std::set<std::string> degenerate;

    bool has(const std::string& m) const { return scores.count(m) != 0; }
};

/// 6 significant digits, '.' decimal, "nan"/"inf"/"-inf" for non-finite values.
std::string format_csv_number(double v);

struct ScoreSummary {
    std::map<std::string, double> mean;                   // every row, degenerate as 0
    std::map<std::string, double> mean_non_degenerate;   // degenerate rows excluded
    std::map<std::string, std::size_t> count_non_degenerate;
};

ScoreSummary summarize(const std::vector<MetricVector>& rows, const std::vector<std::string>& columns);

/// CSV: header image_id,<columns>,degenerate; one row per pair; then the
/// summary block as '#mean' and '#mean_non_degenerate' rows, then any trailer
/// lines prefixed with '# '.
std::string scores_to_csv(const std::vector<MetricVector>& rows, const std::vector<std::string>& columns,
                          const std::vector<std::string>& trailer = {});
/// One JSON object per row with full double precision.
std::string scores_to_jsonl(const std::vector<MetricVector>& rows);

/// Reads the CSV or JSONL forms above (JSONL when the first non-blank
/// character is '{'). Lines starting with '#' are skipped; empty cells are
/// treated as absent.
std::vector<MetricVector> parse_scores(const std::string& text);
std::vector<MetricVector> load_scores(const std::string& path);

/// Column order for a set of rows: known metrics first in report order, then
/// unknown columns alphabetically.
std::vector<std::string> score_columns(const std::vector<MetricVector>& rows);

}  // namespace seedkit
