#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "seedkit/io.hpp"
#include "seedkit/metric_vector.hpp"
#include "seedkit/object_metrics.hpp"
#include "seedkit/types.hpp"

namespace seedkit {

/// Joins per-role records into pairs keyed by image_id (sorted by id).
/// Caption embeddings are taken from model_tag `caption_tag` when given,
/// otherwise from the only caption model present.
std::vector<PairRecord> assemble_pairs(const std::vector<DetectionSet>& detections,
                                       const std::vector<EmbeddingRecord>& embeddings,
                                       const std::vector<CaptionRecord>& captions,
                                       const std::map<std::string, ManifestEntry>& manifest = {},
                                       const std::optional<std::string>& caption_tag = std::nullopt);

struct ScoreOptions {
    std::vector<std::string> metrics = {metric::kObjectF1, metric::kCapSim, metric::kEffNetBar,
                                        metric::kSeed};
    ThresholdGrid grid;
    WeightingMode weighting = WeightingMode::NONE;
    unsigned threads = 1;
};

/// The requested metrics plus everything they depend on (seed pulls in its
/// three components, object_f1 pulls in recall and precision), in report order.
std::vector<std::string> expand_metrics(const std::vector<std::string>& requested);

/// Throws ValidationError naming, per metric, the image_ids lacking an input
/// that metric needs. Runs before any scoring.
void check_inputs(const std::vector<PairRecord>& pairs, const std::vector<std::string>& metrics);

/// Scores every pair. Output order follows `pairs`; result is independent of
/// the thread count.
std::vector<MetricVector> score_pairs(const std::vector<PairRecord>& pairs, const ScoreOptions& opts);

}  // namespace seedkit
