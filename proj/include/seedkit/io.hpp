#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "seedkit/types.hpp"
#include "seedkit/vocabulary.hpp"

namespace seedkit {

using WarningSink = std::function<void(const std::string&)>;

struct LoadOptions {
    /// Unknown categories: hard failure when true, dropped with a warning otherwise.
    bool strict = true;
    WarningSink warn;  // defaults to stderr when empty
};

// Line-delimited JSON record parsing. `line_no` is 1-based and only used in
// error messages.
DetectionSet parse_detection_record(const std::string& line, std::size_t line_no,
                                    const CategoryVocabulary& vocab, const LoadOptions& opts = {});
EmbeddingRecord parse_embedding_record(const std::string& line, std::size_t line_no);
CaptionRecord parse_caption_record(const std::string& line, std::size_t line_no);

/// Canonical single-line JSON form (no trailing newline).
std::string serialize(const DetectionSet& s);
std::string serialize(const EmbeddingRecord& r);
std::string serialize(const CaptionRecord& r);

std::vector<DetectionSet> load_detections(const std::string& path, const CategoryVocabulary& vocab,
                                          const LoadOptions& opts = {});
/// Also checks that vector length is constant per (kind, model_tag).
std::vector<EmbeddingRecord> load_embeddings(const std::string& path);
std::vector<CaptionRecord> load_captions(const std::string& path);

/// Parses ratings CSV text with header evaluator_id,image_id,semantic[,perceptual].
/// Evaluators and images are ordered by first appearance.
RatingsMatrix parse_ratings(const std::string& text);
RatingsMatrix load_ratings(const std::string& path);

struct ManifestEntry {
    std::string gt_image;
    std::string recon_image;
};

/// manifest.json: {image_id: {"gt_image": path, "recon_image": path}}. Relative
/// paths are resolved against the manifest's directory.
std::map<std::string, ManifestEntry> load_manifest(const std::string& path);

std::string read_text_file(const std::string& path);

/// Minimal RFC 4180 field splitter for one CSV line.
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace seedkit
