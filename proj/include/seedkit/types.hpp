#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace seedkit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input: bad JSON, bad CSV, undecodable image. Carries the 1-based
/// line number when the input is line oriented (0 otherwise).
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Well-formed input that breaks a domain invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A statistic or metric that is mathematically undefined for its input
/// (zero variance, all ties, empty comparison pool).
class UndefinedError : public Error {
public:
    using Error::Error;
};

enum class Role { GT, RECON };

const char* to_string(Role r);
Role role_from_string(const std::string& s);

/// Normalized bounding box, all components in [0,1].
struct BBox {
    double x = 0, y = 0, w = 0, h = 0;

    double area() const { return w * h; }
    double center_x() const { return x + w / 2; }
    double center_y() const { return y + h / 2; }
    bool operator==(const BBox&) const = default;
};

struct Detection {
    std::string category;
    double confidence = 0;
    std::optional<BBox> bbox;

    bool operator==(const Detection&) const = default;
};

/// Detections for one image. After canonicalize() there is at most one entry
/// per category (the highest-confidence instance), sorted by category name.
/// Confidences of every raw instance are kept per category for count-based
/// weighting.
struct DetectionSet {
    std::string image_id;
    Role role = Role::GT;
    std::vector<Detection> detections;
    std::map<std::string, std::vector<double>> instances;  // category -> confidences, descending

    void canonicalize();
    const Detection* find(const std::string& category) const;
    double max_confidence() const;
    /// Number of raw instances of `category` with confidence >= t.
    std::size_t instance_count(const std::string& category, double t) const;
};

enum class EmbeddingKind { CAPTION_TEXT, IMAGE_FEATURE };

const char* to_string(EmbeddingKind k);
EmbeddingKind embedding_kind_from_string(const std::string& s);

struct EmbeddingRecord {
    std::string image_id;
    Role role = Role::GT;
    EmbeddingKind kind = EmbeddingKind::IMAGE_FEATURE;
    std::string model_tag;
    std::vector<double> vector;
};

struct CaptionRecord {
    std::string image_id;
    Role role = Role::GT;
    std::string caption;
};

/// Interleaved 8-bit RGB, row major.
struct ImagePixels {
    std::string image_id;
    Role role = Role::GT;
    int width = 0;
    int height = 0;
    static constexpr int channels = 3;
    std::vector<std::uint8_t> data;

    std::uint8_t at(int x, int y, int c) const {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
};

/// One GT/reconstruction pair. Every slot is optional; which ones are
/// required depends on the enabled metrics.
struct PairRecord {
    std::string image_id;
    std::optional<DetectionSet> gt_detections, recon_detections;
    // model_tag -> vector, caption embeddings live under kind CAPTION_TEXT
    std::map<std::string, std::vector<double>> gt_features, recon_features;
    std::optional<std::vector<double>> gt_caption_embedding, recon_caption_embedding;
    std::optional<std::string> gt_caption, recon_caption;
    std::optional<ImagePixels> gt_pixels, recon_pixels;
};

enum class RatingKind { SEMANTIC, PERCEPTUAL };

using RatingGrid = std::vector<std::vector<std::optional<int>>>;  // [evaluator][item]

/// Evaluators x items Likert ratings. Missing cells are std::nullopt.
struct RatingsMatrix {
    std::vector<std::string> evaluator_ids;
    std::vector<std::string> image_ids;
    RatingGrid semantic;
    std::optional<RatingGrid> perceptual;

    std::size_t n_evaluators() const { return evaluator_ids.size(); }
    std::size_t n_items() const { return image_ids.size(); }
    /// Throws ValidationError when PERCEPTUAL is requested but absent.
    const RatingGrid& grid(RatingKind kind) const;
    bool complete(RatingKind kind = RatingKind::SEMANTIC) const;
    std::size_t missing_count(RatingKind kind = RatingKind::SEMANTIC) const;
};

}  // namespace seedkit
