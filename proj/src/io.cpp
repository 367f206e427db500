#include "seedkit/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace seedkit {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kBBoxEps = 1e-6;

json parse_json_line(const std::string& line, std::size_t line_no) {
    try {
        json j = json::parse(line);
        if (!j.is_object()) throw ParseError("record is not a JSON object", line_no);
        return j;
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what(), line_no);
    }
}

template <class T>
T field(const json& j, const char* name, std::size_t line_no) {
    auto it = j.find(name);
    if (it == j.end()) throw ParseError(std::string("missing field '") + name + "'", line_no);
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw ParseError(std::string("field '") + name + "' has the wrong type", line_no);
    }
}

std::string validation_msg(const std::string& field, std::size_t line_no, const std::string& what) {
    return "field '" + field + "' on line " + std::to_string(line_no) + ": " + what;
}

template <class F>
auto with_validation_line(std::size_t line_no, F&& f) {
    try {
        return f();
    } catch (const ValidationError& e) {
        throw ValidationError(std::string(e.what()) + " (line " + std::to_string(line_no) + ")");
    }
}

void warn(const LoadOptions& opts, const std::string& msg) {
    if (opts.warn)
        opts.warn(msg);
    else
        std::cerr << "warning: " << msg << "\n";
}

template <class F>
void for_each_line(const std::string& path, F&& f) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        f(line, line_no);
    }
}

std::string format_key(const std::string& image_id, Role role) {
    return image_id + "/" + to_string(role);
}

}  // namespace

DetectionSet parse_detection_record(const std::string& line, std::size_t line_no,
                                    const CategoryVocabulary& vocab, const LoadOptions& opts) {
    json j = parse_json_line(line, line_no);
    DetectionSet s;
    s.image_id = field<std::string>(j, "image_id", line_no);
    if (s.image_id.empty()) throw ValidationError(validation_msg("image_id", line_no, "empty"));
    s.role = with_validation_line(line_no, [&] { return role_from_string(field<std::string>(j, "role", line_no)); });
    auto dets = j.find("detections");
    if (dets == j.end() || !dets->is_array())
        throw ParseError("missing or non-array field 'detections'", line_no);
    for (const auto& dj : *dets) {
        if (!dj.is_object()) throw ParseError("detection entry is not an object", line_no);
        Detection d;
        d.category = field<std::string>(dj, "category", line_no);
        d.confidence = field<double>(dj, "confidence", line_no);
        if (d.category.empty()) throw ValidationError(validation_msg("category", line_no, "empty"));
        if (!(d.confidence >= 0.0 && d.confidence <= 1.0))
            throw ValidationError(validation_msg("confidence", line_no,
                                                 "value " + dj.at("confidence").dump() +
                                                     " outside [0,1]"));
        if (auto b = dj.find("bbox"); b != dj.end() && !b->is_null()) {
            auto v = field<std::vector<double>>(dj, "bbox", line_no);
            if (v.size() != 4) throw ParseError("bbox must have 4 entries [x, y, w, h]", line_no);
            BBox box{v[0], v[1], v[2], v[3]};
            for (double c : v)
                if (!(c >= 0.0 && c <= 1.0))
                    throw ValidationError(validation_msg("bbox", line_no, "component outside [0,1]"));
            if (box.x + box.w > 1.0 + kBBoxEps || box.y + box.h > 1.0 + kBBoxEps)
                throw ValidationError(validation_msg("bbox", line_no, "extends past the image"));
            d.bbox = box;
        }
        if (!vocab.contains(d.category)) {
            if (opts.strict)
                throw ValidationError(validation_msg("category", line_no,
                                                     "unknown category '" + d.category + "'"));
            warn(opts, "line " + std::to_string(line_no) + ": dropping unknown category '" +
                           d.category + "'");
            continue;
        }
        s.detections.push_back(std::move(d));
    }
    s.canonicalize();
    return s;
}

EmbeddingRecord parse_embedding_record(const std::string& line, std::size_t line_no) {
    json j = parse_json_line(line, line_no);
    EmbeddingRecord r;
    r.image_id = field<std::string>(j, "image_id", line_no);
    if (r.image_id.empty()) throw ValidationError(validation_msg("image_id", line_no, "empty"));
    r.role = with_validation_line(line_no, [&] { return role_from_string(field<std::string>(j, "role", line_no)); });
    r.kind = with_validation_line(
        line_no, [&] { return embedding_kind_from_string(field<std::string>(j, "kind", line_no)); });
    r.model_tag = field<std::string>(j, "model_tag", line_no);
    if (r.model_tag.empty()) throw ValidationError(validation_msg("model_tag", line_no, "empty"));
    r.vector = field<std::vector<double>>(j, "vector", line_no);
    if (r.vector.size() < 2)
        throw ValidationError(validation_msg("vector", line_no, "length must be >= 2"));
    for (double v : r.vector)
        if (!std::isfinite(v)) throw ValidationError(validation_msg("vector", line_no, "non-finite entry"));
    return r;
}

CaptionRecord parse_caption_record(const std::string& line, std::size_t line_no) {
    json j = parse_json_line(line, line_no);
    CaptionRecord r;
    r.image_id = field<std::string>(j, "image_id", line_no);
    if (r.image_id.empty()) throw ValidationError(validation_msg("image_id", line_no, "empty"));
    r.role = with_validation_line(line_no, [&] { return role_from_string(field<std::string>(j, "role", line_no)); });
    r.caption = field<std::string>(j, "caption", line_no);
    if (r.caption.empty()) throw ValidationError(validation_msg("caption", line_no, "empty"));
    return r;
}

std::string serialize(const DetectionSet& s) {
    DetectionSet c = s;
    c.canonicalize();
    nlohmann::ordered_json j;
    j["image_id"] = c.image_id;
    j["role"] = to_string(c.role);
    j["detections"] = nlohmann::ordered_json::array();
    for (const auto& d : c.detections) {
        nlohmann::ordered_json dj;
        dj["category"] = d.category;
        dj["confidence"] = d.confidence;
        if (d.bbox) dj["bbox"] = {d.bbox->x, d.bbox->y, d.bbox->w, d.bbox->h};
        j["detections"].push_back(std::move(dj));
    }
    return j.dump();
}

std::string serialize(const EmbeddingRecord& r) {
    nlohmann::ordered_json j;
    j["image_id"] = r.image_id;
    j["role"] = to_string(r.role);
    j["kind"] = to_string(r.kind);
    j["model_tag"] = r.model_tag;
    j["vector"] = r.vector;
    return j.dump();
}

std::string serialize(const CaptionRecord& r) {
    nlohmann::ordered_json j;
    j["image_id"] = r.image_id;
    j["role"] = to_string(r.role);
    j["caption"] = r.caption;
    return j.dump();
}

std::vector<DetectionSet> load_detections(const std::string& path, const CategoryVocabulary& vocab,
                                          const LoadOptions& opts) {
    std::vector<DetectionSet> out;
    std::set<std::string> keys;
    for_each_line(path, [&](const std::string& line, std::size_t n) {
        auto s = parse_detection_record(line, n, vocab, opts);
        if (!keys.insert(format_key(s.image_id, s.role)).second)
            throw ValidationError("duplicate detection record for " + format_key(s.image_id, s.role) +
                                  " (line " + std::to_string(n) + ")");
        out.push_back(std::move(s));
    });
    return out;
}

std::vector<EmbeddingRecord> load_embeddings(const std::string& path) {
    std::vector<EmbeddingRecord> out;
    std::map<std::string, std::size_t> dims;
    std::set<std::string> keys;
    for_each_line(path, [&](const std::string& line, std::size_t n) {
        auto r = parse_embedding_record(line, n);
        std::string family = std::string(to_string(r.kind)) + ":" + r.model_tag;
        auto [it, inserted] = dims.emplace(family, r.vector.size());
        if (!inserted && it->second != r.vector.size())
            throw ValidationError("embedding length " + std::to_string(r.vector.size()) + " for " +
                                  family + " differs from earlier length " +
                                  std::to_string(it->second) + " (line " + std::to_string(n) + ")");
        if (!keys.insert(family + "/" + format_key(r.image_id, r.role)).second)
            throw ValidationError("duplicate embedding record for " + family + " " +
                                  format_key(r.image_id, r.role) + " (line " + std::to_string(n) + ")");
        out.push_back(std::move(r));
    });
    return out;
}

std::vector<CaptionRecord> load_captions(const std::string& path) {
    std::vector<CaptionRecord> out;
    std::set<std::string> keys;
    for_each_line(path, [&](const std::string& line, std::size_t n) {
        auto r = parse_caption_record(line, n);
        if (!keys.insert(format_key(r.image_id, r.role)).second)
            throw ValidationError("duplicate caption record for " + format_key(r.image_id, r.role) +
                                  " (line " + std::to_string(n) + ")");
        out.push_back(std::move(r));
    });
    return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (quoted) throw ParseError("unterminated quoted CSV field");
    fields.push_back(std::move(cur));
    return fields;
}

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

std::optional<int> parse_likert(const std::string& raw, const char* column, std::size_t line_no) {
    std::string v = trim(raw);
    if (v.empty() || v == "NA" || v == "na" || v == "NaN") return std::nullopt;
    std::size_t pos = 0;
    int x = 0;
    try {
        x = std::stoi(v, &pos);
    } catch (const std::exception&) {
        throw ParseError(std::string("column '") + column + "': not an integer: '" + v + "'", line_no);
    }
    if (pos != v.size())
        throw ParseError(std::string("column '") + column + "': not an integer: '" + v + "'", line_no);
    if (x < 1 || x > 5)
        throw ValidationError(std::string("column '") + column + "' on line " +
                              std::to_string(line_no) + ": rating " + v + " outside 1-5");
    return x;
}

}  // namespace

RatingsMatrix parse_ratings(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    int c_eval = -1, c_img = -1, c_sem = -1, c_per = -1;
    bool header_seen = false;

    struct Row {
        std::string evaluator, image;
        std::optional<int> semantic, perceptual;
    };
    std::vector<Row> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
        std::vector<std::string> f;
        try {
            f = split_csv_line(line);
        } catch (const ParseError& e) {
            throw ParseError(e.what(), line_no);
        }
        if (!header_seen) {
            for (std::size_t i = 0; i < f.size(); ++i) {
                auto h = trim(f[i]);
                int idx = static_cast<int>(i);
                if (h == "evaluator_id") c_eval = idx;
                else if (h == "image_id") c_img = idx;
                else if (h == "semantic") c_sem = idx;
                else if (h == "perceptual") c_per = idx;
            }
            if (c_eval < 0 || c_img < 0 || c_sem < 0)
                throw ParseError("ratings header must contain evaluator_id, image_id, semantic", line_no);
            header_seen = true;
            continue;
        }
        int needed = std::max({c_eval, c_img, c_sem, c_per});
        if (static_cast<int>(f.size()) <= needed)
            throw ParseError("too few columns", line_no);
        Row r{trim(f[c_eval]), trim(f[c_img]), parse_likert(f[c_sem], "semantic", line_no),
              c_per >= 0 ? parse_likert(f[c_per], "perceptual", line_no) : std::nullopt};
        if (r.evaluator.empty() || r.image.empty()) throw ParseError("empty evaluator_id or image_id", line_no);
        rows.push_back(std::move(r));
    }
    if (!header_seen) throw ParseError("ratings file is empty");

    RatingsMatrix m;
    std::map<std::string, std::size_t> eidx, iidx;
    for (const auto& r : rows) {
        if (eidx.emplace(r.evaluator, m.evaluator_ids.size()).second) m.evaluator_ids.push_back(r.evaluator);
        if (iidx.emplace(r.image, m.image_ids.size()).second) m.image_ids.push_back(r.image);
    }
    m.semantic.assign(m.n_evaluators(), std::vector<std::optional<int>>(m.n_items()));
    if (c_per >= 0) m.perceptual = m.semantic;
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& r : rows) {
        auto e = eidx[r.evaluator], i = iidx[r.image];
        if (!seen.insert({e, i}).second)
            throw ValidationError("duplicate rating for evaluator '" + r.evaluator + "' image '" +
                                  r.image + "'");
        m.semantic[e][i] = r.semantic;
        if (m.perceptual) (*m.perceptual)[e][i] = r.perceptual;
    }
    return m;
}

RatingsMatrix load_ratings(const std::string& path) { return parse_ratings(read_text_file(path)); }

std::map<std::string, ManifestEntry> load_manifest(const std::string& path) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("manifest: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("manifest must be a JSON object keyed by image_id");
    fs::path base = fs::path(path).parent_path();
    auto resolve = [&](const std::string& p) {
        fs::path q(p);
        return (q.is_relative() && !base.empty() ? base / q : q).string();
    };
    std::map<std::string, ManifestEntry> out;
    for (auto& [id, v] : j.items()) {
        if (!v.is_object() || !v.contains("gt_image") || !v.contains("recon_image") ||
            !v["gt_image"].is_string() || !v["recon_image"].is_string())
            throw ParseError("manifest entry '" + id + "' needs string fields gt_image and recon_image");
        out[id] = {resolve(v["gt_image"].get<std::string>()), resolve(v["recon_image"].get<std::string>())};
    }
    return out;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace seedkit
