#include "seedkit/metric_vector.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "seedkit/io.hpp"
#include "seedkit/types.hpp"

namespace seedkit {

const std::vector<std::string>& known_metrics() {
    static const std::vector<std::string> names = {
        metric::kPixCorr,    metric::kSsim,      metric::kAlex2,        metric::kAlex5,
        metric::kInception,  metric::kClip,      metric::kEffNetDist,   metric::kSwavDist,
        metric::kEffNetBar,  metric::kSwavBar,   metric::kObjectRecall, metric::kObjectPrecision,
        metric::kObjectF1,   metric::kCapSim,    metric::kSeed};
    return names;
}

bool is_known_metric(const std::string& name) {
    const auto& k = known_metrics();
    return std::find(k.begin(), k.end(), name) != k.end();
}

Orientation metric_orientation(const std::string& name) {
    if (name == metric::kEffNetDist || name == metric::kSwavDist) return Orientation::LOWER_BETTER;
    return Orientation::HIGHER_BETTER;
}

std::string format_csv_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    std::string s(buf);
    return s == "-0" ? "0" : s;
}

ScoreSummary summarize(const std::vector<MetricVector>& rows, const std::vector<std::string>& columns) {
    ScoreSummary s;
    for (const auto& c : columns) {
        double all = 0, kept = 0;
        std::size_t n_all = 0, n_kept = 0;
        for (const auto& r : rows) {
            auto it = r.scores.find(c);
            if (it == r.scores.end()) continue;
            all += it->second;
            ++n_all;
            if (!r.degenerate.count(c)) {
                kept += it->second;
                ++n_kept;
            }
        }
        if (n_all) s.mean[c] = all / static_cast<double>(n_all);
        if (n_kept) s.mean_non_degenerate[c] = kept / static_cast<double>(n_kept);
        s.count_non_degenerate[c] = n_kept;
    }
    return s;
}

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

std::string join_degenerate(const std::set<std::string>& d) {
    std::string out;
    for (const auto& m : d) out += (out.empty() ? "" : ";") + m;
    return out;
}

}  // namespace

std::string scores_to_csv(const std::vector<MetricVector>& rows, const std::vector<std::string>& columns,
                          const std::vector<std::string>& trailer) {
    std::ostringstream out;
    out << "image_id";
    for (const auto& c : columns) out << ',' << c;
    out << ",degenerate\n";
    for (const auto& r : rows) {
        out << csv_escape(r.image_id);
        for (const auto& c : columns) {
            out << ',';
            if (auto it = r.scores.find(c); it != r.scores.end()) out << format_csv_number(it->second);
        }
        out << ',' << join_degenerate(r.degenerate) << '\n';
    }
    auto summary = summarize(rows, columns);
    auto summary_row = [&](const char* label, const std::map<std::string, double>& values) {
        out << label;
        for (const auto& c : columns) {
            out << ',';
            if (auto it = values.find(c); it != values.end()) out << format_csv_number(it->second);
        }
        out << ",\n";
    };
    summary_row("#mean", summary.mean);
    summary_row("#mean_non_degenerate", summary.mean_non_degenerate);
    for (const auto& t : trailer) out << "# " << t << '\n';
    return out.str();
}

std::string scores_to_jsonl(const std::vector<MetricVector>& rows) {
    std::ostringstream out;
    for (const auto& r : rows) {
        nlohmann::ordered_json j;
        j["image_id"] = r.image_id;
        nlohmann::ordered_json scores = nlohmann::ordered_json::object();
        for (const auto& c : score_columns({r}))
            scores[c] = r.scores.at(c);
        j["scores"] = scores;
        nlohmann::ordered_json orient = nlohmann::ordered_json::object();
        for (const auto& [c, _] : r.scores)
            orient[c] = metric_orientation(c) == Orientation::HIGHER_BETTER ? "higher_better" : "lower_better";
        j["orientation"] = orient;
        j["degenerate"] = std::vector<std::string>(r.degenerate.begin(), r.degenerate.end());
        out << j.dump() << '\n';
    }
    return out.str();
}

namespace {

double parse_number(const std::string& s, std::size_t line_no) {
    if (s == "nan") return std::nan("");
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    std::size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw ParseError("not a number: '" + s + "'", line_no);
    }
    if (pos != s.size()) throw ParseError("not a number: '" + s + "'", line_no);
    return v;
}

std::vector<MetricVector> parse_scores_jsonl(const std::string& text) {
    std::vector<MetricVector> out;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
            MetricVector r;
            r.image_id = j.at("image_id").get<std::string>();
            for (auto& [k, v] : j.at("scores").items()) r.scores[k] = v.is_null() ? std::nan("") : v.get<double>();
            if (j.contains("degenerate"))
                for (const auto& d : j["degenerate"]) r.degenerate.insert(d.get<std::string>());
            out.push_back(std::move(r));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("scores JSONL: ") + e.what(), line_no);
        }
    }
    return out;
}

}  // namespace

std::vector<MetricVector> parse_scores(const std::string& text) {
    auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') return parse_scores_jsonl(text);

    std::vector<MetricVector> out;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    int id_col = -1, deg_col = -1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto f = split_csv_line(line);
        if (header.empty()) {
            header = f;
            for (std::size_t i = 0; i < header.size(); ++i) {
                if (header[i] == "image_id") id_col = static_cast<int>(i);
                if (header[i] == "degenerate") deg_col = static_cast<int>(i);
            }
            if (id_col < 0) throw ParseError("scores CSV header lacks image_id", line_no);
            continue;
        }
        if (f.size() != header.size()) throw ParseError("scores CSV: wrong number of columns", line_no);
        MetricVector r;
        r.image_id = f[id_col];
        for (std::size_t i = 0; i < f.size(); ++i) {
            if (static_cast<int>(i) == id_col) continue;
            if (static_cast<int>(i) == deg_col) {
                std::istringstream ds(f[i]);
                std::string m;
                while (std::getline(ds, m, ';'))
                    if (!m.empty()) r.degenerate.insert(m);
                continue;
            }
            if (f[i].empty()) continue;
            r.scores[header[i]] = parse_number(f[i], line_no);
        }
        out.push_back(std::move(r));
    }
    if (header.empty()) throw ParseError("scores file is empty");
    return out;
}

std::vector<MetricVector> load_scores(const std::string& path) { return parse_scores(read_text_file(path)); }

std::vector<std::string> score_columns(const std::vector<MetricVector>& rows) {
    std::set<std::string> present;
    for (const auto& r : rows)
        for (const auto& [k, _] : r.scores) present.insert(k);
    std::vector<std::string> cols;
    for (const auto& m : known_metrics())
        if (present.count(m)) cols.push_back(m);
    for (const auto& m : present)
        if (!is_known_metric(m)) cols.push_back(m);
    return cols;
}

}  // namespace seedkit
