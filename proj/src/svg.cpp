#include "seedkit/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "seedkit/io.hpp"
#include "seedkit/types.hpp"

namespace seedkit {

namespace {

std::string num(double v, int decimals = 2) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    std::string s(buf);
    if (s.find('.') != std::string::npos) {
        while (s.back() == '0') s.pop_back();
        if (s.back() == '.') s.pop_back();
    }
    return s == "-0" ? "0" : s;
}

std::string fixed3(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    std::string s(buf);
    return s == "-0.000" ? "0.000" : s;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Rgb {
    int r, g, b;
};

std::string hex(Rgb c) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c.r, c.g, c.b);
    return buf;
}

// White -> dark blue.
Rgb ramp(double f) {
    f = std::clamp(f, 0.0, 1.0);
    auto lerp = [f](int a, int b) { return static_cast<int>(std::lround(a + (b - a) * f)); };
    return {lerp(247, 8), lerp(251, 48), lerp(255, 107)};
}

const Rgb kPalette[] = {{31, 119, 180}, {255, 127, 14}, {44, 160, 44},  {214, 39, 40},
                        {148, 103, 189}, {140, 86, 75}, {227, 119, 194}, {127, 127, 127}};

void check_shape(const LabeledTable& t) {
    if (t.values.size() != t.row_labels.size()) throw ValidationError("chart: row count mismatch");
    for (const auto& r : t.values)
        if (r.size() != t.col_labels.size()) throw ValidationError("chart: column count mismatch");
}

void header(std::ostringstream& o, int w, int h) {
    o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" viewBox=\"0 0 " << w << ' ' << h << "\" font-family=\"Helvetica, Arial, sans-serif\">\n";
}

}  // namespace

ChartKind chart_kind_from_string(const std::string& s) {
    if (s == "bar") return ChartKind::BAR;
    if (s == "heatmap") return ChartKind::HEATMAP;
    throw ValidationError("unknown chart kind '" + s + "' (bar|heatmap)");
}

std::string render_bar_svg(const LabeledTable& t) {
    check_shape(t);
    const int groups = static_cast<int>(t.row_labels.size());
    const int series = static_cast<int>(t.col_labels.size());
    const int bar_w = 14, gap = 18, left = 60, top = 40, plot_h = 240, bottom = 110;
    const int group_w = std::max(1, series) * bar_w + gap;
    const int width = left + groups * group_w + 160;
    const int height = top + plot_h + bottom;

    double lo = 0, hi = 0;
    for (const auto& r : t.values)
        for (double v : r)
            if (std::isfinite(v)) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
    if (hi == lo) hi = lo + 1;
    auto y_of = [&](double v) { return top + plot_h * (hi - v) / (hi - lo); };

    std::ostringstream o;
    header(o, width, height);
    o << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"#ffffff\"/>\n";
    if (!t.title.empty())
        o << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
          << xml_escape(t.title) << "</text>\n";

    // Axis with 5 ticks.
    for (int i = 0; i <= 4; ++i) {
        double v = lo + (hi - lo) * i / 4.0;
        double y = y_of(v);
        o << "<line x1=\"" << left << "\" y1=\"" << num(y) << "\" x2=\"" << left + groups * group_w
          << "\" y2=\"" << num(y) << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        o << "<text x=\"" << left - 6 << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\" font-size=\"10\">"
          << fixed3(v) << "</text>\n";
    }
    double zero_y = y_of(0);
    o << "<line x1=\"" << left << "\" y1=\"" << num(zero_y) << "\" x2=\"" << left + groups * group_w
      << "\" y2=\"" << num(zero_y) << "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";

    for (int g = 0; g < groups; ++g) {
        int gx = left + g * group_w + gap / 2;
        for (int s = 0; s < series; ++s) {
            double v = t.values[g][s];
            int x = gx + s * bar_w;
            if (!std::isfinite(v)) {
                o << "<text x=\"" << x + bar_w / 2 << "\" y=\"" << num(zero_y - 4)
                  << "\" text-anchor=\"middle\" font-size=\"9\">n/a</text>\n";
                continue;
            }
            double y0 = std::min(y_of(v), zero_y), y1 = std::max(y_of(v), zero_y);
            o << "<rect x=\"" << x << "\" y=\"" << num(y0) << "\" width=\"" << bar_w - 2 << "\" height=\""
              << num(y1 - y0) << "\" fill=\"" << hex(kPalette[s % 8]) << "\"><title>"
              << xml_escape(t.row_labels[g]) << " / " << xml_escape(t.col_labels[s]) << ": " << fixed3(v)
              << "</title></rect>\n";
        }
        double lx = gx + series * bar_w / 2.0;
        double ly = top + plot_h + 12;
        o << "<text x=\"" << num(lx) << "\" y=\"" << num(ly) << "\" text-anchor=\"end\" font-size=\"10\" transform=\"rotate(-45 "
          << num(lx) << ' ' << num(ly) << ")\">" << xml_escape(t.row_labels[g]) << "</text>\n";
    }
    int lx = left + groups * group_w + 20;
    for (int s = 0; s < series; ++s) {
        int ly = top + 10 + s * 18;
        o << "<rect x=\"" << lx << "\" y=\"" << ly - 9 << "\" width=\"12\" height=\"12\" fill=\""
          << hex(kPalette[s % 8]) << "\"/>\n";
        o << "<text x=\"" << lx + 18 << "\" y=\"" << ly + 1 << "\" font-size=\"11\">" << xml_escape(t.col_labels[s])
          << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

std::string render_heatmap_svg(const LabeledTable& t) {
    check_shape(t);
    const int rows = static_cast<int>(t.row_labels.size());
    const int cols = static_cast<int>(t.col_labels.size());
    const int cell = 56, left = 130, top = 130, legend_w = 90;
    const int width = left + cols * cell + legend_w + 20;
    const int height = top + rows * cell + 30;
    const bool square = rows == cols;

    double lo = 0, hi = 0;
    bool any = false;
    for (const auto& r : t.values)
        for (double v : r)
            if (std::isfinite(v)) {
                lo = std::min(lo, v);
                hi = any ? std::max(hi, v) : std::max(0.0, v);
                any = true;
            }
    if (hi <= lo) hi = lo + 1;

    std::ostringstream o;
    header(o, width, height);
    o << "<defs><pattern id=\"hatch\" width=\"6\" height=\"6\" patternUnits=\"userSpaceOnUse\" "
         "patternTransform=\"rotate(45)\"><rect width=\"6\" height=\"6\" fill=\"#ffffff\"/>"
         "<line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"6\" stroke=\"#999999\" stroke-width=\"2\"/></pattern>"
         "<linearGradient id=\"scale\" x1=\"0\" y1=\"1\" x2=\"0\" y2=\"0\">"
      << "<stop offset=\"0\" stop-color=\"" << hex(ramp(0)) << "\"/>"
      << "<stop offset=\"1\" stop-color=\"" << hex(ramp(1)) << "\"/></linearGradient></defs>\n";
    o << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"#ffffff\"/>\n";
    if (!t.title.empty())
        o << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
          << xml_escape(t.title) << "</text>\n";

    for (int c = 0; c < cols; ++c) {
        int x = left + c * cell + cell / 2, y = top - 8;
        o << "<text x=\"" << x << "\" y=\"" << y << "\" font-size=\"11\" transform=\"rotate(-45 " << x << ' ' << y
          << ")\">" << xml_escape(t.col_labels[c]) << "</text>\n";
    }
    for (int r = 0; r < rows; ++r)
        o << "<text x=\"" << left - 8 << "\" y=\"" << top + r * cell + cell / 2 + 4
          << "\" text-anchor=\"end\" font-size=\"11\">" << xml_escape(t.row_labels[r]) << "</text>\n";

    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            double v = t.values[r][c];
            int x = left + c * cell, y = top + r * cell;
            bool diag = square && r == c;
            if (!std::isfinite(v)) {
                o << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\"" << cell
                  << "\" fill=\"url(#hatch)\" stroke=\"#ffffff\" stroke-width=\"1\"/>\n";
                o << "<text x=\"" << x + cell / 2 << "\" y=\"" << y + cell / 2 + 4
                  << "\" text-anchor=\"middle\" font-size=\"11\" fill=\"#000000\">NaN</text>\n";
                continue;
            }
            double f = (v - lo) / (hi - lo);
            o << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\"" << cell
              << "\" fill=\"" << hex(ramp(f)) << "\" stroke=\"" << (diag ? "#000000" : "#ffffff")
              << "\" stroke-width=\"" << (diag ? 3 : 1) << "\"/>\n";
            o << "<text x=\"" << x + cell / 2 << "\" y=\"" << y + cell / 2 + 4
              << "\" text-anchor=\"middle\" font-size=\"11\" fill=\"" << (f > 0.55 ? "#ffffff" : "#000000")
              << "\"" << (diag ? " font-weight=\"bold\"" : "") << ">" << fixed3(v) << "</text>\n";
        }

    int lx = left + cols * cell + 20, ly = top, lh = std::max(rows * cell, 100);
    o << "<rect x=\"" << lx << "\" y=\"" << ly << "\" width=\"16\" height=\"" << lh
      << "\" fill=\"url(#scale)\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
    o << "<text x=\"" << lx + 22 << "\" y=\"" << ly + 10 << "\" font-size=\"10\">" << fixed3(hi) << "</text>\n";
    o << "<text x=\"" << lx + 22 << "\" y=\"" << ly + lh << "\" font-size=\"10\">" << fixed3(lo) << "</text>\n";
    o << "</svg>\n";
    return o.str();
}

std::string render_svg(const LabeledTable& t, ChartKind kind) {
    return kind == ChartKind::BAR ? render_bar_svg(t) : render_heatmap_svg(t);
}

LabeledTable parse_labeled_csv(const std::string& text, const std::vector<std::string>& skip) {
    LabeledTable t;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    std::vector<int> keep;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto f = split_csv_line(line);
        if (!have_header) {
            for (std::size_t i = 1; i < f.size(); ++i)
                if (std::find(skip.begin(), skip.end(), f[i]) == skip.end()) {
                    keep.push_back(static_cast<int>(i));
                    t.col_labels.push_back(f[i]);
                }
            have_header = true;
            continue;
        }
        t.row_labels.push_back(f[0]);
        std::vector<double> row;
        for (int i : keep) {
            if (i >= static_cast<int>(f.size())) throw ParseError("table row too short", line_no);
            const auto& s = f[i];
            if (s.empty() || s == "nan" || s == "NaN") {
                row.push_back(std::nan(""));
                continue;
            }
            std::size_t pos = 0;
            double v;
            try {
                v = std::stod(s, &pos);
            } catch (const std::exception&) {
                throw ParseError("not a number: '" + s + "'", line_no);
            }
            if (pos != s.size()) throw ParseError("not a number: '" + s + "'", line_no);
            row.push_back(v);
        }
        t.values.push_back(std::move(row));
    }
    if (!have_header) throw ParseError("table is empty");
    return t;
}

}  // namespace seedkit
