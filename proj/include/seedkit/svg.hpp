#pragma once

#include <string>
#include <vector>

namespace seedkit {

/// Row-labelled numeric table, the common input of both chart kinds.
struct LabeledTable {
    std::string title;
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
    std::vector<std::vector<double>> values;  // [row][col]
};

enum class ChartKind { BAR, HEATMAP };

ChartKind chart_kind_from_string(const std::string& s);

/// Grouped bars: one group per row, one bar per column (series), with legend.
std::string render_bar_svg(const LabeledTable& t);

/// Square-cell heatmap with 3-decimal annotations, a color scale legend and
/// emphasized diagonal (when square). NaN cells are drawn hatched.
std::string render_heatmap_svg(const LabeledTable& t);

std::string render_svg(const LabeledTable& t, ChartKind kind);

/// Parses a CSV whose first column holds row labels and whose header names
/// the columns. Columns listed in `skip` are dropped; '#' lines are ignored.
LabeledTable parse_labeled_csv(const std::string& text, const std::vector<std::string>& skip = {});

}  // namespace seedkit
