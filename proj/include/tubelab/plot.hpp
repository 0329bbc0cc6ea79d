#pragma once
// Minimal SVG renderer for log-log exponent fits, and a reader for the CSV
// tables the runner writes.

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "tubelab/maximal.hpp"

namespace tubelab {

struct PlotSeries {
    std::string label;
    std::vector<std::pair<double, double>> samples;  // (delta, value), both positive
    ExponentFit fit;
    bool fitted = false;  // at least two distinct deltas
};

struct LogLogPlot {
    std::string title;
    std::string y_label;
    std::vector<PlotSeries> series;
};

// Fits every series with two or more distinct deltas.
void fit_series(LogLogPlot& plot);
// Axes over log2(1/delta) and log2(value), points, fitted lines and one
// "slope = ..." annotation per fitted series.
std::string render_svg(const LogLogPlot& plot);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Throws std::invalid_argument for an unknown column.
    std::size_t column(const std::string& name) const;
};
// Comma-separated, header row first, no quoting.
CsvTable read_csv(std::istream& in);

// One series per distinct value of the group column (a single series when
// group is empty); rows whose x is outside (0, 1) or whose y is not positive
// are skipped.
LogLogPlot plot_from_csv(const CsvTable& table, const std::string& x_column, const std::string& y_column,
                         const std::string& group_column = "");

}  // namespace tubelab
