#include "tubelab/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "tubelab/config.hpp"

namespace tubelab {

namespace {

constexpr double kWidth = 640, kHeight = 440;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 60;
const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double v, const char* format = "%.4g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else if (c == '&') out += "&amp;";
        else out += c;
    }
    return out;
}

struct Frame {
    double x0, x1, y0, y1;
    double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
    double py(double y) const { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

}  // namespace

void fit_series(LogLogPlot& plot) {
    for (auto& s : plot.series) {
        std::set<double> deltas;
        for (const auto& [d, v] : s.samples) deltas.insert(d);
        s.fitted = deltas.size() >= 2;
        if (s.fitted) s.fit = exponent_fit(s.samples);
    }
}

std::string render_svg(const LogLogPlot& plot) {
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (const auto& s : plot.series)
        for (const auto& [d, v] : s.samples) {
            x0 = std::min(x0, std::log2(1 / d));
            x1 = std::max(x1, std::log2(1 / d));
            y0 = std::min(y0, std::log2(v));
            y1 = std::max(y1, std::log2(v));
        }
    if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 - x0 < 1e-9) x0 -= 0.5, x1 += 0.5;
    if (y1 - y0 < 1e-9) y0 -= 0.5, y1 += 0.5;
    const double pad = 0.05 * (y1 - y0);
    const Frame f{x0, x1, y0 - pad, y1 + pad};

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(plot.title)
        << "</text>\n";
    const double bx = kLeft, by = kHeight - kBottom;
    out << "<line x1=\"" << bx << "\" y1=\"" << by << "\" x2=\"" << kWidth - kRight << "\" y2=\"" << by
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << bx << "\" y1=\"" << by << "\" x2=\"" << bx << "\" y2=\"" << kTop << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double xv = f.x0 + (f.x1 - f.x0) * i / 4, yv = f.y0 + (f.y1 - f.y0) * i / 4;
        out << "<line x1=\"" << num(f.px(xv)) << "\" y1=\"" << by << "\" x2=\"" << num(f.px(xv)) << "\" y2=\""
            << by + 5 << "\" stroke=\"black\"/>";
        out << "<text x=\"" << num(f.px(xv)) << "\" y=\"" << by + 18 << "\" text-anchor=\"middle\">" << num(xv, "%.3g")
            << "</text>\n";
        out << "<line x1=\"" << bx - 5 << "\" y1=\"" << num(f.py(yv)) << "\" x2=\"" << bx << "\" y2=\""
            << num(f.py(yv)) << "\" stroke=\"black\"/>";
        out << "<text x=\"" << bx - 8 << "\" y=\"" << num(f.py(yv) + 4) << "\" text-anchor=\"end\">" << num(yv, "%.3g")
            << "</text>\n";
    }
    out << "<text x=\"" << (bx + kWidth - kRight) / 2 << "\" y=\"" << kHeight - 20
        << "\" text-anchor=\"middle\">log2(1/delta)</text>\n";
    out << "<text x=\"16\" y=\"" << (kTop + by) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << (kTop + by) / 2 << ")\">log2(" << escape(plot.y_label) << ")</text>\n";

    std::size_t idx = 0;
    for (const auto& s : plot.series) {
        const char* color = kColors[idx % std::size(kColors)];
        for (const auto& [d, v] : s.samples)
            out << "<circle cx=\"" << num(f.px(std::log2(1 / d))) << "\" cy=\"" << num(f.py(std::log2(v)))
                << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        std::string note = s.label.empty() ? "" : s.label + ": ";
        if (s.fitted) {
            // value ~ e^intercept delta^-beta, so log2 value = beta x + intercept / ln 2
            auto line_y = [&](double x) { return s.fit.beta * x + s.fit.intercept / std::log(2.0); };
            double lo = INFINITY, hi = -INFINITY;
            for (const auto& sample : s.samples) {
                lo = std::min(lo, std::log2(1 / sample.first));
                hi = std::max(hi, std::log2(1 / sample.first));
            }
            out << "<line x1=\"" << num(f.px(lo)) << "\" y1=\"" << num(f.py(line_y(lo))) << "\" x2=\"" << num(f.px(hi))
                << "\" y2=\"" << num(f.py(line_y(hi))) << "\" stroke=\"" << color << "\" stroke-dasharray=\"4 3\"/>\n";
            note += "slope = " + num(s.fit.beta, "%.4f");
        } else {
            note += "slope = n/a";
        }
        out << "<text class=\"fit\" x=\"" << kLeft + 10 << "\" y=\"" << kTop + 14 + 16 * static_cast<double>(idx)
            << "\" fill=\"" << color << "\">" << escape(note) << "</text>\n";
        ++idx;
    }
    out << "</svg>\n";
    return out.str();
}

std::size_t CsvTable::column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw std::invalid_argument("no column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
}

CsvTable read_csv(std::istream& in) {
    CsvTable t;
    std::string line;
    auto split = [](const std::string& l) {
        std::vector<std::string> cells;
        std::stringstream ss(l);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(trim_copy(cell));
        if (!l.empty() && l.back() == ',') cells.emplace_back();
        return cells;
    };
    if (!std::getline(in, line)) throw std::invalid_argument("empty CSV");
    t.header = split(line);
    while (std::getline(in, line)) {
        if (trim_copy(line).empty()) continue;
        t.rows.push_back(split(line));
    }
    return t;
}

LogLogPlot plot_from_csv(const CsvTable& table, const std::string& x_column, const std::string& y_column,
                         const std::string& group_column) {
    const std::size_t xc = table.column(x_column), yc = table.column(y_column);
    const std::size_t gc = group_column.empty() ? 0 : table.column(group_column);
    LogLogPlot plot;
    plot.y_label = y_column;
    std::map<std::string, std::size_t> index;
    for (const auto& row : table.rows) {
        if (xc >= row.size() || yc >= row.size()) continue;
        char* end = nullptr;
        const double x = std::strtod(row[xc].c_str(), &end);
        if (end == row[xc].c_str()) continue;
        const double y = std::strtod(row[yc].c_str(), &end);
        if (end == row[yc].c_str() || !(x > 0 && x < 1) || !(y > 0) || !std::isfinite(y)) continue;
        const std::string key = group_column.empty() ? "" : group_column + "=" + (gc < row.size() ? row[gc] : "");
        auto [it, fresh] = index.emplace(key, plot.series.size());
        if (fresh) plot.series.push_back(PlotSeries{key, {}, {}, false});
        plot.series[it->second].samples.emplace_back(x, y);
    }
    fit_series(plot);
    return plot;
}

}  // namespace tubelab
