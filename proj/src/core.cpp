#include "tubelab/core.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace tubelab {

double DyadicScale::delta() const { return std::ldexp(1.0, -k); }

double DyadicTube::delta() const { return std::ldexp(1.0, -dual.k); }
double DyadicTube::a() const { return std::ldexp(static_cast<double>(dual.i), -dual.k); }
double DyadicTube::b() const { return std::ldexp(static_cast<double>(dual.j), -dual.k); }

DyadicTube make_dyadic_tube(int k, std::int64_t slope_index, std::int64_t intercept_index) {
    if (k < 0 || k > 30) throw std::invalid_argument("tube scale exponent out of range");
    const std::int64_t m = std::int64_t{1} << k;
    if (slope_index < -m || slope_index >= m)
        throw std::invalid_argument("tube slope must lie in [-1, 1)");
    return DyadicTube{DyadicSquare{k, slope_index, intercept_index}};
}

Polygon OrdinaryTube::corners() const {
    const double hl = length / 2.0;
    const double hw = width / 2.0;
    const Point u = direction;
    const Point n{-u.y, u.x};
    return {
        {center.x - hl * u.x - hw * n.x, center.y - hl * u.y - hw * n.y},
        {center.x + hl * u.x - hw * n.x, center.y + hl * u.y - hw * n.y},
        {center.x + hl * u.x + hw * n.x, center.y + hl * u.y + hw * n.y},
        {center.x - hl * u.x + hw * n.x, center.y - hl * u.y + hw * n.y},
    };
}

OrdinaryTube make_ordinary_tube(Point center, double slope, double width, double length) {
    if (!(width > 0.0)) throw std::invalid_argument("tube width must be positive");
    const double norm = std::hypot(1.0, slope);
    return OrdinaryTube{center, Point{1.0 / norm, slope / norm}, width, length};
}

double overlap_area(const OrdinaryTube& t1, const OrdinaryTube& t2) {
    return polygon_area(intersect_convex(t1.corners(), t2.corners()));
}

bool distinct(const OrdinaryTube& t1, const OrdinaryTube& t2) {
    return overlap_area(t1, t2) <= std::min(t1.width, t2.width) / 2.0;
}

Line dual_line(double a, double b) { return Line{a, b}; }

bool tube_point_test(const DyadicTube& tube, Point p) {
    const double a = tube.a();
    const double b = tube.b();
    const double d = tube.delta();
    if (p.x >= 0.0) {
        // y in [a x + b, (a + d) x + b + d)
        return exact_sign_above_line(p.y, a, p.x, b) >= 0 &&
               exact_sign_above_line(p.y, a + d, p.x, b + d) < 0;
    }
    // For x < 0 both ends are open: y in ((a + d) x + b, a x + b + d).
    return exact_sign_above_line(p.y, a + d, p.x, b) > 0 && exact_sign_above_line(p.y, a, p.x, b + d) < 0;
}

double GridBox::cell_area() const {
    const double d = std::ldexp(1.0, -k);
    return d * d;
}

GridBox GridBox::covering(int k, double x0, double x1, double y0, double y1) {
    const double m = std::ldexp(1.0, k);
    GridBox g;
    g.k = k;
    g.ix0 = static_cast<std::int64_t>(std::floor(x0 * m));
    g.ix1 = static_cast<std::int64_t>(std::ceil(x1 * m));
    g.iy0 = static_cast<std::int64_t>(std::floor(y0 * m));
    g.iy1 = static_cast<std::int64_t>(std::ceil(y1 * m));
    return g;
}

CellSet::CellSet(int k, std::vector<Cell> cells) : k_(k), cells_(std::move(cells)) {
    std::sort(cells_.begin(), cells_.end(), [](const Cell& a, const Cell& b) {
        return a.ix != b.ix ? a.ix < b.ix : a.iy < b.iy;
    });
    std::vector<Cell> unique;
    unique.reserve(cells_.size());
    for (const Cell& c : cells_) {
        if (!unique.empty() && unique.back().ix == c.ix && unique.back().iy == c.iy) {
            unique.back().weight = std::max(unique.back().weight, c.weight);
        } else {
            unique.push_back(c);
        }
    }
    cells_ = std::move(unique);
}

bool CellSet::contains(std::int64_t ix, std::int64_t iy) const {
    auto it = std::lower_bound(cells_.begin(), cells_.end(), Cell{ix, iy, 0.0}, [](const Cell& a, const Cell& b) {
        return a.ix != b.ix ? a.ix < b.ix : a.iy < b.iy;
    });
    return it != cells_.end() && it->ix == ix && it->iy == iy;
}

double CellSet::total_weight() const {
    double s = 0.0;
    for (const Cell& c : cells_) s += c.weight;
    return s;
}

namespace {

// Lower and upper boundary values of the tube over the column [ix, ix+1), in
// units of 2^-(k + grid_k). The tube over the column is the union of
// [lower(x), upper(x)) for x >= 0 and (lower(x), upper(x)) for x < 0.
struct ColumnBounds {
    std::int64_t lower0, lower1, upper0, upper1;
};

ColumnBounds column_bounds(const DyadicTube& tube, int grid_k, std::int64_t ix) {
    if (tube.dual.k > grid_k) throw std::invalid_argument("grid must be at least as fine as the tube scale");
    const std::int64_t ia = tube.dual.i;
    const std::int64_t ib = tube.dual.j;
    const std::int64_t p = std::int64_t{1} << grid_k;  // tube delta in these units
    const std::int64_t x0 = ix;
    const std::int64_t x1 = ix + 1;
    if (ix >= 0) {
        return {ia * x0 + ib * p, ia * x1 + ib * p, (ia + 1) * x0 + (ib + 1) * p, (ia + 1) * x1 + (ib + 1) * p};
    }
    return {(ia + 1) * x0 + ib * p, (ia + 1) * x1 + ib * p, ia * x0 + (ib + 1) * p, ia * x1 + (ib + 1) * p};
}

}  // namespace

void tube_column_rows(const DyadicTube& tube, int grid_k, std::int64_t ix, std::int64_t& iy_lo,
                      std::int64_t& iy_hi) {
    const ColumnBounds cb = column_bounds(tube, grid_k, ix);
    const std::int64_t q = std::int64_t{1} << tube.dual.k;  // grid delta in these units
    const std::int64_t lower = std::min(cb.lower0, cb.lower1);
    const std::int64_t upper = std::max(cb.upper0, cb.upper1);
    iy_lo = floor_div(lower, q);
    iy_hi = ceil_div(upper, q) - 1;
}

void for_each_tube_column(const DyadicTube& tube, int grid_k, const GridBox& box,
                          const std::function<void(std::int64_t, std::int64_t, std::int64_t)>& visit) {
    if (box.empty()) return;
    if (box.k != grid_k) throw std::invalid_argument("box scale differs from grid scale");
    for (std::int64_t ix = box.ix0; ix < box.ix1; ++ix) {
        std::int64_t lo, hi;
        tube_column_rows(tube, grid_k, ix, lo, hi);
        lo = std::max(lo, box.iy0);
        hi = std::min(hi, box.iy1 - 1);
        if (lo <= hi) visit(ix, lo, hi);
    }
}

CellSet rasterize_tube(const DyadicTube& tube, int grid_k, const GridBox& box) {
    std::vector<Cell> cells;
    if (box.empty()) return CellSet(grid_k);
    const double unit = std::ldexp(1.0, -(tube.dual.k + grid_k));
    const double dx = std::ldexp(1.0, -grid_k);
    const std::int64_t q = std::int64_t{1} << tube.dual.k;
    for_each_tube_column(tube, grid_k, box, [&](std::int64_t ix, std::int64_t lo, std::int64_t hi) {
        const ColumnBounds cb = column_bounds(tube, grid_k, ix);
        for (std::int64_t iy = lo; iy <= hi; ++iy) {
            const double y0 = static_cast<double>(iy * q);
            const double y1 = static_cast<double>((iy + 1) * q);
            const double up = clamped_linear_integral(static_cast<double>(cb.upper0), static_cast<double>(cb.upper1), y0, y1);
            const double dn = clamped_linear_integral(static_cast<double>(cb.lower0), static_cast<double>(cb.lower1), y0, y1);
            cells.push_back(Cell{ix, iy, (up - dn) * unit * dx});
        }
    });
    return CellSet(grid_k, std::move(cells));
}

double tube_area_in_box(const DyadicTube& tube, const GridBox& box) {
    if (box.empty()) return 0.0;
    const double unit = std::ldexp(1.0, -(tube.dual.k + box.k));
    const double dx = std::ldexp(1.0, -box.k);
    const std::int64_t q = std::int64_t{1} << tube.dual.k;
    const double y0 = static_cast<double>(box.iy0 * q);
    const double y1 = static_cast<double>(box.iy1 * q);
    double area = 0.0;
    for (std::int64_t ix = box.ix0; ix < box.ix1; ++ix) {
        const ColumnBounds cb = column_bounds(tube, box.k, ix);
        area += clamped_linear_integral(static_cast<double>(cb.upper0), static_cast<double>(cb.upper1), y0, y1) -
                clamped_linear_integral(static_cast<double>(cb.lower0), static_cast<double>(cb.lower1), y0, y1);
    }
    return area * unit * dx;
}

CellSet rasterize_tube(const OrdinaryTube& tube, int grid_k, const GridBox& box) {
    std::vector<Cell> cells;
    if (box.empty()) return CellSet(grid_k);
    const double d = std::ldexp(1.0, -grid_k);
    const Polygon poly = tube.corners();
    double xmin = poly[0].x, xmax = poly[0].x;
    for (const Point& p : poly) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
    }
    const std::int64_t c0 = std::max(box.ix0, static_cast<std::int64_t>(std::floor(xmin / d)));
    const std::int64_t c1 = std::min(box.ix1 - 1, static_cast<std::int64_t>(std::ceil(xmax / d)) - 1);
    for (std::int64_t ix = c0; ix <= c1; ++ix) {
        const double x0 = ix * d;
        const double x1 = x0 + d;
        Polygon strip = clip_halfplane(clip_halfplane(poly, -1, 0, -x0), 1, 0, x1);
        if (strip.size() < 3) continue;
        double ymin = strip[0].y, ymax = strip[0].y;
        for (const Point& p : strip) {
            ymin = std::min(ymin, p.y);
            ymax = std::max(ymax, p.y);
        }
        const std::int64_t r0 = std::max(box.iy0, static_cast<std::int64_t>(std::floor(ymin / d)));
        const std::int64_t r1 = std::min(box.iy1 - 1, static_cast<std::int64_t>(std::ceil(ymax / d)) - 1);
        for (std::int64_t iy = r0; iy <= r1; ++iy) {
            const double y0 = iy * d;
            Polygon piece = clip_halfplane(clip_halfplane(strip, 0, -1, -y0), 0, 1, y0 + d);
            const double a = piece.size() >= 3 ? polygon_area(piece) : 0.0;
            if (a > 0.0) cells.push_back(Cell{ix, iy, a});
        }
    }
    return CellSet(grid_k, std::move(cells));
}

std::int64_t covering_number(std::vector<double> points, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("covering radius must be positive");
    std::sort(points.begin(), points.end());
    std::int64_t count = 0;
    std::size_t i = 0;
    while (i < points.size()) {
        ++count;
        const double start = points[i];
        while (i < points.size() && points[i] - start <= 2.0 * r) ++i;
    }
    return count;
}

std::int64_t covering_number(std::vector<Segment> segments, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("covering radius must be positive");
    std::sort(segments.begin(), segments.end(), [](const Segment& a, const Segment& b) { return a.lo < b.lo; });
    std::int64_t count = 0;
    double covered = -std::numeric_limits<double>::infinity();  // everything <= covered is covered
    const double diam = 2.0 * r;
    for (const Segment& s : segments) {
        const bool empty = s.hi < s.lo || (s.hi == s.lo && !s.closed_hi);
        if (empty || s.hi <= covered) continue;
        if (s.lo > covered) {
            ++count;
            covered = s.lo + diam;
        }
        if (s.hi > covered) {
            const double n = std::ceil((s.hi - covered) / diam);
            count += static_cast<std::int64_t>(n);
            covered += n * diam;
        }
    }
    return count;
}

CoveringEstimate covering_number(const std::vector<Point>& points, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("covering radius must be positive");
    std::set<std::pair<std::int64_t, std::int64_t>> cells;
    for (const Point& p : points)
        cells.emplace(static_cast<std::int64_t>(std::floor(p.x / r)), static_cast<std::int64_t>(std::floor(p.y / r)));
    return CoveringEstimate{static_cast<std::int64_t>(cells.size()), "dyadic-cube proxy: cells of side r meeting the set"};
}

std::vector<DyadicSquare> dyadic_cubes(const std::vector<Point>& points, int k) {
    const double m = std::ldexp(1.0, k);
    std::set<DyadicSquare> out;
    for (const Point& p : points)
        out.insert(DyadicSquare{k, static_cast<std::int64_t>(std::floor(p.x * m)), static_cast<std::int64_t>(std::floor(p.y * m))});
    return {out.begin(), out.end()};
}

std::vector<DyadicSquare> dyadic_cubes(double x0, double x1, double y0, double y1, int k) {
    std::vector<DyadicSquare> out;
    if (!(x1 > x0) || !(y1 > y0)) return out;
    const GridBox g = GridBox::covering(k, x0, x1, y0, y1);
    for (std::int64_t i = g.ix0; i < g.ix1; ++i)
        for (std::int64_t j = g.iy0; j < g.iy1; ++j) out.push_back(DyadicSquare{k, i, j});
    return out;
}

std::vector<DyadicInterval> dyadic_cubes(const std::vector<Segment>& segments, int k) {
    const double m = std::ldexp(1.0, k);
    std::set<DyadicInterval> out;
    for (const Segment& s : segments) {
        if (s.hi < s.lo || (s.hi == s.lo && !s.closed_hi)) continue;
        const std::int64_t i0 = static_cast<std::int64_t>(std::floor(s.lo * m));
        const std::int64_t i1 = s.closed_hi ? static_cast<std::int64_t>(std::floor(s.hi * m))
                                            : static_cast<std::int64_t>(std::ceil(s.hi * m)) - 1;
        for (std::int64_t i = i0; i <= i1; ++i) out.insert(DyadicInterval{k, i});
    }
    return {out.begin(), out.end()};
}

std::int64_t dyadic_proxy_count(const std::vector<Segment>& segments, int k) {
    return static_cast<std::int64_t>(dyadic_cubes(segments, k).size());
}

std::string format_tube(const DyadicTube& tube) {
    return std::to_string(tube.dual.k) + ":" + std::to_string(tube.dual.i) + ":" + std::to_string(tube.dual.j);
}

namespace {

std::vector<std::int64_t> split_triple(const std::string& text) {
    std::vector<std::int64_t> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) {
        try {
            std::size_t used = 0;
            parts.push_back(std::stoll(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::logic_error&) {
            throw std::invalid_argument("malformed k:i:j record '" + text + "'");
        }
    }
    if (parts.size() != 3) throw std::invalid_argument("malformed k:i:j record '" + text + "'");
    return parts;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

DyadicTube parse_tube(const std::string& text) {
    const auto p = split_triple(trim(text));
    return make_dyadic_tube(static_cast<int>(p[0]), p[1], p[2]);
}

void write_tubes(std::ostream& out, const std::vector<DyadicTube>& tubes) {
    out << "# a b delta as k:i:j with a = i 2^-k, b = j 2^-k, delta = 2^-k\n";
    for (const DyadicTube& t : tubes) out << format_tube(t) << '\n';
}

std::vector<DyadicTube> read_tubes(std::istream& in) {
    std::vector<DyadicTube> tubes;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        tubes.push_back(parse_tube(line));
    }
    return tubes;
}

void write_cells(std::ostream& out, const CellSet& cells) {
    out << "# cell k:ix:iy followed by its overlap weight\n";
    out.precision(17);
    for (const Cell& c : cells.cells()) out << cells.scale() << ':' << c.ix << ':' << c.iy << ' ' << c.weight << '\n';
}

CellSet read_cells(std::istream& in) {
    std::vector<Cell> cells;
    int k = -1;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string triple;
        double w = 0.0;
        ss >> triple;
        if (!(ss >> w)) w = 0.0;
        const auto p = split_triple(triple);
        if (k >= 0 && p[0] != k) throw std::invalid_argument("cell records mix scales");
        k = static_cast<int>(p[0]);
        cells.push_back(Cell{p[1], p[2], w});
    }
    return CellSet(std::max(k, 0), std::move(cells));
}

}  // namespace tubelab
