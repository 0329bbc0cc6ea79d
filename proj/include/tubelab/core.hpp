#pragma once
// Dyadic geometry primitives: scales, squares, tubes, the point-line duality,
// rasterization onto a cell grid, covering numbers and dyadic cube families.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "tubelab/geometry.hpp"
#include "tubelab/rational.hpp"

namespace tubelab {

struct DyadicScale {
    int k = 0;

    std::int64_t cells_per_unit() const { return std::int64_t{1} << k; }
    double delta() const;
    Rational exact() const { return Rational(1, cells_per_unit()); }
};

// [i*delta, (i+1)*delta) x [j*delta, (j+1)*delta) with delta = 2^-k.
struct DyadicSquare {
    int k = 0;
    std::int64_t i = 0;
    std::int64_t j = 0;

    friend bool operator==(const DyadicSquare&, const DyadicSquare&) = default;
    friend auto operator<=>(const DyadicSquare&, const DyadicSquare&) = default;
};

// A dyadic tube is the union of the lines y = a x + b with (a, b) in its dual
// square. Slopes live in delta*Z intersected with [-1, 1).
struct DyadicTube {
    DyadicSquare dual;

    double delta() const;
    double a() const;
    double b() const;
    Rational slope() const { return Rational(dual.i, std::int64_t{1} << dual.k); }

    friend bool operator==(const DyadicTube&, const DyadicTube&) = default;
    friend auto operator<=>(const DyadicTube&, const DyadicTube&) = default;
};

DyadicTube make_dyadic_tube(int k, std::int64_t slope_index, std::int64_t intercept_index);

// A closed width x length rectangle centred at `center` along the unit `direction`.
struct OrdinaryTube {
    Point center;
    Point direction{1.0, 0.0};
    double width = 0.0;
    double length = 1.0;

    Polygon corners() const;
};

OrdinaryTube make_ordinary_tube(Point center, double slope, double width, double length = 1.0);
double overlap_area(const OrdinaryTube& t1, const OrdinaryTube& t2);
// Distinct in the sense Leb(T1 n T2) <= width/2.
bool distinct(const OrdinaryTube& t1, const OrdinaryTube& t2);

struct Line {
    double slope = 0.0;
    double intercept = 0.0;

    double at(double x) const { return slope * x + intercept; }
    bool contains(Point p) const { return exact_sign_above_line(p.y, slope, p.x, intercept) == 0; }
};

Line dual_line(double a, double b);

bool tube_point_test(const DyadicTube& tube, Point p);

// Half-open rectangle of grid cells [ix0, ix1) x [iy0, iy1) at scale 2^-k.
struct GridBox {
    int k = 0;
    std::int64_t ix0 = 0, ix1 = 0, iy0 = 0, iy1 = 0;

    std::int64_t width() const { return ix1 > ix0 ? ix1 - ix0 : 0; }
    std::int64_t height() const { return iy1 > iy0 ? iy1 - iy0 : 0; }
    bool empty() const { return width() == 0 || height() == 0; }
    bool contains(std::int64_t ix, std::int64_t iy) const {
        return ix >= ix0 && ix < ix1 && iy >= iy0 && iy < iy1;
    }
    double cell_area() const;
    // Smallest cell box covering [x0,x1) x [y0,y1).
    static GridBox covering(int k, double x0, double x1, double y0, double y1);
    static GridBox unit_square(int k) { return covering(k, 0.0, 1.0, 0.0, 1.0); }
};

struct Cell {
    std::int64_t ix = 0;
    std::int64_t iy = 0;
    double weight = 0.0;
};

// Sorted, deduplicated cells of a common scale.
class CellSet {
public:
    CellSet() = default;
    explicit CellSet(int k) : k_(k) {}
    CellSet(int k, std::vector<Cell> cells);

    int scale() const { return k_; }
    std::size_t size() const { return cells_.size(); }
    bool empty() const { return cells_.empty(); }
    const std::vector<Cell>& cells() const { return cells_; }
    bool contains(std::int64_t ix, std::int64_t iy) const;
    double total_weight() const;

private:
    int k_ = 0;
    std::vector<Cell> cells_;
};

// Inclusive row range (unclipped) of the cells in column ix that meet the tube.
void tube_column_rows(const DyadicTube& tube, int grid_k, std::int64_t ix, std::int64_t& iy_lo,
                      std::int64_t& iy_hi);

// Calls visit(ix, iy_lo, iy_hi) for every column of `box` that meets the tube,
// with the inclusive row range of cells c satisfying c n T n box != empty.
// Exact integer arithmetic; requires tube.dual.k <= grid_k.
void for_each_tube_column(const DyadicTube& tube, int grid_k, const GridBox& box,
                          const std::function<void(std::int64_t, std::int64_t, std::int64_t)>& visit);

CellSet rasterize_tube(const DyadicTube& tube, int grid_k, const GridBox& box);
// Cells with a positive-area overlap, weighted by that area.
CellSet rasterize_tube(const OrdinaryTube& tube, int grid_k, const GridBox& box);
// Exact area of the part of the dyadic tube inside the box.
double tube_area_in_box(const DyadicTube& tube, const GridBox& box);

// Closed interval on the line, optionally open on the right.
struct Segment {
    double lo = 0.0;
    double hi = 0.0;
    bool closed_hi = true;
};

std::int64_t covering_number(std::vector<double> points, double r);
std::int64_t covering_number(std::vector<Segment> segments, double r);

struct CoveringEstimate {
    std::int64_t count = 0;
    std::string method;
};
// Two-dimensional covering numbers use the dyadic-cube proxy: the number of
// cells of side r meeting the set (r need not be dyadic here).
CoveringEstimate covering_number(const std::vector<Point>& points, double r);
std::int64_t dyadic_proxy_count(const std::vector<Segment>& segments, int k);

struct DyadicInterval {
    int k = 0;
    std::int64_t i = 0;
    friend bool operator==(const DyadicInterval&, const DyadicInterval&) = default;
    friend auto operator<=>(const DyadicInterval&, const DyadicInterval&) = default;
};

std::vector<DyadicSquare> dyadic_cubes(const std::vector<Point>& points, int k);
// Half-open rectangle [x0,x1) x [y0,y1).
std::vector<DyadicSquare> dyadic_cubes(double x0, double x1, double y0, double y1, int k);
std::vector<DyadicInterval> dyadic_cubes(const std::vector<Segment>& segments, int k);

// Line format: one tube per line as "k:i:j", meaning a = i 2^-k, b = j 2^-k,
// delta = 2^-k. Blank lines and lines starting with '#' are ignored.
std::string format_tube(const DyadicTube& tube);
DyadicTube parse_tube(const std::string& text);
void write_tubes(std::ostream& out, const std::vector<DyadicTube>& tubes);
std::vector<DyadicTube> read_tubes(std::istream& in);
void write_cells(std::ostream& out, const CellSet& cells);
CellSet read_cells(std::istream& in);

}  // namespace tubelab
