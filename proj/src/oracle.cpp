#include "tubelab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>

namespace tubelab::oracle {

namespace {

// sup over X in [x0, x0+1) of min(a1 X + b1, a2 X + b2) > 0 ?
bool concave_min_positive(i128 a1, i128 b1, i128 a2, i128 b2, i128 x0) {
    auto g1 = [&](i128 x) { return a1 * x + b1; };
    auto g2 = [&](i128 x) { return a2 * x + b2; };
    if (std::min(g1(x0), g2(x0)) > 0) return true;
    if (std::min(g1(x0 + 1), g2(x0 + 1)) > 0) return true;  // limit from the left
    const i128 da = a1 - a2;
    if (da == 0) return false;
    const i128 num = b2 - b1;  // crossing at X* = num / da
    const bool inside = da > 0 ? (x0 * da < num && num < (x0 + 1) * da) : (x0 * da > num && num > (x0 + 1) * da);
    if (!inside) return false;
    // g1(X*) = (a1 num + b1 da) / da
    const i128 value = a1 * num + b1 * da;
    return da > 0 ? value > 0 : value < 0;
}

}  // namespace

bool cell_meets_tube(const DyadicTube& tube, int grid_k, std::int64_t ix, std::int64_t iy) {
    const i128 ia = tube.dual.i;
    const i128 ib = tube.dual.j;
    const i128 p = i128{1} << grid_k;
    const i128 q = i128{1} << tube.dual.k;
    const i128 y0 = static_cast<i128>(iy) * q;
    const i128 y1 = y0 + q;
    // Boundary lines of the tube at abscissa X (grid units), in units 2^-(k+grid_k).
    i128 up_a, up_b, lo_a, lo_b;
    if (ix >= 0) {
        up_a = ia + 1;
        up_b = (ib + 1) * p;
        lo_a = ia;
        lo_b = ib * p;
    } else {
        up_a = ia;
        up_b = (ib + 1) * p;
        lo_a = ia + 1;
        lo_b = ib * p;
    }
    // need upper(X) - y0 > 0 and y1 - lower(X) > 0 for some X in the column
    return concave_min_positive(up_a, up_b - y0, -lo_a, y1 - lo_b, ix);
}

std::vector<std::uint32_t> multiplicities(const std::vector<DyadicTube>& tubes, int k) {
    const std::int64_t m = std::int64_t{1} << k;
    std::vector<std::uint32_t> out(static_cast<std::size_t>(m * m), 0);
    for (std::int64_t ix = 0; ix < m; ++ix)
        for (std::int64_t iy = 0; iy < m; ++iy)
            for (const DyadicTube& t : tubes)
                if (cell_meets_tube(t, k, ix, iy)) ++out[static_cast<std::size_t>(ix * m + iy)];
    return out;
}

std::int64_t covering_number_1d(std::vector<double> points, double r) {
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    const std::size_t n = points.size();
    // best[i] = fewest balls covering points[i..n)
    std::vector<std::int64_t> best(n + 1, 0);
    for (std::size_t i = n; i-- > 0;) {
        std::int64_t b = std::numeric_limits<std::int64_t>::max();
        for (std::size_t j = i + 1; j <= n; ++j) {
            if (points[j - 1] - points[i] > 2.0 * r) break;
            b = std::min(b, 1 + best[j]);
        }
        best[i] = b;
    }
    return best[0];
}

double regularity_constant(const std::vector<std::int64_t>& points, int k, double s) {
    double best = 0.0;
    for (int jr_big = 0; jr_big <= k; ++jr_big) {
        const std::int64_t big = std::int64_t{1} << (k - jr_big);
        for (int jr = jr_big; jr <= k; ++jr) {
            const std::int64_t small = std::int64_t{1} << (k - jr);
            std::set<std::int64_t> windows;
            for (std::int64_t x : points) windows.insert(floor_div(x, big));
            for (std::int64_t w : windows) {
                std::vector<double> inside;
                for (std::int64_t x : points)
                    if (floor_div(x, big) == w) inside.push_back(static_cast<double>(x));
                const double count = static_cast<double>(covering_number_1d(inside, static_cast<double>(small)));
                best = std::max(best, count / std::pow(static_cast<double>(big) / small, s));
            }
        }
    }
    return best;
}

namespace {

double square_ball_ratio(const std::vector<DyadicSquare>& squares, double exponent, bool frostman) {
    if (squares.empty()) return 0.0;
    const int k = squares.front().k;
    const double d = std::ldexp(1.0, -k);
    const std::set<DyadicSquare> unique(squares.begin(), squares.end());
    double best = 0.0;
    for (const DyadicSquare& c : unique) {
        const double cx = (c.i + 0.5) * d;
        const double cy = (c.j + 0.5) * d;
        for (int j = 0; j <= k; ++j) {
            const double rho = std::ldexp(1.0, -j);
            std::int64_t count = 0;
            for (const DyadicSquare& p : unique) {
                const double x0 = p.i * d, y0 = p.j * d;
                const double dx = std::max({0.0, x0 - cx, cx - (x0 + d)});
                const double dy = std::max({0.0, y0 - cy, cy - (y0 + d)});
                if (dx * dx + dy * dy <= rho * rho) ++count;
            }
            const double denom = frostman ? std::pow(rho, exponent) * static_cast<double>(unique.size())
                                          : std::pow(rho / d, exponent);
            best = std::max(best, count / denom);
        }
    }
    return best;
}

double points_ball_ratio(const std::vector<double>& points, int k, double exponent, bool frostman) {
    if (points.empty()) return 0.0;
    const double d = std::ldexp(1.0, -k);
    const double total = static_cast<double>(covering_number_1d(points, d));
    double best = 0.0;
    for (double c : points) {
        for (int j = 0; j <= k; ++j) {
            const double rho = std::ldexp(1.0, -j);
            std::vector<double> inside;
            for (double x : points)
                if (std::fabs(x - c) <= rho) inside.push_back(x);
            const double count = static_cast<double>(covering_number_1d(inside, d));
            const double denom = frostman ? std::pow(rho, exponent) * total : std::pow(rho / d, exponent);
            best = std::max(best, count / denom);
        }
    }
    return best;
}

}  // namespace

double katz_tao_constant(const std::vector<DyadicSquare>& squares, double t) {
    return square_ball_ratio(squares, t, false);
}

double frostman_constant(const std::vector<DyadicSquare>& squares, double s) {
    return square_ball_ratio(squares, s, true);
}

double katz_tao_constant(const std::vector<double>& points, int k, double t) {
    return points_ball_ratio(points, k, t, false);
}

double frostman_constant(const std::vector<double>& points, int k, double s) {
    return points_ball_ratio(points, k, s, true);
}

std::int64_t sum_multiplicity(const std::vector<std::pair<double, double>>& intervals, int m) {
    std::vector<std::pair<double, double>> sums{{0.0, 0.0}};
    for (int step = 0; step < m; ++step) {
        std::vector<std::pair<double, double>> next;
        for (const auto& s : sums)
            for (const auto& iv : intervals) next.emplace_back(s.first + iv.first, s.second + iv.second);
        sums = std::move(next);
    }
    std::int64_t best = 0;
    for (const auto& cand : sums) {
        std::int64_t c = 0;
        for (const auto& s : sums)
            if (s.first <= cand.first && cand.first <= s.second) ++c;
        best = std::max(best, c);
    }
    return best;
}

double tube_average(const GridFunction& f, std::int64_t t, std::int64_t qx, std::int64_t qy) {
    const int k = f.scale();
    const std::int64_t m = std::int64_t{1} << k;
    // rounded line height at a column centre, measured in cells
    auto height = [&](std::int64_t ix) {
        return static_cast<std::int64_t>(std::floor(static_cast<long double>(t) * (ix + 0.5L) / m + 0.5L));
    };
    const std::int64_t band = qy - height(qx);
    long double sum = 0.0L;
    std::int64_t cells = 0;
    for (std::int64_t ix = qx - m / 2; ix <= qx + m / 2; ++ix)
        for (std::int64_t dy = -2; dy <= 2; ++dy) {
            sum += f.at(ix, height(ix) + band + dy);
            ++cells;
        }
    return static_cast<double>(sum / cells);
}

std::vector<double> nikodym_apply(const GridFunction& f, const DirectionSet& directions) {
    const std::int64_t m = std::int64_t{1} << f.scale();
    std::vector<double> out(static_cast<std::size_t>(m * m), 0.0);
    for (std::int64_t qx = 0; qx < m; ++qx)
        for (std::int64_t qy = 0; qy < m; ++qy)
            for (auto t : directions.slopes)
                out[static_cast<std::size_t>(qx * m + qy)] =
                    std::max(out[static_cast<std::size_t>(qx * m + qy)], tube_average(f, t, qx, qy));
    return out;
}

}  // namespace tubelab::oracle
