#include "tubelab/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "tubelab/rational.hpp"
#include "tubelab/setgen.hpp"

namespace tubelab {

double DirectionSet::delta() const { return std::ldexp(1.0, -k); }

DirectionSet DirectionSet::cantor(double s, int k) {
    DirectionSet d;
    d.k = k;
    d.slopes = cantor_grid_set(s, k);
    d.provenance = "cantor";
    return d;
}

DirectionSet DirectionSet::explicit_set(int k, std::vector<std::int64_t> slopes) {
    const std::int64_t m = std::int64_t{1} << k;
    std::sort(slopes.begin(), slopes.end());
    slopes.erase(std::unique(slopes.begin(), slopes.end()), slopes.end());
    for (auto t : slopes)
        if (t < -m || t >= m) throw std::invalid_argument("slope outside [-1, 1)");
    DirectionSet d;
    d.k = k;
    d.slopes = std::move(slopes);
    return d;
}

DirectionSet DirectionSet::net_of_arc(int k, double lo, double hi) {
    const std::int64_t m = std::int64_t{1} << k;
    const auto a = std::max<std::int64_t>(-m, static_cast<std::int64_t>(std::ceil(std::ldexp(lo, k))));
    const auto b = std::min<std::int64_t>(m - 1, static_cast<std::int64_t>(std::floor(std::ldexp(hi, k))));
    std::vector<std::int64_t> slopes;
    for (auto t = a; t <= b; ++t) slopes.push_back(t);
    DirectionSet d = explicit_set(k, std::move(slopes));
    d.provenance = "net-of-arc";
    return d;
}

DirectionSet DirectionSet::from_rationals(int k, const std::vector<Rational>& values) {
    std::vector<std::int64_t> slopes;
    for (const Rational& q : values) {
        const i128 scaled = static_cast<i128>(q.num()) << k;
        i128 t = scaled / q.den();
        if (scaled % q.den() != 0 && scaled < 0) --t;
        slopes.push_back(static_cast<std::int64_t>(t));
    }
    return explicit_set(k, std::move(slopes));
}

GridFunction::GridFunction(const GridBox& box, double value) : box_(box) {
    values_.assign(static_cast<std::size_t>(box.width() * box.height()), value);
}

void GridFunction::set(std::int64_t ix, std::int64_t iy, double v) {
    if (!box_.contains(ix, iy)) throw std::out_of_range("cell outside the function box");
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("grid function values must be finite and nonnegative");
    values_[index(ix, iy)] = v;
}

double GridFunction::lp_norm(double p) const {
    const double area = std::ldexp(1.0, -2 * box_.k);
    long double sum = 0.0L;
    for (double v : values_) sum += std::pow(static_cast<long double>(v), static_cast<long double>(p));
    return static_cast<double>(std::pow(sum * area, 1.0L / p));
}

double GridFunction::max() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, v);
    return m;
}

GridFunction GridFunction::indicator(const GridBox& box, const CellSet& cells) {
    GridFunction f(box);
    for (const Cell& c : cells.cells())
        if (box.contains(c.ix, c.iy)) f.set(c.ix, c.iy, 1.0);
    return f;
}

GridFunction GridFunction::disc(const GridBox& box, double cx, double cy, double radius) {
    GridFunction f(box);
    const double delta = std::ldexp(1.0, -box.k);
    for (auto ix = box.ix0; ix < box.ix1; ++ix)
        for (auto iy = box.iy0; iy < box.iy1; ++iy) {
            const double dx = (ix + 0.5) * delta - cx, dy = (iy + 0.5) * delta - cy;
            if (dx * dx + dy * dy <= radius * radius) f.set(ix, iy, 1.0);
        }
    return f;
}

std::int64_t digital_shear(std::int64_t t, std::int64_t ix, int k) {
    const std::int64_t m = std::int64_t{1} << k;
    // round(t (ix + 1/2) / M)
    return floor_div(t * (2 * ix + 1) + m, 2 * m);
}

std::int64_t operator_tube_cells(int k) { return 5 * ((std::int64_t{1} << k) + 1); }

namespace {

// Column prefix sums of f in long double, shared by all directions.
struct Prepared {
    const GridFunction& f;
    std::int64_t height;
    std::vector<long double> prefix;  // per box column, height + 1 entries

    explicit Prepared(const GridFunction& g) : f(g), height(g.box().height()) {
        const GridBox& b = g.box();
        prefix.assign(static_cast<std::size_t>(b.width() * (height + 1)), 0.0L);
        for (auto ix = b.ix0; ix < b.ix1; ++ix) {
            long double* col = &prefix[static_cast<std::size_t>((ix - b.ix0) * (height + 1))];
            for (std::int64_t r = 0; r < height; ++r) col[r + 1] = col[r] + g.at(ix, b.iy0 + r);
        }
    }

    // Sum of f over rows [lo, hi] of column ix.
    long double column_sum(std::int64_t ix, std::int64_t lo, std::int64_t hi) const {
        const GridBox& b = f.box();
        if (ix < b.ix0 || ix >= b.ix1) return 0.0L;
        lo = std::max(lo, b.iy0) - b.iy0;
        hi = std::min(hi + 1, b.iy1) - b.iy0;
        if (hi <= lo) return 0.0L;
        const long double* col = &prefix[static_cast<std::size_t>((ix - b.ix0) * (height + 1))];
        return col[hi] - col[lo];
    }
};

// Tube sums for one direction at every cell of [0,1)^2, column-major. For each
// sheared row j a running window over M + 1 columns is slid along x.
void direction_pass(const Prepared& prep, std::int64_t t, std::vector<double>& out) {
    const int k = prep.f.scale();
    const std::int64_t m = std::int64_t{1} << k;
    const std::int64_t half = m / 2;
    std::int64_t jlo = std::numeric_limits<std::int64_t>::max(), jhi = std::numeric_limits<std::int64_t>::min();
    for (std::int64_t qx = 0; qx < m; ++qx) {
        const auto sh = digital_shear(t, qx, k);
        jlo = std::min(jlo, -sh);
        jhi = std::max(jhi, m - 1 - sh);
    }
    const std::size_t span = static_cast<std::size_t>(jhi - jlo + 1);
    std::vector<long double> window(span, 0.0L);
    auto add_column = [&](std::int64_t ix, long double sign) {
        const GridBox& b = prep.f.box();
        if (ix < b.ix0 || ix >= b.ix1) return;
        const auto sh = digital_shear(t, ix, k);
        for (std::size_t j = 0; j < span; ++j) {
            const std::int64_t row = sh + jlo + static_cast<std::int64_t>(j);
            window[j] += sign * prep.column_sum(ix, row - 2, row + 2);
        }
    };
    for (std::int64_t ix = -half; ix <= half; ++ix) add_column(ix, 1.0L);
    const long double cells = static_cast<long double>(operator_tube_cells(k));
    out.assign(static_cast<std::size_t>(m * m), 0.0);
    for (std::int64_t qx = 0; qx < m; ++qx) {
        if (qx > 0) {
            add_column(qx + half, 1.0L);
            add_column(qx - half - 1, -1.0L);
        }
        const auto sh = digital_shear(t, qx, k);
        for (std::int64_t qy = 0; qy < m; ++qy) {
            const long double v = window[static_cast<std::size_t>(qy - sh - jlo)] / cells;
            out[static_cast<std::size_t>(qx * m + qy)] = v > 0.0L ? static_cast<double>(v) : 0.0;
        }
    }
}

void check_scales(const GridFunction& f, const DirectionSet& d) {
    if (f.scale() != d.k) throw std::invalid_argument("function and direction set use different scales");
    if (d.k < 2) throw std::invalid_argument("maximal operators need delta <= 1/4");
}

// Runs direction passes split over threads; visit(direction index, averages)
// is called by the worker that owns the direction.
template <class Visit>
void for_each_direction(const GridFunction& f, const DirectionSet& d, int threads, Visit visit) {
    const Prepared prep(f);
    const std::size_t n = d.slopes.size();
    threads = std::max(1, std::min<int>(threads, static_cast<int>(n)));
    auto work = [&](int w) {
        std::vector<double> avg;
        for (std::size_t i = n * w / threads; i < n * (w + 1) / threads; ++i) {
            direction_pass(prep, d.slopes[i], avg);
            visit(w, i, avg);
        }
    };
    if (threads == 1) {
        work(0);
        return;
    }
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
}

}  // namespace

GridFunction direction_averages(const GridFunction& f, std::int64_t slope) {
    if (f.scale() < 2) throw std::invalid_argument("maximal operators need delta <= 1/4");
    const Prepared prep(f);
    std::vector<double> avg;
    direction_pass(prep, slope, avg);
    GridFunction out(GridBox::unit_square(f.scale()));
    const std::int64_t m = std::int64_t{1} << f.scale();
    for (std::int64_t ix = 0; ix < m; ++ix)
        for (std::int64_t iy = 0; iy < m; ++iy) out.set(ix, iy, avg[static_cast<std::size_t>(ix * m + iy)]);
    return out;
}

GridFunction nikodym_apply(const GridFunction& f, const DirectionSet& directions, int threads) {
    check_scales(f, directions);
    const std::int64_t m = std::int64_t{1} << f.scale();
    const std::size_t cells = static_cast<std::size_t>(m * m);
    std::vector<std::vector<double>> best(std::max(1, threads), std::vector<double>(cells, 0.0));
    for_each_direction(f, directions, threads, [&](int w, std::size_t, const std::vector<double>& avg) {
        auto& b = best[w];
        for (std::size_t i = 0; i < cells; ++i) b[i] = std::max(b[i], avg[i]);
    });
    for (std::size_t w = 1; w < best.size(); ++w)
        for (std::size_t i = 0; i < cells; ++i) best[0][i] = std::max(best[0][i], best[w][i]);
    GridFunction out(GridBox::unit_square(f.scale()));
    for (std::int64_t ix = 0; ix < m; ++ix)
        for (std::int64_t iy = 0; iy < m; ++iy) out.set(ix, iy, best[0][static_cast<std::size_t>(ix * m + iy)]);
    return out;
}

std::map<std::int64_t, double> kakeya_apply(const GridFunction& f, const DirectionSet& directions, int threads) {
    check_scales(f, directions);
    std::vector<double> value(directions.size(), 0.0);
    for_each_direction(f, directions, threads, [&](int, std::size_t i, const std::vector<double>& avg) {
        value[i] = *std::max_element(avg.begin(), avg.end());
    });
    std::map<std::int64_t, double> out;
    for (std::size_t i = 0; i < value.size(); ++i) out[directions.slopes[i]] = value[i];
    return out;
}

std::vector<Cell> bush_tube_cells(int k, std::int64_t slope) {
    if (k < 4) throw std::invalid_argument("bush construction needs delta <= 1/16");
    const std::int64_t m = std::int64_t{1} << k;
    const std::int64_t c = m / 2;
    const std::int64_t j0 = c - digital_shear(slope, c, k);
    std::vector<Cell> cells;
    for (std::int64_t ix = 0; ix < m; ++ix) {
        const std::int64_t row = digital_shear(slope, ix, k) + j0;
        for (std::int64_t iy = std::max<std::int64_t>(0, row - 1); iy <= std::min(m - 1, row + 1); ++iy)
            cells.push_back(Cell{ix, iy, 1.0});
    }
    return cells;
}

std::vector<Cell> BushPair::covered_union() const {
    const std::int64_t c = (std::int64_t{1} << k) / 2;
    std::vector<Cell> out;
    for (const Cell& q : union_cells.cells())
        if (std::llabs(q.ix - c) + reach <= c) out.push_back(q);
    return out;
}

BushPair bush_construction(const DirectionSet& directions, double omega, double rho) {
    const double delta = directions.delta();
    if (!(rho >= delta)) throw std::invalid_argument("bush window radius must be at least delta");
    BushPair bush;
    bush.k = directions.k;
    bush.rho = rho;
    for (auto t : directions.slopes)
        if (std::fabs(t * delta - omega) <= rho) bush.slopes.push_back(t);
    if (bush.slopes.empty()) throw std::invalid_argument("no direction of the set lies in the bush window");

    std::vector<Cell> all;
    std::vector<Cell> core;
    bool first = true;
    for (auto t : bush.slopes) {
        CellSet tube(directions.k, bush_tube_cells(directions.k, t));
        all.insert(all.end(), tube.cells().begin(), tube.cells().end());
        if (first) {
            core = tube.cells();
            first = false;
        } else {
            std::vector<Cell> keep;
            for (const Cell& c : core)
                if (tube.contains(c.ix, c.iy)) keep.push_back(c);
            core = std::move(keep);
        }
    }
    bush.core = CellSet(directions.k, std::move(core));
    const std::int64_t centre = (std::int64_t{1} << directions.k) / 2;
    for (const Cell& c : bush.core.cells()) bush.reach = std::max<std::int64_t>(bush.reach, std::llabs(c.ix - centre));
    bush.union_cells = CellSet(directions.k, std::move(all));
    bush.core_constant = static_cast<double>(bush.core.size()) * rho;
    bush.union_constant = static_cast<double>(bush.union_cells.size()) * delta / static_cast<double>(bush.slopes.size());
    return bush;
}

double norm_ratio(const GridFunction& f, const DirectionSet& directions, double p, const NormOptions& options) {
    if (!(p >= 1.0)) throw std::invalid_argument("norm exponent must be at least 1");
    const double denom = f.lp_norm(p);
    if (!(denom > 0.0)) throw std::invalid_argument("norm ratio of the zero function");
    if (options.op == MaximalOperator::nikodym) return nikodym_apply(f, directions, options.threads).lp_norm(p) / denom;

    const auto values = kakeya_apply(f, directions, options.threads);
    if (!options.weights.empty() && options.weights.size() != directions.size())
        throw std::invalid_argument("one Kakeya weight per direction is required");
    const double uniform = std::pow(directions.delta(), options.s);
    long double sum = 0.0L;
    std::size_t i = 0;
    for (const auto& [slope, v] : values) {
        const double w = options.weights.empty() ? uniform : options.weights[i];
        sum += std::pow(static_cast<long double>(v), static_cast<long double>(p)) * w;
        ++i;
    }
    return static_cast<double>(std::pow(sum, 1.0L / p)) / denom;
}

namespace {

GridBox sum_box(int k) { return GridBox::covering(k, 0.0, 1.0, -2.0, 3.0); }

double grid_lp(const std::vector<std::uint32_t>& mult, int k, double p) {
    long double sum = 0.0L;
    for (auto v : mult)
        if (v) sum += std::pow(static_cast<long double>(v), static_cast<long double>(p));
    return static_cast<double>(std::pow(sum * std::ldexp(1.0L, -2 * k), 1.0L / p));
}

void add_tube(std::vector<std::uint32_t>& mult, const GridBox& box, const DyadicTube& tube, int k, std::uint32_t count) {
    for_each_tube_column(tube, k, box, [&](std::int64_t ix, std::int64_t lo, std::int64_t hi) {
        for (auto iy = lo; iy <= hi; ++iy)
            mult[static_cast<std::size_t>((ix - box.ix0) * box.height() + (iy - box.iy0))] += count;
    });
}

}  // namespace

DualSumResult dual_sum_norm(const std::vector<DyadicTube>& assignment, int k, double p_prime) {
    const std::int64_t m = std::int64_t{1} << k;
    if (static_cast<std::int64_t>(assignment.size()) != m * m)
        throw std::invalid_argument("assignment must give one tube for every cell of [0,1)^2");
    if (!(p_prime >= 1.0)) throw std::invalid_argument("norm exponent must be at least 1");
    const double delta = std::ldexp(1.0, -k);
    DualSumResult res;
    std::map<DyadicTube, std::uint32_t> counts;
    for (std::int64_t ix = 0; ix < m; ++ix)
        for (std::int64_t iy = 0; iy < m; ++iy) {
            const DyadicTube& t = assignment[static_cast<std::size_t>(ix * m + iy)];
            if (t.dual.k != k) throw std::invalid_argument("assigned tube at a different scale");
            ++counts[t];
            const double x = (ix + 0.5) * delta, y = (iy + 0.5) * delta;
            const double lo = t.a() * x + t.b(), hi = (t.a() + delta) * x + t.b() + delta;
            const double gap = y < lo ? lo - y : (y >= hi ? y - hi : 0.0);
            res.max_distance = std::max(res.max_distance, gap / delta);
        }
    const GridBox box = sum_box(k);
    std::vector<std::uint32_t> mult(static_cast<std::size_t>(box.width() * box.height()), 0);
    for (const auto& [tube, c] : counts) add_tube(mult, box, tube, k, c);
    res.norm = grid_lp(mult, k, p_prime);
    return res;
}

std::vector<DyadicTube> adversarial_assignment(const DirectionSet& directions, double a, double zx, double zy) {
    if (directions.slopes.empty()) throw std::invalid_argument("empty direction set");
    const int k = directions.k;
    const std::int64_t m = std::int64_t{1} << k;
    const double delta = directions.delta();
    const auto shift = static_cast<std::int64_t>(std::floor(a));
    std::vector<DyadicTube> out;
    out.reserve(static_cast<std::size_t>(m * m));
    for (std::int64_t ix = 0; ix < m; ++ix)
        for (std::int64_t iy = 0; iy < m; ++iy) {
            const double x = (ix + 0.5) * delta, y = (iy + 0.5) * delta;
            const double want = (zy - y) / (zx - x) / delta;
            auto it = std::lower_bound(directions.slopes.begin(), directions.slopes.end(), want);
            std::int64_t t;
            if (it == directions.slopes.end()) t = directions.slopes.back();
            else if (it == directions.slopes.begin()) t = *it;
            else t = (want - *(it - 1) <= *it - want) ? *(it - 1) : *it;
            const auto j0 = static_cast<std::int64_t>(std::floor((y - t * delta * x) / delta));
            const auto jz = static_cast<std::int64_t>(std::floor((zy - t * delta * zx) / delta));
            const std::int64_t j = j0 + std::clamp(jz - j0, -shift, shift);
            out.push_back(make_dyadic_tube(k, t, j));
        }
    return out;
}

TubeSumResult tube_sum_norm(const TubeFamily& family, double p_prime, double s) {
    if (!(p_prime > 1.0)) throw std::invalid_argument("tube-sum exponent must exceed 1");
    if (family.tubes.empty()) throw std::invalid_argument("empty tube family");
    family.validate();
    const auto slopes = family.slope_indices();
    if (std::adjacent_find(slopes.begin(), slopes.end()) != slopes.end())
        throw std::invalid_argument("tube-sum bound needs one tube per direction");
    const int k = family.k;
    const double delta = std::ldexp(1.0, -k);
    const GridBox box = sum_box(k);
    std::vector<std::uint32_t> mult(static_cast<std::size_t>(box.width() * box.height()), 0);
    for (const auto& t : family.tubes) add_tube(mult, box, t, k, 1);
    TubeSumResult res;
    res.norm = grid_lp(mult, k, p_prime);
    std::vector<double> pts;
    for (auto t : slopes) pts.push_back(t * delta);
    res.frostman = frostman_constant(pts, k, s);
    const double p = p_prime / (p_prime - 1.0);
    res.bound = std::pow(res.frostman, 1.0 / p) * std::pow(delta, 2.0 / p_prime) * static_cast<double>(family.size());
    res.ratio = res.norm / res.bound;
    return res;
}

TubeFamily bush_family(const DirectionSet& directions) {
    TubeFamily f;
    f.k = directions.k;
    const std::int64_t m = std::int64_t{1} << directions.k;
    for (auto t : directions.slopes) f.tubes.push_back(make_dyadic_tube(directions.k, t, floor_div(m - t, 2)));
    return f;
}

ExponentFit exponent_fit(const std::vector<std::pair<double, double>>& samples) {
    std::vector<double> xs, ys;
    for (const auto& [delta, value] : samples) {
        if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("scales must lie in (0, 1)");
        if (!(value > 0.0)) throw std::invalid_argument("exponent fit needs positive values");
        xs.push_back(-std::log(delta));
        ys.push_back(std::log(value));
    }
    std::vector<double> distinct = xs;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 2) throw std::invalid_argument("exponent fit needs at least two distinct scales");
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    ExponentFit fit;
    fit.beta = sxy / sxx;
    fit.intercept = my - fit.beta * mx;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - fit.intercept - fit.beta * xs[i];
        fit.residual += r * r;
    }
    return fit;
}

}  // namespace tubelab
