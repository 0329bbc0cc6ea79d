#include "tubelab/incidence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>

#include "tubelab/setgen.hpp"

namespace tubelab {

std::vector<std::int64_t> TubeFamily::slope_indices() const {
    std::vector<std::int64_t> out;
    out.reserve(tubes.size());
    for (const auto& t : tubes) out.push_back(t.dual.i);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<DyadicSquare> TubeFamily::duals() const {
    std::vector<DyadicSquare> out;
    out.reserve(tubes.size());
    for (const auto& t : tubes) out.push_back(t.dual);
    return out;
}

void TubeFamily::validate() const {
    for (const auto& t : tubes)
        if (t.dual.k != k) throw std::invalid_argument("tube family mixes scales");
}

MultiplicityGrid::MultiplicityGrid(int k) : k_(k), side_(std::int64_t{1} << k) {
    if (k < 0 || k > 14) throw std::invalid_argument("multiplicity grid at 2^-" + std::to_string(k) + " exceeds the memory cap");
    small_.assign(static_cast<std::size_t>(side_ * side_), 0);
}

void MultiplicityGrid::widen() {
    wide_.assign(small_.begin(), small_.end());
    small_.clear();
    small_.shrink_to_fit();
}

void MultiplicityGrid::bump(std::size_t i) {
    if (wide_.empty()) {
        if (small_[i] == std::numeric_limits<std::uint16_t>::max()) {
            widen();
        } else {
            ++small_[i];
            return;
        }
    }
    ++wide_[i];
}

void MultiplicityGrid::add_tube(const DyadicTube& tube) {
    const GridBox box = GridBox::unit_square(k_);
    for_each_tube_column(tube, k_, box, [&](std::int64_t ix, std::int64_t lo, std::int64_t hi) {
        const std::size_t base = static_cast<std::size_t>(ix * side_);
        for (std::int64_t iy = lo; iy <= hi; ++iy) bump(base + static_cast<std::size_t>(iy));
    });
}

void MultiplicityGrid::merge(const MultiplicityGrid& other) {
    if (other.k_ != k_) throw std::invalid_argument("merging grids of different scales");
    const std::size_t n = static_cast<std::size_t>(side_ * side_);
    bool fits = wide_.empty() && !other.widened();
    if (fits)
        for (std::size_t i = 0; i < n && fits; ++i)
            fits = static_cast<std::uint32_t>(small_[i]) + other.small_[i] <= std::numeric_limits<std::uint16_t>::max();
    if (fits) {
        for (std::size_t i = 0; i < n; ++i) small_[i] = static_cast<std::uint16_t>(small_[i] + other.small_[i]);
        return;
    }
    if (wide_.empty()) widen();
    for (std::size_t i = 0; i < n; ++i) wide_[i] += other.widened() ? other.wide_[i] : other.small_[i];
}

std::uint64_t MultiplicityGrid::total() const {
    std::uint64_t s = 0;
    if (wide_.empty())
        for (auto v : small_) s += v;
    else
        for (auto v : wide_) s += v;
    return s;
}

std::uint32_t MultiplicityGrid::max() const {
    std::uint32_t m = 0;
    if (wide_.empty())
        for (auto v : small_) m = std::max<std::uint32_t>(m, v);
    else
        for (auto v : wide_) m = std::max(m, v);
    return m;
}

std::vector<std::int64_t> MultiplicityGrid::cells_at_least() const {
    std::vector<std::int64_t> hist(max() + 2, 0);
    if (wide_.empty())
        for (auto v : small_) ++hist[v];
    else
        for (auto v : wide_) ++hist[v];
    for (std::size_t r = hist.size() - 1; r-- > 0;) hist[r] += hist[r + 1];
    hist.pop_back();
    return hist;
}

MultiplicityGrid accumulate(const TubeFamily& family, int threads) {
    family.validate();
    threads = std::max(1, std::min<int>(threads, static_cast<int>(family.tubes.size())));
    if (threads <= 1) {
        MultiplicityGrid g(family.k);
        for (const auto& t : family.tubes) g.add_tube(t);
        return g;
    }
    std::vector<MultiplicityGrid> parts(threads, MultiplicityGrid(family.k));
    std::vector<std::thread> pool;
    const std::size_t n = family.tubes.size();
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = n * w / threads; i < n * (w + 1) / threads; ++i) parts[w].add_tube(family.tubes[i]);
        });
    }
    for (auto& th : pool) th.join();
    for (int w = 1; w < threads; ++w) parts[0].merge(parts[w]);
    return std::move(parts[0]);
}

RichPointSet rich_points(const MultiplicityGrid& grid, int r) {
    if (r < 1) throw std::invalid_argument("richness threshold must be at least 1");
    RichPointSet out;
    out.r = r;
    std::vector<Cell> cells;
    for (std::int64_t ix = 0; ix < grid.side(); ++ix)
        for (std::int64_t iy = 0; iy < grid.side(); ++iy) {
            const std::uint32_t m = grid.at(ix, iy);
            if (m >= static_cast<std::uint32_t>(r)) {
                cells.push_back(Cell{ix, iy, 1.0});
                out.multiplicity.push_back(m);
            }
        }
    out.cells = CellSet(grid.scale(), std::move(cells));
    return out;
}

RichPointSet rich_points(const TubeFamily& family, int r, int threads) {
    return rich_points(accumulate(family, threads), r);
}

std::vector<IncidenceReport> incidence_sweep(const TubeFamily& family, double s, const std::vector<int>& rs, int threads) {
    if (!(s > 0.0 && s <= 1.0)) throw std::invalid_argument("s must lie in (0, 1]");
    const MultiplicityGrid grid = accumulate(family, threads);
    const auto at_least = grid.cells_at_least();
    const double c_kt = katz_tao_constant(family.duals(), 1.0);
    const double c_reg = regularity_constant(family.slope_indices(), family.k, s);
    const double delta = std::ldexp(1.0, -family.k);
    std::vector<IncidenceReport> out;
    for (int r : rs) {
        if (r < 1) throw std::invalid_argument("richness threshold must be at least 1");
        IncidenceReport rep;
        rep.r = r;
        rep.c_kt = c_kt;
        rep.c_reg = c_reg;
        rep.rich_cells = static_cast<std::size_t>(r) < at_least.size() ? at_least[r] : 0;
        if (static_cast<std::size_t>(r) <= family.size() && !family.tubes.empty()) {
            const double bound = std::pow(c_kt * c_reg, 1.0 / s) * static_cast<double>(family.size()) / delta;
            rep.ratio = static_cast<double>(rep.rich_cells) * std::pow(static_cast<double>(r), (s + 1.0) / s) / bound;
        }
        out.push_back(rep);
    }
    return out;
}

IncidenceReport verify_incidence_bound(const TubeFamily& family, double s, int r, int threads) {
    return incidence_sweep(family, s, {r}, threads).front();
}

SharpExample sharp_example(double s, int k, int r) {
    if (!(s >= 0.5 && s < 1.0)) throw std::invalid_argument("need 1/2 <= s < 1");
    if (k < 1 || k > 14) throw std::invalid_argument("need 1 <= k <= 14");
    if (r < 1) throw std::invalid_argument("need r >= 1");
    const double delta = std::ldexp(1.0, -k);
    SharpExample ex;
    ex.s = s;
    ex.r = r;
    ex.width_cells = std::max<std::int64_t>(1, std::llround(std::pow(delta, s - 1.0)));
    const std::int64_t side = std::int64_t{1} << k;
    if (static_cast<std::int64_t>(r) * ex.width_cells > 2 * side)
        throw std::invalid_argument("r * delta^s <= 2 violated: the slopes do not fit in [-1, 1)");
    ex.paper_range = r <= std::pow(delta, -s) && std::pow(delta, -s * (1.0 - s)) >= std::pow(r, 1.0 - s);

    ex.family.k = k;
    const std::int64_t w = ex.width_cells;
    const double pw = 1.0 / r;  // P width
    struct Thick {
        std::int64_t slope, base;
    };
    std::vector<Thick> thick;
    for (int i = 0; i < r; ++i) {
        const std::int64_t slope = (i - r / 2) * w;
        // lowest intercept index keeping the lower edge below P at x = 1/r
        const double need = std::min(0.0, -(slope * delta) * pw);
        const std::int64_t base = static_cast<std::int64_t>(std::floor(need / delta));
        thick.push_back({slope, base});
        ex.slopes.push_back(slope);
    }
    // P = [0, 1/r] x [0, c w delta] must lie in every thick tube; check both ends
    auto contains_p = [&](double c) {
        const double top = c * w * delta;
        for (const Thick& t : thick) {
            for (double x : {0.0, pw}) {
                const double lower = t.slope * delta * x + t.base * delta;
                const double upper = (t.slope + 1) * delta * x + (t.base + w) * delta;
                if (lower > 0.0 || !(upper > top)) return false;
            }
        }
        return true;
    };
    ex.c = 0.25;
    while (!contains_p(ex.c)) {
        ex.c /= 2.0;
        if (ex.c < 1e-6) throw std::runtime_error("no admissible height for P");
    }
    for (const Thick& t : thick)
        for (std::int64_t j = 0; j < w; ++j) ex.family.tubes.push_back(make_dyadic_tube(k, t.slope, t.base + j));
    ex.p_cells.k = k;
    ex.p_cells.ix0 = 0;
    ex.p_cells.ix1 = static_cast<std::int64_t>(std::floor(pw / delta)) + 1;
    ex.p_cells.iy0 = 0;
    ex.p_cells.iy1 = static_cast<std::int64_t>(std::floor(ex.c * w)) + 1;
    ex.p_cells.ix1 = std::min(ex.p_cells.ix1, side);
    ex.predicted_size = r * std::pow(delta, s - 1.0);
    return ex;
}

TubeFamily cantor_katz_tao_family(double s, int k, std::uint64_t seed) {
    TubeFamily fam;
    fam.k = k;
    const std::int64_t side = std::int64_t{1} << k;
    const std::int64_t step = std::max<std::int64_t>(1, std::llround(std::pow(2.0, k * s)));  // delta^(1-s) in cells
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::int64_t> offset(0, step - 1);
    for (std::int64_t a : cantor_grid_set(s, k)) {
        const std::int64_t b0 = offset(rng);
        for (std::int64_t b = b0; b < side; b += step) fam.tubes.push_back(make_dyadic_tube(k, a, b));
    }
    return fam;
}

}  // namespace tubelab
