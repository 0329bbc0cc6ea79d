#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "tubelab/incidence.hpp"
#include "tubelab/oracle.hpp"
#include "tubelab/setgen.hpp"

using namespace tubelab;

namespace {

TubeFamily random_family(std::mt19937_64& rng, int k, int count) {
    const std::int64_t m = std::int64_t{1} << k;
    std::uniform_int_distribution<std::int64_t> slope(-m, m - 1), icpt(-m, 2 * m);
    TubeFamily f;
    f.k = k;
    for (int i = 0; i < count; ++i) f.tubes.push_back(make_dyadic_tube(k, slope(rng), icpt(rng)));
    return f;
}

}  // namespace

TEST_CASE("rich_points single tube is its raster") {
    TubeFamily f;
    f.k = 6;
    f.tubes.push_back(make_dyadic_tube(6, 10, 20));
    const auto rich = rich_points(f, 1);
    const auto raster = rasterize_tube(f.tubes[0], 6, GridBox::unit_square(6));
    REQUIRE(rich.cells.size() == raster.size());
    for (std::size_t i = 0; i < raster.size(); ++i) {
        CHECK(rich.cells.cells()[i].ix == raster.cells()[i].ix);
        CHECK(rich.cells.cells()[i].iy == raster.cells()[i].iy);
        CHECK(rich.multiplicity[i] == 1);
    }
}

TEST_CASE("two disjoint parallel tubes have no 2-rich cell") {
    TubeFamily f;
    f.k = 6;
    f.tubes.push_back(make_dyadic_tube(6, 0, 10));
    f.tubes.push_back(make_dyadic_tube(6, 0, 30));
    CHECK(rich_points(f, 2).cells.empty());
}

TEST_CASE("tubes through the origin share the origin cell") {
    TubeFamily f;
    f.k = 7;
    const int count = 9;
    for (int i = 0; i < count; ++i) f.tubes.push_back(make_dyadic_tube(7, 10 * i - 40, 0));
    const auto rich = rich_points(f, count);
    CHECK_FALSE(rich.cells.empty());
    CHECK(rich.cells.contains(0, 0));
}

TEST_CASE("rich_points threshold below one is rejected") {
    TubeFamily f;
    f.k = 4;
    CHECK_THROWS_AS(rich_points(f, 0), std::invalid_argument);
}

TEST_CASE("multiplicity conservation and monotonicity in r") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        const auto f = random_family(rng, 7, 80);
        const auto grid = accumulate(f);
        std::uint64_t expected = 0;
        for (const auto& t : f.tubes) expected += rasterize_tube(t, 7, GridBox::unit_square(7)).size();
        CHECK(grid.total() == expected);
        std::uint64_t sum = 0;
        for (auto m : rich_points(grid, 1).multiplicity) sum += m;
        CHECK(sum == expected);
        for (int r = 1; r < 6; ++r) {
            const auto lo = rich_points(grid, r), hi = rich_points(grid, r + 1);
            for (const auto& c : hi.cells.cells()) CHECK(lo.cells.contains(c.ix, c.iy));
        }
    }
}

TEST_CASE("rich_points matches the membership oracle cell for cell") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const auto f = random_family(rng, 6, 1 + static_cast<int>(rng() % 64));
        const auto slow = oracle::multiplicities(f.tubes, 6);
        const auto grid = accumulate(f);
        for (std::int64_t ix = 0; ix < 64; ++ix)
            for (std::int64_t iy = 0; iy < 64; ++iy) REQUIRE(grid.at(ix, iy) == slow[ix * 64 + iy]);
    }
}

TEST_CASE("threaded accumulation is bit identical") {
    std::mt19937_64 rng(3);
    const auto f = random_family(rng, 8, 300);
    const auto one = accumulate(f, 1), four = accumulate(f, 4);
    for (std::int64_t ix = 0; ix < 256; ++ix)
        for (std::int64_t iy = 0; iy < 256; ++iy) REQUIRE(one.at(ix, iy) == four.at(ix, iy));
}

TEST_CASE("16-bit counters widen on overflow") {
    TubeFamily f;
    f.k = 1;
    for (int i = 0; i < 70000; ++i) f.tubes.push_back(make_dyadic_tube(1, 0, 0));
    const auto grid = accumulate(f);
    CHECK(grid.widened());
    CHECK(grid.at(0, 0) == 70000);
    const auto split = accumulate(f, 3);
    CHECK(split.at(0, 0) == 70000);
}

TEST_CASE("r = 1 ratio is at most one") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 10; ++trial) {
        const auto f = random_family(rng, 7, 60);
        CHECK(verify_incidence_bound(f, 0.5, 1).ratio <= 1.0);
        CHECK(verify_incidence_bound(f, 1.0, 1).ratio <= 1.0);
    }
}

TEST_CASE("r beyond the family size gives ratio zero") {
    std::mt19937_64 rng(9);
    const auto f = random_family(rng, 6, 10);
    CHECK(verify_incidence_bound(f, 0.5, 11).ratio == 0.0);
}

TEST_CASE("sharp example at s = 1/2, delta = 2^-10") {
    const double delta = std::ldexp(1.0, -10);
    for (int r : {4, 16, 64}) {
        const auto ex = sharp_example(0.5, 10, r);
        const double predicted = r * std::pow(delta, -0.5);
        const double size = static_cast<double>(ex.family.size());
        CHECK(size >= predicted / 4);
        CHECK(size <= predicted * 4);

        const auto grid = accumulate(ex.family);
        std::int64_t p_count = 0;
        for (std::int64_t ix = ex.p_cells.ix0; ix < ex.p_cells.ix1; ++ix)
            for (std::int64_t iy = ex.p_cells.iy0; iy < ex.p_cells.iy1; ++iy) {
                CHECK(grid.at(ix, iy) >= static_cast<std::uint32_t>(r));
                ++p_count;
            }
        const auto rich = rich_points(grid, r);
        CHECK(static_cast<double>(rich.cells.size()) >= std::pow(delta, 0.5 - 2.0) / r / 64.0);
        CHECK(p_count > 0);

        CHECK(regularity_constant(ex.family.slope_indices(), 10, 0.5) <= 8.0 * std::pow(r, 0.5));
        CHECK(verify_incidence_bound(ex.family, 0.5, r).ratio >= 1.0 / 64.0);
    }
}

TEST_CASE("sharp example P lies inside every tube point-wise") {
    const auto ex = sharp_example(0.5, 8, 8);
    const double delta = std::ldexp(1.0, -8);
    const double height = ex.c * ex.width_cells * delta;
    // sample corners and midpoints of P; each must lie in at least r tubes
    for (double x : {0.0, 1.0 / 16, 1.0 / 8})
        for (double y : {0.0, height / 2, height * 0.999}) {
            int hits = 0;
            for (const auto& t : ex.family.tubes) hits += tube_point_test(t, Point{x, y});
            CHECK(hits >= ex.r);
        }
}

TEST_CASE("sharp example parameter checks") {
    CHECK_THROWS_AS(sharp_example(0.3, 10, 4), std::invalid_argument);
    CHECK_THROWS_AS(sharp_example(1.0, 10, 4), std::invalid_argument);
    CHECK_THROWS_AS(sharp_example(0.5, 10, 0), std::invalid_argument);
    CHECK_THROWS_AS(sharp_example(0.5, 10, 65), std::invalid_argument);
    CHECK(sharp_example(0.5, 10, 16).paper_range);
    CHECK_FALSE(sharp_example(0.5, 10, 64).paper_range);
}

TEST_CASE("Cantor Katz-Tao families") {
    const auto f = cantor_katz_tao_family(0.5, 8, 1);
    f.validate();
    // 16 slopes, 256 / 16 intercepts each
    CHECK(f.size() == 16 * 16);
    CHECK(f.slope_indices().front() >= -128);
    CHECK(f.slope_indices().back() < 128);
    const auto g = cantor_katz_tao_family(0.5, 8, 1);
    CHECK(f.tubes == g.tubes);
    // the ratio stays bounded as delta shrinks: the worst r at 2^-10 is within
    // a factor 2 of the worst r at 2^-8
    for (double s : {std::log(2.0) / std::log(3.0), 0.5, 0.7}) {
        double worst[2] = {0.0, 0.0};
        for (int which = 0; which < 2; ++which) {
            const int k = which == 0 ? 8 : 10;
            const auto reps = incidence_sweep(cantor_katz_tao_family(s, k, 4), s, {1, 2, 4, 8, 16, 32});
            CHECK(reps[0].ratio <= 1.5);
            for (const auto& rep : reps) worst[which] = std::max(worst[which], rep.ratio);
        }
        CHECK(worst[1] <= 2.0 * worst[0]);
    }
}
