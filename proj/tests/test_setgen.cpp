#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "tubelab/config.hpp"
#include "tubelab/oracle.hpp"
#include "tubelab/setgen.hpp"

using namespace tubelab;

namespace {

std::vector<double> to_doubles(const std::vector<Rational>& v) {
    std::vector<double> out;
    for (const Rational& q : v) out.push_back(q.to_double());
    return out;
}

MoranSpec uniform_spec(std::int64_t n, Rational c, std::vector<Rational> offsets, int depth) {
    MoranSpec s;
    s.name = "test";
    for (int k = 0; k < depth; ++k) s.levels.push_back(MoranLevel{n, c, offsets, {}});
    return s;
}

}  // namespace

TEST_CASE("rule evaluator and config parsing") {
    std::map<std::string, Rational> vars{{"k", Rational(3)}, {"N", Rational(8)}};
    CHECK(eval_rule("2^k", vars) == Rational(8));
    CHECK(eval_rule("2^(-3k)", vars) == Rational(1, 512));
    CHECK(eval_rule("N^(-3)", vars) == Rational(1, 512));
    CHECK(eval_rule("(1 - 1/3) / 2", vars) == Rational(1, 3));
    CHECK(eval_rule("-2/6", vars) == Rational(-1, 3));
    CHECK_THROWS(eval_rule("2^(1/2)", vars));
    CHECK_THROWS(eval_rule("q + 1", vars));
    CHECK_THROWS(eval_rule("1/0", vars));

    std::stringstream ss("# comment\n[moran]\nname = demo\nn_k = 2\nc_k = 1/4  # quarter\noffsets = endpoints\n[run]\nkind=dims\n");
    const Config cfg = Config::parse(ss);
    CHECK(cfg.get_or("moran", "c_k", "") == "1/4");
    CHECK(cfg.get_or("run", "kind", "") == "dims");
    const MoranRule rule = MoranRule::from_config(cfg);
    const MoranSpec spec = rule.expand(3);
    CHECK(spec.levels[2].c == Rational(1, 4));
    CHECK(spec.levels[0].offsets[1] == Rational(3, 4));
    std::stringstream bad("[x]\nnot a pair\n");
    CHECK_THROWS(Config::parse(bad));
}

TEST_CASE("build_moran examples") {
    const MoranSet mt = build_moran(middle_thirds_rule().expand(1), 1);
    REQUIRE(mt.generations[1].size() == 2);
    CHECK(mt.generations[1][0] == RationalInterval{Rational(-1, 2), Rational(-1, 6)});
    CHECK(mt.generations[1][1] == RationalInterval{Rational(1, 6), Rational(1, 2)});

    const MoranSet a = build_moran(theorem_a_rule(4, 50).expand(1), 1);
    CHECK(a.generations[1].size() == 4);
    for (const auto& iv : a.generations[1]) CHECK(iv.hi - iv.lo == Rational(1, 64));

    const MoranSet b = build_moran(theorem_b_rule(50).expand(3), 3);
    for (int k = 1; k <= 3; ++k) {
        CHECK(static_cast<std::int64_t>(b.generations[k].size()) == (std::int64_t{1} << (k * (k + 1) / 2)));
        CHECK(b.generation_length(k) == pow(Rational(2), -3 * k * (k + 1) / 2));
    }
}

TEST_CASE("build_moran reports the level with overlapping children") {
    MoranSpec s = uniform_spec(2, Rational(1, 3), {Rational(0), Rational(2, 3)}, 2);
    s.levels[1].offsets = {Rational(0), Rational(1, 4)};
    try {
        build_moran(s, 2);
        FAIL("expected an error");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("level 2") != std::string::npos);
    }
}

TEST_CASE("generation lengths, nesting and midpoints are exact") {
    for (const MoranSet& set : {build_moran(middle_thirds_rule().expand(6), 6), build_moran(theorem_b_rule(50).expand(3), 3),
                                build_moran(theorem_a_rule(4, 50).expand(3), 3)}) {
        Rational len(1);
        for (int k = 1; k <= set.depth; ++k) {
            len *= set.spec.levels[k - 1].c;
            for (std::size_t i = 0; i < set.generations[k].size(); ++i) {
                const auto& iv = set.generations[k][i];
                CHECK(iv.hi - iv.lo == len);
                const auto& p = set.generations[k - 1][set.parents[k][i]];
                CHECK(p.lo <= iv.lo);
                CHECK(iv.hi <= p.hi);
            }
        }
        const auto deepest = set.endpoints(set.depth);
        const std::set<Rational> deep(deepest.begin(), deepest.end());
        std::set<Rational> mids(set.midpoints.begin(), set.midpoints.end());
        for (int k = 1; k <= set.depth; ++k)
            for (const auto& gap : set.removed[k]) {
                CHECK(mids.count((gap.lo + gap.hi) / Rational(2)) == 1);
                CHECK(deep.count(gap.lo) == 1);  // end-point condition keeps gap ends in C_K
                CHECK(deep.count(gap.hi) == 1);
            }
    }
}

TEST_CASE("check_gcs examples") {
    const GcsReport mt = check_gcs(build_moran(middle_thirds_rule().expand(8), 8));
    CHECK(mt.endpoint_ok);
    for (int k = 1; k <= 8; ++k) CHECK(mt.hrww_ratio[k - 1] == doctest::Approx(1.0 / k).epsilon(1e-15));
    const GcsReport b = check_gcs(build_moran(theorem_b_rule(50).expand(3), 3));
    CHECK(b.endpoint_ok);
    for (int k = 1; k <= 3; ++k) CHECK(b.hrww_ratio[k - 1] == doctest::Approx(2.0 / (k + 1)).epsilon(1e-15));
    const GcsReport off = check_gcs(build_moran(uniform_spec(2, Rational(1, 3), {Rational(0), Rational(1, 2)}, 2), 2));
    CHECK_FALSE(off.endpoint_ok);
}

TEST_CASE("box_dim_ratio examples") {
    const MoranSet mt = build_moran(middle_thirds_rule().expand(10), 10);
    for (int K = 1; K <= 10; ++K) CHECK(box_dim_ratio(mt, 1, K) == std::log(2.0) / std::log(3.0));
    const MoranSet b = build_moran(theorem_b_rule(50).expand(3), 3);
    for (int lo = 1; lo <= 3; ++lo) CHECK(box_dim_ratio(b, lo, 3) == 1.0 / 3.0);
    const MoranSet q = build_moran(uniform_spec(2, Rational(1, 4), flush_offsets(2, Rational(1, 4)), 5), 5);
    CHECK(box_dim_ratio(q, 1, 5) == 0.5);
    CHECK_THROWS_AS(box_dim_ratio(q, 1, 6), std::out_of_range);
}

TEST_CASE("qa_profile examples") {
    CHECK(qa_profile({0.5}, 0.5, std::ldexp(1.0, -10)).alpha == 0.0);
    CHECK_THROWS_AS(qa_profile({0.5}, 0.5, 1.0), std::domain_error);

    std::vector<double> grid;
    const int k = 16;
    for (int i = 0; i <= (1 << k); ++i) grid.push_back(std::ldexp(static_cast<double>(i), -k));
    // counting dyadic r-intervals gives R/r exactly; closed r-balls hold three grid points
    CHECK(qa_profile(grid, 0.5, std::ldexp(1.0, -k), QaCount::dyadic).alpha == doctest::Approx(1.0).epsilon(0.05));
    const double ball = qa_profile(grid, 0.5, std::ldexp(1.0, -k), QaCount::ball).alpha;
    CHECK(ball > 0.85);
    CHECK(ball < 0.95);
}

TEST_CASE("qa_profile of middle thirds endpoints") {
    const MoranSet mt = build_moran(middle_thirds_rule().expand(12), 12);
    const QaProfile p = qa_profile(to_doubles(mt.endpoints(12)), 0.25, std::pow(3.0, -12));
    CHECK(std::fabs(p.alpha - std::log(2.0) / std::log(3.0)) <= 0.08);
}

TEST_CASE("qa_profile is non-increasing in gamma") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> pts;
        for (int i = 0; i < 300; ++i) pts.push_back(std::pow(u(rng), 3.0));
        double prev = 2.0;
        for (double g : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            const double a = qa_profile(pts, g, std::ldexp(1.0, -14)).alpha;
            CHECK(a <= prev);
            prev = a;
        }
    }
}

TEST_CASE("regularity constant examples") {
    CHECK(regularity_constant({0}, 8, 0.5) == 1.0);
    std::vector<std::int64_t> grid;
    for (int i = 0; i < 256; ++i) grid.push_back(i);
    CHECK(regularity_constant(grid, 8, 1.0) <= 2.0);
    double worst = 0.0;
    for (int K : {4, 6, 8}) {
        const int k = static_cast<int>(std::ceil(K * std::log2(3.0)));
        const MoranSet mt = build_moran(middle_thirds_rule().expand(K), K);
        std::vector<std::int64_t> pts;
        for (const Rational& q : mt.endpoints(K)) pts.push_back(static_cast<std::int64_t>(std::floor(std::ldexp(q.to_double(), k))));
        worst = std::max(worst, regularity_constant(pts, k, std::log(2.0) / std::log(3.0)));
    }
    CHECK(worst <= 4.0);
}

TEST_CASE("Katz-Tao and Frostman constant examples") {
    CHECK(katz_tao_constant(std::vector<DyadicSquare>{{6, 3, 3}}, 1.0) == 1.0);
    std::vector<DyadicSquare> line, net;
    for (int i = 0; i < 64; ++i) line.push_back({6, i, 0});
    CHECK(katz_tao_constant(line, 1.0) <= 3.0);
    for (int i = 0; i < 32; ++i)
        for (int j = 0; j < 32; ++j) net.push_back({5, i, j});
    // the radius-delta ball about a cell centre meets the 3 x 3 block around it
    CHECK(katz_tao_constant(net, 2.0) == 9.0);
    CHECK(frostman_constant(net, 2.0) == 9.0);
    CHECK(katz_tao_constant(std::vector<double>{0.25}, 8, 1.0) == 1.0);
}

TEST_CASE("constant estimators agree with brute-force oracles") {
    std::mt19937_64 rng(123);
    for (int trial = 0; trial < 50; ++trial) {
        const int k = 5 + trial % 4;
        const std::int64_t m = std::int64_t{1} << k;
        std::uniform_int_distribution<std::int64_t> idx(0, m - 1);
        std::uniform_int_distribution<int> size(1, 200);
        const int n = size(rng);
        const double s = 0.3 + 0.7 * (trial % 7) / 6.0;
        std::vector<std::int64_t> pts;
        std::vector<double> line;
        std::vector<DyadicSquare> sq;
        for (int i = 0; i < n; ++i) {
            pts.push_back(idx(rng) - m / 2);
            line.push_back(std::ldexp(static_cast<double>(idx(rng)), -k));
            sq.push_back({k, idx(rng), idx(rng)});
        }
        std::sort(sq.begin(), sq.end());
        sq.erase(std::unique(sq.begin(), sq.end()), sq.end());
        CHECK(regularity_constant(pts, k, s) == oracle::regularity_constant(pts, k, s));
        CHECK(katz_tao_constant(sq, s) == oracle::katz_tao_constant(sq, s));
        CHECK(frostman_constant(sq, s) == oracle::frostman_constant(sq, s));
        CHECK(katz_tao_constant(line, k, s) == oracle::katz_tao_constant(line, k, s));
        CHECK(frostman_constant(line, k, s) == oracle::frostman_constant(line, k, s));
    }
}

TEST_CASE("sum_multiplicity examples") {
    auto iv = [](Rational a, Rational b) { return RationalInterval{a, b}; };
    CHECK(sum_multiplicity({iv(0, 1)}, 2) == 1);
    CHECK(sum_multiplicity({iv(0, 1), iv(10, 11)}, 2) == 2);
    CHECK(sum_multiplicity({iv(0, Rational(1, 100)), iv(1, Rational(101, 100)), iv(2, Rational(201, 100))}, 2) == 3);
    CHECK_THROWS_AS(sum_multiplicity({iv(0, 1), iv(2, 3)}, 30, 1000), std::length_error);
}

TEST_CASE("sum_multiplicity agrees with tuple enumeration") {
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<int> pos(0, 40), len(0, 6), cnt(1, 6), mm(1, 3);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<RationalInterval> fam;
        std::vector<std::pair<double, double>> flat;
        const int n = cnt(rng);
        for (int i = 0; i < n; ++i) {
            const int a = pos(rng), l = len(rng);
            fam.push_back({Rational(a, 8), Rational(a + l, 8)});
            flat.emplace_back(a / 8.0, (a + l) / 8.0);
        }
        const int m = mm(rng);
        CHECK(sum_multiplicity(fam, m) == oracle::sum_multiplicity(flat, m));
    }
}

TEST_CASE("interval family search") {
    const IntervalFamily two = search_interval_family(2, 3, 10);
    REQUIRE(two.intervals.size() == 2);
    CHECK(two.intervals[0] == RationalInterval{Rational(-1, 2), Rational(-1, 2) + Rational(1, 8)});
    CHECK(two.intervals[1] == RationalInterval{Rational(1, 2) - Rational(1, 8), Rational(1, 2)});
    CHECK(two.g == sum_multiplicity(two.intervals, 3));

    std::int64_t prev_g = INT64_MAX;
    for (std::int64_t budget : {1, 10, 40, 160}) {
        const IntervalFamily f = search_interval_family(4, 3, budget);
        CHECK(f.g <= prev_g);
        prev_g = f.g;
        CHECK(f.g == sum_multiplicity(f.intervals, 3));
        const Rational len(1, 64);
        CHECK(f.intervals.front().lo == Rational(-1, 2));
        CHECK(f.intervals.back().hi == Rational(1, 2));
        for (std::size_t i = 0; i < f.intervals.size(); ++i) {
            CHECK(f.intervals[i].hi - f.intervals[i].lo == len);
            if (i > 0) CHECK(f.intervals[i].lo - f.intervals[i - 1].hi >= Rational(3, 2) * len);
        }
    }
    CHECK(prev_g <= 6 * two.g);
    CHECK(grid_sum_multiplicity({0, 5, 14}, 2) == sum_multiplicity({{Rational(0), Rational(2)}, {Rational(5), Rational(7)}, {Rational(14), Rational(16)}}, 2));
    CHECK_THROWS(search_interval_family(1, 3, 10));
}

TEST_CASE("Moran product bound") {
    const MoranSet mt = build_moran(middle_thirds_rule().expand(3), 3);
    const auto levels = moran_level_multiplicities(mt, 2, 3);
    CHECK(levels == std::vector<std::int64_t>{3, 3, 3});
    CHECK(moran_sum_multiplicity_bound(mt, 2, 3) == 27);
    CHECK(moran_sum_multiplicity_bound(mt, 1, 3) == 1);
    CHECK(moran_sum_multiplicity_bound(mt, 2, 3) >= sum_multiplicity(mt.generations[3], 2));
    CHECK(moran_sum_multiplicity_bound(mt, 3, 2) >= sum_multiplicity(mt.generations[2], 3));

    const MoranSet a = build_moran(theorem_a_rule(4, 60).expand(2), 2);
    const IntervalFamily fam = search_interval_family(4, 3, 60);
    CHECK(moran_sum_multiplicity_bound(a, 3, 2) == fam.g * fam.g);
    CHECK(moran_sum_multiplicity_bound(a, 3, 2) >= sum_multiplicity(a.generations[2], 3));

    MoranSpec mixed = uniform_spec(2, Rational(1, 3), {Rational(0), Rational(2, 3)}, 2);
    mixed.levels[1].parent_offsets = {{Rational(0), Rational(2, 3)}, {Rational(0), Rational(1, 2)}};
    const MoranSet ms = build_moran(mixed, 2);
    CHECK_THROWS_AS(moran_sum_multiplicity_bound(ms, 2, 2), std::domain_error);
}

TEST_CASE("Cantor grid sets and rational export") {
    const auto pts = cantor_grid_set(std::log(2.0) / std::log(3.0), 10);
    CHECK(pts.size() == 64);  // 3^-6 >= 2^-10 > 3^-7
    CHECK(pts.front() == -512);
    for (std::int64_t p : pts) {
        CHECK(p >= -512);
        CHECK(p < 512);
    }
    const MoranSet mt = build_moran(middle_thirds_rule().expand(2), 2);
    std::stringstream ss;
    write_rationals(ss, mt.endpoints(2));
    CHECK(ss.str().substr(0, 5) == "-1/2\n");
    CHECK(read_rationals(ss) == mt.endpoints(2));
}
