#include "tubelab/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>
#include <stdexcept>

#include "tubelab/domains.hpp"
#include "tubelab/incidence.hpp"
#include "tubelab/maximal.hpp"
#include "tubelab/oracle.hpp"
#include "tubelab/setgen.hpp"

namespace tubelab {

namespace {

// Tolerances and limits of the acceptance checks.
constexpr double kDimTolerance = 1e-12;          // exact dimension ratios, double rounding only
constexpr double kQaTolerance = 0.08;            // qA profile of middle thirds
constexpr double kAffineTolerance = 0.03;        // affine dimension fits
constexpr double kEnergyCeiling = 0.1;           // energy exponent at 2^-40
constexpr double kSharpSizeFactor = 4.0;         // |T| against r delta^-1/2
constexpr double kSharpRatioFloor = 1.0 / 64;    // incidence ratio of the sharp example
constexpr double kUpperExponent = 0.2;           // rho <= delta^-0.2
constexpr double kBushSlack = 0.1;               // beta(p = 1) >= s - 0.1
constexpr double kDualCeiling = 1.15;            // dual-sum exponent
constexpr double kPolylogCeiling = 0.1;          // beta(p = 2)
constexpr double kDiscFactor = 1.0 / 8;          // Kakeya disc lower bound constant
constexpr double kOracleRelative = 1e-12;        // norms against the cell-by-cell oracle
constexpr std::int64_t kFamilyGrowth = 4;        // g3(N = 16) <= 4 g3(N = 4)

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof buf, format, args);
    va_end(args);
    return buf;
}

class Runner {
public:
    explicit Runner(const SuiteOptions& options) : options_(options) {}

    // body returns true on pass and writes its evidence into detail
    void check(const std::string& id, const std::string& title, double limit_seconds,
               const std::function<bool(std::string&)>& body) {
        CheckResult r;
        r.id = id;
        r.title = title;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            r.pass = body(r.detail);
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail = std::string("exception: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (limit_seconds > 0 && r.seconds > limit_seconds) {
            r.pass = false;
            r.detail += fmt("; runtime %.1f s over the %.0f s limit", r.seconds, limit_seconds);
        }
        if (options_.progress) *options_.progress << format_result(r) << '\n' << std::flush;
        results_.push_back(std::move(r));
    }

    std::vector<CheckResult> take() { return std::move(results_); }
    const SuiteOptions& options() const { return options_; }

private:
    SuiteOptions options_;
    std::vector<CheckResult> results_;
};

const double kCantorS = std::log(2.0) / std::log(3.0);

TubeFamily random_family(std::mt19937_64& rng, int k, int count) {
    const std::int64_t m = std::int64_t{1} << k;
    std::uniform_int_distribution<std::int64_t> slope(-m, m - 1), icpt(-m, 2 * m);
    TubeFamily f;
    f.k = k;
    for (int i = 0; i < count; ++i) f.tubes.push_back(make_dyadic_tube(k, slope(rng), icpt(rng)));
    return f;
}

GridFunction random_function(std::mt19937_64& rng, int k) {
    GridFunction f(GridBox::covering(k, -0.75, 1.75, -1.0, 2.0));
    std::uniform_real_distribution<double> v(0.0, 1.0);
    const GridBox& b = f.box();
    for (std::int64_t ix = b.ix0; ix < b.ix1; ++ix)
        for (std::int64_t iy = b.iy0; iy < b.iy1; ++iy)
            if (rng() % 3 == 0) f.set(ix, iy, v(rng));
    return f;
}

DirectionSet random_directions(std::mt19937_64& rng, int k, int count) {
    const std::int64_t m = std::int64_t{1} << k;
    std::uniform_int_distribution<std::int64_t> t(-m, m - 1);
    std::vector<std::int64_t> s;
    for (int i = 0; i < count; ++i) s.push_back(t(rng));
    return DirectionSet::explicit_set(k, s);
}

std::vector<Rational> dyadic_range(int lo, int hi) {
    std::vector<Rational> out;
    for (int j = lo; j <= hi; ++j) out.push_back(dyadic_delta(j));
    return out;
}

// ---------------------------------------------------------------- oracles

void oracle_checks(Runner& run) {
    const std::uint64_t seed = run.options().seed;
    const int k = 6;
    const std::int64_t m = std::int64_t{1} << k;

    run.check("O1", "rich_points multiplicities match tube-by-cell enumeration", 0, [&](std::string& d) {
        std::mt19937_64 rng(seed);
        std::int64_t cells = 0;
        for (int trial = 0; trial < 50; ++trial) {
            const auto f = random_family(rng, k, 1 + static_cast<int>(rng() % 64));
            const auto slow = oracle::multiplicities(f.tubes, k);
            const auto grid = accumulate(f, run.options().threads);
            for (std::int64_t ix = 0; ix < m; ++ix)
                for (std::int64_t iy = 0; iy < m; ++iy, ++cells)
                    if (grid.at(ix, iy) != slow[static_cast<std::size_t>(ix * m + iy)]) {
                        d = fmt("trial %d cell (%lld, %lld) differs", trial, (long long)ix, (long long)iy);
                        return false;
                    }
            const int r = 1 + static_cast<int>(rng() % 4);
            const auto rich = rich_points(grid, r);
            std::size_t expected = 0;
            for (auto v : slow) expected += v >= static_cast<std::uint32_t>(r);
            if (rich.cells.size() != expected) {
                d = fmt("trial %d: %zu %d-rich cells, oracle %zu", trial, rich.cells.size(), r, expected);
                return false;
            }
        }
        d = fmt("50 trials, %lld cells compared", (long long)cells);
        return true;
    });

    run.check("O2", "tube rasterization matches the exact cell test", 0, [&](std::string& d) {
        std::mt19937_64 rng(seed + 1);
        std::uniform_int_distribution<std::int64_t> slope(-m, m - 1), icpt(-m, 2 * m);
        const GridBox box = GridBox::covering(k, -0.5, 1.5, -1.0, 2.0);
        std::int64_t cells = 0;
        for (int trial = 0; trial < 50; ++trial) {
            const auto t = make_dyadic_tube(k, slope(rng), icpt(rng));
            const auto raster = rasterize_tube(t, k, box);
            for (std::int64_t ix = box.ix0; ix < box.ix1; ++ix)
                for (std::int64_t iy = box.iy0; iy < box.iy1; ++iy, ++cells)
                    if (raster.contains(ix, iy) != oracle::cell_meets_tube(t, k, ix, iy)) {
                        d = fmt("trial %d cell (%lld, %lld) differs", trial, (long long)ix, (long long)iy);
                        return false;
                    }
        }
        d = fmt("50 tubes, %lld cells compared", (long long)cells);
        return true;
    });

    run.check("O3", "constant estimators match brute force", 0, [&](std::string& d) {
        std::mt19937_64 rng(seed + 2);
        for (int trial = 0; trial < 50; ++trial) {
            std::uniform_int_distribution<std::int64_t> idx(0, m - 1);
            const int n = 1 + static_cast<int>(rng() % 64);
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
            const double r = std::ldexp(1.0, -static_cast<int>(1 + rng() % k));
            const bool ok = regularity_constant(pts, k, s) == oracle::regularity_constant(pts, k, s) &&
                            katz_tao_constant(sq, s) == oracle::katz_tao_constant(sq, s) &&
                            frostman_constant(sq, s) == oracle::frostman_constant(sq, s) &&
                            katz_tao_constant(line, k, s) == oracle::katz_tao_constant(line, k, s) &&
                            frostman_constant(line, k, s) == oracle::frostman_constant(line, k, s) &&
                            covering_number(line, r) == oracle::covering_number_1d(line, r);
            if (!ok) {
                d = fmt("trial %d differs", trial);
                return false;
            }
        }
        d = "50 trials: regularity, Katz-Tao, Frostman (1-D and 2-D), covering numbers";
        return true;
    });

    run.check("O4", "sum multiplicities match tuple enumeration", 0, [&](std::string& d) {
        std::mt19937_64 rng(seed + 3);
        std::uniform_int_distribution<int> pos(0, 40), len(0, 6), cnt(1, 6), mm(1, 3);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<RationalInterval> fam;
            std::vector<std::pair<double, double>> flat;
            const int n = cnt(rng);
            for (int i = 0; i < n; ++i) {
                const int a = pos(rng), l = len(rng);
                fam.push_back({Rational(a, 8), Rational(a + l, 8)});
                flat.emplace_back(a / 8.0, (a + l) / 8.0);
            }
            const int mult = mm(rng);
            if (sum_multiplicity(fam, mult) != oracle::sum_multiplicity(flat, mult)) {
                d = fmt("trial %d differs", trial);
                return false;
            }
        }
        d = "50 trials";
        return true;
    });

    run.check("O5", "Nikodym tube averages match cell-by-cell sums", 0, [&](std::string& d) {
        std::mt19937_64 rng(seed + 4);
        double worst = 0.0;
        for (int trial = 0; trial < 50; ++trial) {
            const auto f = random_function(rng, k);
            const auto dirs = random_directions(rng, k, 1 + static_cast<int>(rng() % 6));
            const auto fast = nikodym_apply(f, dirs, run.options().threads);
            const auto slow = oracle::nikodym_apply(f, dirs);
            for (std::int64_t ix = 0; ix < m; ++ix)
                for (std::int64_t iy = 0; iy < m; ++iy) {
                    const double want = slow[static_cast<std::size_t>(ix * m + iy)];
                    const double err = std::fabs(fast.at(ix, iy) - want);
                    if (err > kOracleRelative * want) {
                        d = fmt("trial %d cell (%lld, %lld): %.17g vs %.17g", trial, (long long)ix, (long long)iy,
                                fast.at(ix, iy), want);
                        return false;
                    }
                    if (want > 0) worst = std::max(worst, err / want);
                }
        }
        d = fmt("50 trials, worst relative error %.2e", worst);
        return true;
    });
}

// ---------------------------------------------------------------- invariants

void invariant_checks(Runner& run) {
    const std::uint64_t seed = run.options().seed;

    run.check("I1", "multiplicity conservation, monotone rich sets, thread independence", 0, [&](std::string& d) {
        std::mt19937_64 rng(seed);
        for (int trial = 0; trial < 10; ++trial) {
            const auto f = random_family(rng, 7, 100);
            const auto grid = accumulate(f, 1);
            std::uint64_t expected = 0;
            for (const auto& t : f.tubes) expected += rasterize_tube(t, 7, GridBox::unit_square(7)).size();
            if (grid.total() != expected) return d = "conservation", false;
            for (int r = 1; r < 6; ++r) {
                const auto lo = rich_points(grid, r), hi = rich_points(grid, r + 1);
                for (const auto& c : hi.cells.cells())
                    if (!lo.cells.contains(c.ix, c.iy)) return d = "rich sets not nested", false;
            }
            const auto split = accumulate(f, std::max(2, run.options().threads));
            for (std::int64_t ix = 0; ix < 128; ++ix)
                for (std::int64_t iy = 0; iy < 128; ++iy)
                    if (split.at(ix, iy) != grid.at(ix, iy)) return d = "threaded counts differ", false;
        }
        d = "10 random families at delta = 2^-7";
        return true;
    });

    run.check("I2", "Nikodym operator is sublinear, monotone in the direction set, bounded by sup f", 0,
              [&](std::string& d) {
                  std::mt19937_64 rng(seed + 1);
                  const int k = 6;
                  for (int trial = 0; trial < 5; ++trial) {
                      const auto f = random_function(rng, k), g = random_function(rng, k);
                      GridFunction sum(f.box());
                      for (std::int64_t ix = f.box().ix0; ix < f.box().ix1; ++ix)
                          for (std::int64_t iy = f.box().iy0; iy < f.box().iy1; ++iy)
                              sum.set(ix, iy, f.at(ix, iy) + g.at(ix, iy));
                      const auto dirs = random_directions(rng, k, 6);
                      auto fewer = dirs;
                      fewer.slopes.resize(3);
                      const auto nf = nikodym_apply(f, dirs), ng = nikodym_apply(g, dirs), ns = nikodym_apply(sum, dirs);
                      const auto nsmall = nikodym_apply(f, fewer);
                      for (std::int64_t ix = 0; ix < 64; ++ix)
                          for (std::int64_t iy = 0; iy < 64; ++iy) {
                              if (ns.at(ix, iy) > nf.at(ix, iy) + ng.at(ix, iy) + 1e-12) return d = "sublinearity", false;
                              if (nsmall.at(ix, iy) > nf.at(ix, iy) + 1e-15) return d = "monotonicity", false;
                              if (nf.at(ix, iy) > f.max() + 1e-12) return d = "L-infinity bound", false;
                          }
                  }
                  d = "5 random pairs at delta = 2^-6";
                  return true;
              });

    run.check("I3", "domain boundaries are convex and caps are valid", 0, [&](std::string& d) {
        struct Case {
            const char* name;
            MoranRule rule;
            int j;
        };
        std::size_t caps = 0;
        for (const auto& c : {Case{"middle thirds", middle_thirds_rule(), 18}, Case{"Theorem B", theorem_b_rule(), 20},
                              Case{"Theorem A", theorem_a_rule(8), 20}}) {
            const Rational delta = dyadic_delta(c.j);
            const auto dom = domain_for(c.rule, delta);
            if (!is_convex(dom)) return d = fmt("%s boundary not convex", c.name), false;
            const auto cover = cap_cover(dom, delta);
            for (const auto& cap : cover.caps) {
                const auto chk = check_cap(dom, cap);
                if (!chk.supporting || !(chk.max_distance < delta.to_long_double()))
                    return d = fmt("%s: invalid cap over [%s, %s]", c.name, cap.t_lo.str().c_str(), cap.t_hi.str().c_str()),
                           false;
            }
            const auto count = cap_count(dom, delta);
            if (count.upper < count.lower) return d = fmt("%s: upper below lower", c.name), false;
            caps += cover.size();
        }
        d = fmt("%zu caps checked", caps);
        return true;
    });

    run.check("I4", "slope set and Cantor set have matching qA profiles", 0, [&](std::string& d) {
        std::string out;
        // deepest generation each construction reaches with at most ~10^3 intervals
        const std::pair<MoranRule, int> cases[] = {{middle_thirds_rule(), 8}, {theorem_b_rule(), 3}, {theorem_a_rule(8), 2}};
        for (const auto& [rule, depth] : cases) {
            const auto dom = GcsDomain(build_moran(rule.expand(depth), depth));
            std::vector<double> slopes, cantor;
            for (const Rational& q : slope_set(dom)) slopes.push_back(q.to_double() / 2);
            for (const Rational& q : dom.cantor().endpoints(depth)) cantor.push_back(q.to_double());
            const double delta = dom.cantor().generation_length(depth).to_double();
            const double a = qa_profile(slopes, 0.25, delta).alpha, c = qa_profile(cantor, 0.25, delta).alpha;
            out += fmt("%s%s %.3f vs %.3f", out.empty() ? "" : "; ", rule.name.c_str(), a, c);
            if (std::abs(a - c) > kQaTolerance) return d = out, false;
        }
        d = out;
        return true;
    });

    run.check("I5", "interval-family multiplicity never increases with budget", 0, [&](std::string& d) {
        std::int64_t prev = INT64_MAX;
        std::string out;
        for (std::int64_t budget : {1, 10, 50, 200}) {
            const auto f = search_interval_family(8, 3, budget, seed);
            out += fmt("%s%lld", out.empty() ? "g = " : ", ", (long long)f.g);
            if (f.g > prev || f.g != sum_multiplicity(f.intervals, 3)) return d = out, false;
            prev = f.g;
        }
        d = out;
        return true;
    });
}

// ---------------------------------------------------------------- paper checks

void paper_checks(Runner& run) {
    const int threads = run.options().threads;

    run.check("1", "slope set of the middle-thirds domain equals 2(C u C_mid) u {0}, K = 1..8", 1.0,
              [&](std::string& d) {
                  const auto set = build_moran(middle_thirds_rule().expand(8), 8);
                  std::size_t total = 0;
                  for (int k = 1; k <= 8; ++k) {
                      const auto got = slope_set(GcsDomain(set, k));
                      if (got != expected_slope_set(set, k)) return d = fmt("mismatch at K = %d", k), false;
                      total = got.size();
                  }
                  d = fmt("exact rational equality, %zu slopes at K = 8", total);
                  return true;
              });

    run.check("2", "dimension formulas and middle-thirds qA profile", 10.0, [&](std::string& d) {
        const auto mt = build_moran(middle_thirds_rule().expand(16), 16);
        const double want = std::log(2.0) / std::log(3.0);
        double worst = 0.0;
        for (int k = 1; k <= 16; ++k) worst = std::max(worst, std::abs(box_dim_ratio(mt, 1, k) - want));
        const auto b = build_moran(theorem_b_rule().expand(4), 4);
        double worst_b = 0.0;
        for (int k = 1; k <= 4; ++k) worst_b = std::max(worst_b, std::abs(box_dim_ratio(b, 1, k) - 1.0 / 3));
        std::vector<double> pts;
        for (const Rational& q : mt.endpoints(16)) pts.push_back(q.to_double());
        const double qa = qa_profile(pts, 0.25, std::pow(3.0, -16)).alpha;
        d = fmt("middle thirds |ratio - log2/log3| <= %.1e; Theorem B |ratio - 1/3| <= %.1e; qA(0.25) = %.4f vs %.4f",
                worst, worst_b, qa, want);
        return worst <= kDimTolerance && worst_b <= kDimTolerance && std::abs(qa - want) <= kQaTolerance;
    });

    run.check("3", "affine dimension fits over delta = 2^-8..2^-24", 30.0, [&](std::string& d) {
        const auto deltas = dyadic_range(8, 24);
        struct Case {
            const char* name;
            MoranRule rule;
            double target;
        };
        bool ok = true;
        for (const auto& c : {Case{"middle thirds", middle_thirds_rule(), 0.5 * kCantorS},
                              Case{"Theorem B", theorem_b_rule(), 1.0 / 6}, Case{"Theorem A N=8", theorem_a_rule(8), 1.0 / 6}}) {
            const double beta = affine_dim_estimate(domain_for(c.rule, deltas.back()), deltas).fit.beta;
            const bool pass = std::abs(beta - c.target) <= kAffineTolerance;
            ok = ok && pass;
            d += fmt("%s%s %.4f vs %.4f%s", d.empty() ? "" : "; ", c.name, beta, c.target, pass ? "" : " (out of tolerance)");
        }
        return ok;
    });

    run.check("4", "Theorem B additive energy, m = 3", 60.0, [&](std::string& d) {
        double last = INFINITY, at_40 = 0.0;
        bool decreasing = true;
        for (int j : {12, 20, 28, 40}) {
            const Rational delta = dyadic_delta(j);
            const auto e = additive_energy_estimate(domain_for(theorem_b_rule(), delta), delta, 3);
            d += fmt("%s2^-%d: %.4f (K=%d, M1=%.0Lf%s)", d.empty() ? "" : "; ", j, e.energy_exponent, e.level, e.m1,
                     e.product_bound ? ", product bound" : "");
            decreasing = decreasing && e.energy_exponent < last;
            last = e.energy_exponent;
            at_40 = e.energy_exponent;
        }
        d += fmt("; decreasing: %s; at 2^-40 %.4f vs ceiling %.2f", decreasing ? "yes" : "no", at_40, kEnergyCeiling);
        return decreasing && at_40 <= kEnergyCeiling;
    });

    run.check("5", "sharp example, s = 1/2, delta = 2^-10, r = 4, 16, 64", 120.0, [&](std::string& d) {
        const int k = 10;
        const double delta = std::ldexp(1.0, -k);
        bool ok = true;
        for (int r : {4, 16, 64}) {
            const auto ex = sharp_example(0.5, k, r);
            const double predicted = r / std::sqrt(delta);
            const double size = static_cast<double>(ex.family.size());
            const auto grid = accumulate(ex.family, threads);
            bool rich = true;
            for (std::int64_t ix = ex.p_cells.ix0; ix < ex.p_cells.ix1 && rich; ++ix)
                for (std::int64_t iy = ex.p_cells.iy0; iy < ex.p_cells.iy1; ++iy)
                    if (grid.at(ix, iy) < static_cast<std::uint32_t>(r)) {
                        rich = false;
                        break;
                    }
            const double ratio = verify_incidence_bound(ex.family, 0.5, r, threads).ratio;
            const bool pass = size >= predicted / kSharpSizeFactor && size <= predicted * kSharpSizeFactor && rich &&
                              ratio >= kSharpRatioFloor;
            ok = ok && pass;
            d += fmt("%sr=%d |T|=%.0f (r delta^-1/2 = %.0f) P r-rich: %s rho=%.4f", d.empty() ? "" : "; ", r, size,
                     predicted, rich ? "yes" : "no", ratio);
        }
        return ok;
    });

    run.check("6", "rho <= delta^-0.2 for 20 Cantor-slope Katz-Tao families", 600.0, [&](std::string& d) {
        const double slopes[3] = {kCantorS, 0.5, 0.7};
        double worst_ratio = 0.0;
        int failures = 0;
        std::string worst_case;
        for (int family = 0; family < 20; ++family) {
            const double s = slopes[family % 3];
            for (int k : {8, 10}) {
                const auto f = cantor_katz_tao_family(s, k, run.options().seed + static_cast<std::uint64_t>(family));
                std::vector<int> rs;
                for (int r = 1; r <= static_cast<int>(f.size()); r *= 2) rs.push_back(r);
                const double limit = std::pow(std::ldexp(1.0, -k), -kUpperExponent);
                for (const auto& rep : incidence_sweep(f, s, rs, threads)) {
                    if (rep.ratio > limit) ++failures;
                    if (rep.ratio / limit > worst_ratio) {
                        worst_ratio = rep.ratio / limit;
                        worst_case = fmt("s=%.3f delta=2^-%d r=%d rho=%.3f limit=%.3f", s, k, rep.r, rep.ratio, limit);
                    }
                }
            }
        }
        d = fmt("%d (family, delta, r) triples over the limit; worst %s", failures, worst_case.c_str());
        return failures == 0;
    });

    run.check("7", "Nikodym exponents for Cantor directions (s = log2/log3), delta = 2^-5..2^-9", 900.0,
              [&](std::string& d) {
                  std::vector<std::pair<double, double>> bush1, dual, bush2;
                  for (int k = 5; k <= 9; ++k) {
                      const double delta = std::ldexp(1.0, -k);
                      const auto dirs = DirectionSet::cantor(kCantorS, k);
                      const auto bush = bush_construction(dirs, 0.0, 1.0);
                      const auto f = GridFunction::indicator(GridBox::unit_square(k), bush.core);
                      const auto out = nikodym_apply(f, dirs, threads);
                      bush1.emplace_back(delta, out.lp_norm(1) / f.lp_norm(1));
                      bush2.emplace_back(delta, out.lp_norm(2) / f.lp_norm(2));
                      dual.emplace_back(delta, dual_sum_norm(adversarial_assignment(dirs, 2.0), k, 1 + 1 / kCantorS).norm);
                  }
                  const double a = exponent_fit(bush1).beta, b = exponent_fit(dual).beta, c = exponent_fit(bush2).beta;
                  d = fmt("(a) p=1 bush beta %.3f >= %.3f; (b) dual-sum exponent %.3f <= %.2f; (c) p=2 bush beta %.3f <= %.2f",
                          a, kCantorS - kBushSlack, b, kDualCeiling, c, kPolylogCeiling);
                  return a >= kCantorS - kBushSlack && b <= kDualCeiling && c <= kPolylogCeiling;
              });

    run.check("8", "Kakeya disc lower bound and tube-sum bound, delta = 2^-6..2^-9", 600.0, [&](std::string& d) {
        const double s = kCantorS, p = 1 + s;
        bool ok = true;
        double worst_disc = INFINITY, worst_tube = 0.0;
        for (int k = 6; k <= 9; ++k) {
            const double delta = std::ldexp(1.0, -k);
            const auto dirs = DirectionSet::cantor(s, k);
            NormOptions o;
            o.op = MaximalOperator::kakeya;
            o.s = s;
            o.threads = threads;
            const auto disc = GridFunction::disc(GridBox::covering(k, -0.25, 0.25, -0.25, 0.25), 0.0, 0.0, delta);
            const double ratio = norm_ratio(disc, dirs, p, o);
            const double floor = kDiscFactor * std::pow(delta, 1 - 2 / p);
            const auto ts = tube_sum_norm(bush_family(dirs), 1 + 1 / s, s);
            const double log3 = std::pow(std::log(1 / delta), 3);
            ok = ok && ratio >= floor && ts.ratio <= log3;
            worst_disc = std::min(worst_disc, ratio / floor);
            worst_tube = std::max(worst_tube, ts.ratio / log3);
        }
        d = fmt("min disc ratio / floor %.3f (>= 1); max tube-sum ratio / log^3 %.4f (<= 1)", worst_disc, worst_tube);
        return ok;
    });

    run.check("9", "oracle suite: delta = 2^-6, <= 64 tubes, 50 trials", 120.0, [&](std::string& d) {
        SuiteOptions inner = run.options();
        inner.progress = nullptr;
        Runner sub(inner);
        oracle_checks(sub);
        int passed = 0;
        std::string failed;
        const auto results = sub.take();
        for (const auto& r : results) {
            if (r.pass) ++passed;
            else failed += " " + r.id + " (" + r.detail + ")";
        }
        d = fmt("%d/%zu oracle checks pass", passed, results.size()) + failed;
        return passed == static_cast<int>(results.size());
    });

    run.check("10", "interval-family search, m = 3, N = 4, 8, 16", 300.0, [&](std::string& d) {
        bool ok = true;
        std::int64_t g4 = 0, g16 = 0;
        for (std::int64_t n : {4, 8, 16}) {
            std::int64_t prev = INT64_MAX;
            std::string gs;
            for (std::int64_t budget : {1, 10, 50, 200}) {
                const auto f = search_interval_family(n, 3, budget, run.options().seed);
                const Rational len(1, n * n * n);
                bool shape = static_cast<std::int64_t>(f.intervals.size()) == n &&
                             f.intervals.front().lo == Rational(-1, 2) && f.intervals.back().hi == Rational(1, 2);
                for (std::size_t i = 0; i < f.intervals.size() && shape; ++i) {
                    shape = f.intervals[i].hi - f.intervals[i].lo == len;
                    if (i > 0) shape = shape && f.intervals[i].lo - f.intervals[i - 1].hi >= Rational(3, 2) * len;
                }
                const bool certified = f.g == sum_multiplicity(f.intervals, 3);
                ok = ok && shape && certified && f.g <= prev;
                prev = f.g;
                gs += fmt("%s%lld", gs.empty() ? "" : "/", (long long)f.g);
            }
            if (n == 4) g4 = prev;
            if (n == 16) g16 = prev;
            d += fmt("%sN=%lld g3 by budget 1/10/50/200: %s", d.empty() ? "" : "; ", (long long)n, gs.c_str());
        }
        d += fmt("; g3(16) = %lld <= %lld * g3(4) = %lld", (long long)g16, (long long)kFamilyGrowth,
                 (long long)(kFamilyGrowth * g4));
        return ok && g16 <= kFamilyGrowth * g4;
    });
}

}  // namespace

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"oracles", "invariants", "paper-checks"};
    return names;
}

std::vector<CheckResult> run_suite(const std::string& name, const SuiteOptions& options) {
    Runner run(options);
    if (name == "oracles") oracle_checks(run);
    else if (name == "invariants") invariant_checks(run);
    else if (name == "paper-checks") paper_checks(run);
    else throw std::invalid_argument("unknown suite '" + name + "' (expected oracles, invariants or paper-checks)");
    return run.take();
}

std::string format_result(const CheckResult& r) {
    return fmt("%s %s: %s (%.2f s) | %s", r.pass ? "PASS" : "FAIL", r.id.c_str(), r.title.c_str(), r.seconds,
               r.detail.c_str());
}

}  // namespace tubelab
