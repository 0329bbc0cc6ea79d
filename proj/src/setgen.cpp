#include "tubelab/setgen.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace tubelab {

namespace {

std::string level_name(std::size_t k) { return "level " + std::to_string(k); }

void check_layout(const std::vector<Rational>& offsets, std::int64_t n, const Rational& c, std::size_t k) {
    if (static_cast<std::int64_t>(offsets.size()) != n)
        throw std::invalid_argument(level_name(k) + ": expected " + std::to_string(n) + " offsets, got " +
                                    std::to_string(offsets.size()));
    if (offsets.front() < Rational(0)) throw std::invalid_argument(level_name(k) + ": offset below 0");
    if (offsets.back() + c > Rational(1)) throw std::invalid_argument(level_name(k) + ": child leaves the parent");
    for (std::size_t i = 1; i < offsets.size(); ++i)
        if (!(offsets[i] > offsets[i - 1] + c))
            throw std::invalid_argument(level_name(k) + ": children " + std::to_string(i - 1) + " and " +
                                        std::to_string(i) + " are not disjoint");
}

}  // namespace

void MoranSpec::validate() const {
    for (std::size_t k = 1; k <= levels.size(); ++k) {
        const MoranLevel& lv = levels[k - 1];
        if (lv.n < 2) throw std::invalid_argument(level_name(k) + ": n_k must be at least 2");
        if (!(lv.c > Rational(0)) || !(lv.c < Rational(1)))
            throw std::invalid_argument(level_name(k) + ": c_k must lie in (0, 1)");
        if (!(Rational(lv.n) * lv.c < Rational(1))) throw std::invalid_argument(level_name(k) + ": n_k c_k must be < 1");
        if (lv.parent_offsets.empty()) check_layout(lv.offsets, lv.n, lv.c, k);
        for (const auto& o : lv.parent_offsets) check_layout(o, lv.n, lv.c, k);
    }
}

std::vector<Rational> flush_offsets(std::int64_t n, const Rational& c) {
    std::vector<Rational> out;
    const Rational step = (Rational(1) - c) / Rational(n - 1);
    for (std::int64_t j = 0; j < n; ++j) out.push_back(step * Rational(j));
    return out;
}

namespace {

struct SearchOptions {
    int m = 3;
    std::int64_t budget = 200;
    std::uint64_t seed = 1;
};

SearchOptions parse_search(const std::string& text) {
    SearchOptions o;
    const auto colon = text.find(':');
    if (colon == std::string::npos) return o;
    for (const std::string& item : split_list(text.substr(colon + 1))) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("search option '" + item + "' needs key=value");
        const std::string key = trim_copy(item.substr(0, eq));
        const std::string val = trim_copy(item.substr(eq + 1));
        if (key == "m") o.m = std::stoi(val);
        else if (key == "budget") o.budget = std::stoll(val);
        else if (key == "seed") o.seed = std::stoull(val);
        else throw std::invalid_argument("unknown search option '" + key + "'");
    }
    return o;
}

bool starts_with(const std::string& s, const std::string& p) { return s.rfind(p, 0) == 0; }

}  // namespace

MoranSpec MoranRule::expand(int depth) const {
    MoranSpec spec;
    spec.name = name;
    std::map<std::pair<std::int64_t, int>, IntervalFamily> searched;
    const std::string mode = trim_copy(offsets);
    for (int k = 1; k <= depth; ++k) {
        auto vars = params;
        vars["k"] = Rational(k);
        MoranLevel lv;
        const Rational n = eval_rule(n_rule, vars);
        if (n.den() != 1) throw std::invalid_argument(level_name(k) + ": n_k = " + n.str() + " is not an integer");
        lv.n = n.num();
        lv.c = eval_rule(c_rule, vars);
        if (mode == "endpoints") {
            if (lv.n < 2) throw std::invalid_argument(level_name(k) + ": n_k must be at least 2");
            lv.offsets = flush_offsets(lv.n, lv.c);
        } else if (starts_with(mode, "search")) {
            const SearchOptions o = parse_search(mode);
            if (!(lv.c == pow(Rational(lv.n), -o.m)))
                throw std::invalid_argument(level_name(k) + ": searched layouts need c_k = n_k^-m");
            auto key = std::make_pair(lv.n, o.m);
            auto it = searched.find(key);
            if (it == searched.end()) it = searched.emplace(key, search_interval_family(lv.n, o.m, o.budget, o.seed)).first;
            const Rational unit = Rational(1) / (Rational(2) * pow(Rational(lv.n), o.m));
            for (std::int64_t p : it->second.half_units) lv.offsets.push_back(unit * Rational(p));
        } else {
            const std::string body = starts_with(mode, "list:") ? mode.substr(5) : mode;
            for (const std::string& item : split_list(body)) lv.offsets.push_back(eval_rule(item, vars));
        }
        spec.levels.push_back(std::move(lv));
    }
    spec.validate();
    return spec;
}

MoranRule MoranRule::from_config(const Config& cfg, const std::string& section) {
    MoranRule rule;
    rule.name = cfg.get_or(section, "name", rule.name);
    rule.n_rule = cfg.get(section, "n_k").value_or(cfg.get_or(section, "n", rule.n_rule));
    rule.c_rule = cfg.get(section, "c_k").value_or(cfg.get_or(section, "c", rule.c_rule));
    rule.offsets = cfg.get_or(section, "offsets", rule.offsets);
    if (auto p = cfg.get(section, "params")) {
        for (const std::string& item : split_list(*p)) {
            const auto eq = item.find('=');
            if (eq == std::string::npos) throw std::invalid_argument("param '" + item + "' needs name=value");
            rule.params[trim_copy(item.substr(0, eq))] = eval_rule(item.substr(eq + 1), rule.params);
        }
    }
    return rule;
}

MoranRule middle_thirds_rule() {
    MoranRule r;
    r.name = "middle-thirds";
    return r;
}

MoranRule theorem_a_rule(std::int64_t n, std::int64_t budget) {
    MoranRule r;
    r.name = "theorem-a-N" + std::to_string(n);
    r.n_rule = "N";
    r.c_rule = "N^(-3)";
    r.offsets = "search: m=3, budget=" + std::to_string(budget) + ", seed=1";
    r.params["N"] = Rational(n);
    return r;
}

MoranRule theorem_b_rule(std::int64_t budget) {
    MoranRule r;
    r.name = "theorem-b";
    r.n_rule = "2^k";
    r.c_rule = "2^(-3k)";
    r.offsets = "search: m=3, budget=" + std::to_string(budget) + ", seed=1";
    return r;
}

Rational MoranSet::generation_length(int k) const {
    if (k < 0 || k > depth) throw std::out_of_range("generation beyond built depth");
    return generations[k].front().hi - generations[k].front().lo;
}

std::vector<Rational> MoranSet::endpoints(int k) const {
    if (k < 0 || k > depth) throw std::out_of_range("generation beyond built depth");
    std::vector<Rational> out;
    for (const auto& iv : generations[k]) {
        out.push_back(iv.lo);
        out.push_back(iv.hi);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

MoranSet build_moran(const MoranSpec& spec, int depth) {
    if (depth < 0) throw std::invalid_argument("depth must be non-negative");
    if (depth > spec.available_depth())
        throw std::invalid_argument("spec defines " + std::to_string(spec.available_depth()) + " levels, depth " +
                                    std::to_string(depth) + " requested");
    spec.validate();
    MoranSet set;
    set.spec = spec;
    set.depth = depth;
    set.generations.push_back({{Rational(-1, 2), Rational(1, 2)}});
    set.parents.emplace_back();
    set.removed.emplace_back();
    for (int k = 1; k <= depth; ++k) {
        const MoranLevel& lv = spec.levels[k - 1];
        std::vector<RationalInterval> gen;
        std::vector<std::size_t> par;
        std::vector<RationalInterval> gaps;
        const auto& prev = set.generations[k - 1];
        for (std::size_t pi = 0; pi < prev.size(); ++pi) {
            const RationalInterval& p = prev[pi];
            const Rational len = p.hi - p.lo;
            const Rational child = lv.c * len;
            Rational cursor = p.lo;
            for (const Rational& off : lv.offsets_for(pi)) {
                const Rational lo = p.lo + off * len;
                if (lo > cursor) gaps.push_back({cursor, lo});
                gen.push_back({lo, lo + child});
                par.push_back(pi);
                cursor = lo + child;
            }
            if (p.hi > cursor) gaps.push_back({cursor, p.hi});
        }
        for (const auto& g : gaps) set.midpoints.push_back((g.lo + g.hi) / Rational(2));
        set.generations.push_back(std::move(gen));
        set.parents.push_back(std::move(par));
        set.removed.push_back(std::move(gaps));
    }
    std::sort(set.midpoints.begin(), set.midpoints.end());
    return set;
}

namespace {

// A positive rational as a product of integer atoms with integer exponents.
// Atoms are primes below 10^6 plus any cofactor left after trial division.
using Factored = std::map<std::int64_t, std::int64_t>;

void add_factors(Factored& f, std::int64_t v, std::int64_t sign) {
    for (std::int64_t d = 2; d <= 1'000'000 && d * d <= v; ++d) {
        while (v % d == 0) {
            f[d] += sign;
            v /= d;
        }
    }
    if (v > 1) f[v] += sign;
}

void add_rational(Factored& f, const Rational& q, std::int64_t sign) {
    add_factors(f, q.num(), sign);
    add_factors(f, q.den(), -sign);
}

double log_of(const Factored& f) {
    double s = 0.0;
    for (const auto& [p, e] : f) s += static_cast<double>(e) * std::log(static_cast<double>(p));
    return s;
}

double log_ratio(Factored a, Factored b) {
    std::erase_if(a, [](const auto& kv) { return kv.second == 0; });
    std::erase_if(b, [](const auto& kv) { return kv.second == 0; });
    if (b.empty()) throw std::domain_error("log ratio with zero denominator");
    if (a.empty()) return 0.0;
    if (a.size() == b.size()) {
        bool proportional = true;
        const std::int64_t a0 = a.begin()->second, b0 = b.begin()->second;
        for (auto ia = a.begin(), ib = b.begin(); ia != a.end(); ++ia, ++ib)
            if (ia->first != ib->first || static_cast<i128>(ia->second) * b0 != static_cast<i128>(ib->second) * a0)
                proportional = false;
        if (proportional) {
            const std::int64_t g = std::gcd(a0, b0);
            return static_cast<double>(a0 / g) / static_cast<double>(b0 / g);
        }
    }
    if (a.size() == 1 && b.size() == 1) {
        const std::int64_t g = std::gcd(a.begin()->second, b.begin()->second);
        const double q = static_cast<double>(a.begin()->second / g) / static_cast<double>(b.begin()->second / g);
        return q * (std::log(static_cast<double>(a.begin()->first)) / std::log(static_cast<double>(b.begin()->first)));
    }
    return log_of(a) / log_of(b);
}

}  // namespace

GcsReport check_gcs(const MoranSet& set) {
    GcsReport rep;
    rep.endpoint_ok = true;
    Factored prod;
    for (int k = 1; k <= set.depth; ++k) {
        const MoranLevel& lv = set.spec.levels[k - 1];
        const std::size_t parents = set.generations[k - 1].size();
        for (std::size_t p = 0; p < (lv.parent_offsets.empty() ? 1 : parents); ++p) {
            const auto& o = lv.offsets_for(p);
            if (!(o.front() == Rational(0)) || !(o.back() + lv.c == Rational(1))) rep.endpoint_ok = false;
        }
        Factored ck;
        add_rational(ck, lv.c, -1);  // log(1/c_k)
        add_rational(prod, lv.c, -1);
        rep.hrww_ratio.push_back(log_ratio(ck, prod));
    }
    return rep;
}

double box_dim_ratio(const MoranSet& set, int k_lo, int k_hi) {
    if (k_lo < 1 || k_lo > k_hi) throw std::invalid_argument("need 1 <= k_lo <= K");
    if (k_hi > set.depth) throw std::out_of_range("K beyond built depth");
    Factored num, den;
    for (int k = k_lo; k <= k_hi; ++k) {
        add_factors(num, set.spec.levels[k - 1].n, 1);
        add_rational(den, set.spec.levels[k - 1].c, -1);
    }
    return log_ratio(num, den);
}

QaProfile qa_profile(std::vector<double> points, double gamma, double delta, QaCount count) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0, 1)");
    if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in (0, 1]");
    if (points.empty()) throw std::invalid_argument("empty set");
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    int jmax = 0;
    while (std::ldexp(1.0, -(jmax + 1)) >= delta) ++jmax;
    QaProfile best;
    best.alpha = -1.0;
    best.method = count == QaCount::ball ? "dyadic windows and radii, closed-ball covering counts"
                                         : "dyadic windows and radii, dyadic-interval counts";
    for (int j = 1; j <= jmax; ++j) {
        const double r = std::ldexp(1.0, -j);
        for (int jb = 0; jb < j; ++jb) {
            if (jb > j * (1.0 - gamma) + 1e-12) continue;  // R >= r^(1-gamma)
            const double big = std::ldexp(1.0, -jb);
            std::int64_t most = 0, cur = 0;
            double window = std::nan(""), start = 0.0, cell = std::nan("");
            for (double x : points) {
                const double w = std::floor(std::ldexp(x, jb));
                if (w != window) {
                    window = w;
                    cur = 1;
                    start = x;
                    cell = std::floor(std::ldexp(x, j));
                } else if (count == QaCount::ball) {
                    if (x - start > 2.0 * r) {
                        ++cur;
                        start = x;
                    }
                } else {
                    const double c = std::floor(std::ldexp(x, j));
                    if (c != cell) {
                        ++cur;
                        cell = c;
                    }
                }
                most = std::max(most, cur);
            }
            ++best.pairs;
            const double alpha = std::log(static_cast<double>(most)) / std::log(big / r);
            if (alpha > best.alpha) {
                best.alpha = alpha;
                best.r = r;
                best.big_r = big;
            }
        }
    }
    if (best.pairs == 0) throw std::domain_error("scale range empty");
    return best;
}

double regularity_constant(std::vector<std::int64_t> points, int k, double s) {
    if (k < 0 || k > 40) throw std::invalid_argument("scale exponent out of range");
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    double best = 0.0;
    for (int jb = 0; jb <= k; ++jb) {
        const std::int64_t big = std::int64_t{1} << (k - jb);
        for (int j = jb; j <= k; ++j) {
            const std::int64_t small = std::int64_t{1} << (k - j);
            std::int64_t most = 0, cur = 0, window = 0, start = 0;
            for (std::size_t i = 0; i < points.size(); ++i) {
                const std::int64_t w = floor_div(points[i], big);
                if (i == 0 || w != window) {
                    window = w;
                    cur = 1;
                    start = points[i];
                } else if (points[i] - start > 2 * small) {
                    ++cur;
                    start = points[i];
                }
                most = std::max(most, cur);
            }
            best = std::max(best, static_cast<double>(most) / std::pow(static_cast<double>(big) / small, s));
        }
    }
    return best;
}

namespace {

double square_ratio(std::vector<DyadicSquare> sq, double exponent, bool frostman) {
    if (sq.empty()) return 0.0;
    const int k = sq.front().k;
    for (const auto& q : sq)
        if (q.k != k) throw std::invalid_argument("squares mix scales");
    std::sort(sq.begin(), sq.end());
    sq.erase(std::unique(sq.begin(), sq.end()), sq.end());
    const double d = std::ldexp(1.0, -k);
    std::vector<double> denom(k + 1);
    for (int j = 0; j <= k; ++j) {
        const double rho = std::ldexp(1.0, -j);
        denom[j] = frostman ? std::pow(rho, exponent) * static_cast<double>(sq.size()) : std::pow(rho / d, exponent);
    }
    // distances in half-cell units; radius index j has squared radius 4^(k-j+1)
    std::vector<std::int64_t> hist(k + 1);
    double best = 0.0;
    for (const DyadicSquare& c : sq) {
        std::fill(hist.begin(), hist.end(), 0);
        const std::int64_t cx = 2 * c.i + 1, cy = 2 * c.j + 1;
        for (const DyadicSquare& p : sq) {
            const std::int64_t dx = std::max({std::int64_t{0}, 2 * p.i - cx, cx - (2 * p.i + 2)});
            const std::int64_t dy = std::max({std::int64_t{0}, 2 * p.j - cy, cy - (2 * p.j + 2)});
            const std::int64_t dist2 = dx * dx + dy * dy;
            int e = 0;
            while (e <= k + 1 && (std::int64_t{1} << (2 * e)) < dist2) ++e;
            if (e > k + 1) continue;
            hist[std::min(k, k + 1 - e)]++;
        }
        std::int64_t cum = 0;
        for (int j = k; j >= 0; --j) {
            cum += hist[j];
            best = std::max(best, static_cast<double>(cum) / denom[j]);
        }
    }
    return best;
}

double line_ratio(std::vector<double> pts, int k, double exponent, bool frostman) {
    if (pts.empty()) return 0.0;
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const double d = std::ldexp(1.0, -k);
    const double total = static_cast<double>(covering_number(pts, d));
    double best = 0.0;
    for (double c : pts) {
        for (int j = 0; j <= k; ++j) {
            const double rho = std::ldexp(1.0, -j);
            auto lo = std::partition_point(pts.begin(), pts.end(), [&](double x) { return x < c && c - x > rho; });
            auto hi = std::partition_point(lo, pts.end(), [&](double x) { return x <= c || x - c <= rho; });
            std::int64_t count = 0;
            for (auto it = lo; it != hi;) {
                ++count;
                const double start = *it;
                while (it != hi && *it - start <= 2.0 * d) ++it;
            }
            const double denom = frostman ? std::pow(rho, exponent) * total : std::pow(rho / d, exponent);
            best = std::max(best, static_cast<double>(count) / denom);
        }
    }
    return best;
}

}  // namespace

double katz_tao_constant(const std::vector<DyadicSquare>& squares, double t) { return square_ratio(squares, t, false); }
double frostman_constant(const std::vector<DyadicSquare>& squares, double s) { return square_ratio(squares, s, true); }
double katz_tao_constant(const std::vector<double>& points, int k, double t) { return line_ratio(points, k, t, false); }
double frostman_constant(const std::vector<double>& points, int k, double s) { return line_ratio(points, k, s, true); }

std::int64_t sum_multiplicity(const std::vector<RationalInterval>& family, int m, std::int64_t cap, bool half_open) {
    if (family.empty()) throw std::invalid_argument("empty interval family");
    if (m < 1) throw std::invalid_argument("m must be at least 1");
    i128 tuples = 1;
    for (int i = 0; i < m; ++i) {
        tuples *= static_cast<i128>(family.size());
        if (tuples > cap)
            throw std::length_error("|F|^m exceeds the enumeration cap; use the per-level product bound");
    }
    i128 lcd = 1;
    for (const auto& iv : family) {
        for (const Rational& q : {iv.lo, iv.hi}) {
            lcd = lcd / std::gcd(static_cast<std::int64_t>(lcd % q.den()), q.den()) * q.den();
            if (lcd > (i128{1} << 60)) throw std::overflow_error("common denominator too large");
        }
    }
    std::vector<std::int64_t> lo, len;
    const i128 limit = (i128{1} << 62) / m;
    for (const auto& iv : family) {
        const i128 a = static_cast<i128>(iv.lo.num()) * (lcd / iv.lo.den());
        const i128 b = static_cast<i128>(iv.hi.num()) * (lcd / iv.hi.den());
        if (a > limit || a < -limit || b > limit || b < -limit) throw std::overflow_error("scaled endpoints too large");
        if (b < a) throw std::invalid_argument("interval with hi < lo");
        lo.push_back(static_cast<std::int64_t>(a));
        len.push_back(static_cast<std::int64_t>(b - a));
    }
    std::vector<std::int64_t> starts{0}, ends{0};
    for (int step = 0; step < m; ++step) {
        std::vector<std::int64_t> ns, ne;
        ns.reserve(starts.size() * lo.size());
        ne.reserve(starts.size() * lo.size());
        for (std::size_t t = 0; t < starts.size(); ++t)
            for (std::size_t i = 0; i < lo.size(); ++i) {
                ns.push_back(starts[t] + lo[i]);
                ne.push_back(ends[t] + lo[i] + len[i]);
            }
        starts = std::move(ns);
        ends = std::move(ne);
    }
    std::sort(starts.begin(), starts.end());
    std::sort(ends.begin(), ends.end());
    // at y = starts[i]: covering sums = #starts <= y minus #ends < y (closed)
    // or #ends <= y (half open)
    std::int64_t best = 0;
    std::size_t e = 0;
    for (std::size_t i = 0; i < starts.size(); ++i) {
        if (i + 1 < starts.size() && starts[i + 1] == starts[i]) continue;
        while (e < ends.size() && (ends[e] < starts[i] || (half_open && ends[e] == starts[i]))) ++e;
        best = std::max(best, static_cast<std::int64_t>(i + 1) - static_cast<std::int64_t>(e));
    }
    return best;
}

std::vector<std::int64_t> moran_level_multiplicities(const MoranSet& set, int m, int k_hi) {
    if (k_hi > set.depth) throw std::out_of_range("K beyond built depth");
    std::vector<std::int64_t> out;
    const std::vector<Rational>* last_offsets = nullptr;
    Rational last_c;
    for (int k = 1; k <= k_hi; ++k) {
        const MoranLevel& lv = set.spec.levels[k - 1];
        for (const auto& o : lv.parent_offsets)
            if (o != lv.parent_offsets.front())
                throw std::domain_error(level_name(k) + ": non-uniform child layouts, the product bound does not apply");
        const auto& offsets = lv.offsets_for(0);
        if (last_offsets && *last_offsets == offsets && last_c == lv.c) {
            out.push_back(out.back());
            continue;
        }
        std::vector<RationalInterval> fam;
        for (const Rational& o : offsets) fam.push_back({o, o + lv.c});
        out.push_back(sum_multiplicity(fam, m));
        last_offsets = &offsets;
        last_c = lv.c;
    }
    return out;
}

std::int64_t moran_sum_multiplicity_bound(const MoranSet& set, int m, int k_hi) {
    i128 prod = 1;
    for (std::int64_t g : moran_level_multiplicities(set, m, k_hi)) {
        prod *= g;
        if (prod > INT64_MAX) throw std::overflow_error("product bound exceeds 64 bits");
    }
    return static_cast<std::int64_t>(prod);
}

namespace {

struct GridScore {
    std::int64_t g = 0;
    std::int64_t ties = 0;  // number of y attaining g

    bool operator<(const GridScore& o) const { return g != o.g ? g < o.g : ties < o.ties; }
};

GridScore grid_score(const std::vector<std::int64_t>& positions, int m) {
    const std::int64_t top = *std::max_element(positions.begin(), positions.end());
    std::vector<std::int64_t> cnt{1};
    for (int step = 0; step < m; ++step) {
        std::vector<std::int64_t> next(cnt.size() + top, 0);
        for (std::size_t s = 0; s < cnt.size(); ++s) {
            if (cnt[s] == 0) continue;
            for (std::int64_t p : positions) next[s + p] += cnt[s];
        }
        cnt = std::move(next);
    }
    // sum intervals are [S, S + 2m]; y sees sums S in [y - 2m, y]
    const std::int64_t w = 2 * m;
    GridScore sc;
    std::int64_t run = 0;
    const std::int64_t n = static_cast<std::int64_t>(cnt.size());
    for (std::int64_t y = 0; y < n + w; ++y) {
        if (y < n) run += cnt[y];
        if (y - w - 1 >= 0 && y - w - 1 < n) run -= cnt[y - w - 1];
        if (run > sc.g) {
            sc.g = run;
            sc.ties = 1;
        } else if (run == sc.g) {
            ++sc.ties;
        }
    }
    return sc;
}

}  // namespace

std::int64_t grid_sum_multiplicity(const std::vector<std::int64_t>& positions, int m) {
    if (positions.empty()) throw std::invalid_argument("empty family");
    for (std::int64_t p : positions)
        if (p < 0) throw std::invalid_argument("grid positions must be non-negative");
    return grid_score(positions, m).g;
}

IntervalFamily search_interval_family(std::int64_t n, int m, std::int64_t budget, std::uint64_t seed) {
    if (m < 2 || n < 2) throw std::invalid_argument("need m >= 2 and N >= 2");
    i128 nm = 1;
    for (int i = 0; i < m; ++i) {
        nm *= n;
        if (nm > 100'000'000) throw std::invalid_argument("N^m too large for the grid search");
    }
    if (static_cast<i128>(n) * (m + 2) > 2 * nm)
        throw std::domain_error("infeasible geometry: N * N^-m * (m/2 + 1) > 1");
    const std::int64_t units = static_cast<std::int64_t>(2 * nm);  // grid step N^-m / 2
    const std::int64_t gap = m + 2;                                 // length 2 plus separation m
    const std::int64_t slack = units - 2 - (n - 1) * gap;
    budget = std::max<std::int64_t>(budget, 1);

    std::mt19937_64 rng(seed);
    auto positions = [&](const std::vector<std::int64_t>& excess) {
        std::vector<std::int64_t> p(n);
        for (std::int64_t i = 0; i < n; ++i) p[i] = i * gap + excess[i];
        return p;
    };
    auto finish = [&](std::vector<std::int64_t>& e) {
        e.front() = 0;
        e.back() = slack;
        std::sort(e.begin(), e.end());
    };

    std::vector<std::vector<std::int64_t>> seeds;
    {
        std::vector<std::int64_t> e(n);
        for (std::int64_t i = 0; i < n; ++i)
            e[i] = static_cast<std::int64_t>((static_cast<i128>(i) * slack * 2 + (n - 1)) / (2 * (n - 1)));
        seeds.push_back(e);
    }
    for (double alpha : {0.6180339887498949, 0.4142135623730951, 0.7320508075688772}) {
        // quadratic-residue style perturbation of the progression
        std::vector<std::int64_t> e(n);
        for (std::int64_t i = 0; i < n; ++i) {
            const double f = static_cast<double>(i) * static_cast<double>(i) * alpha;
            e[i] = static_cast<std::int64_t>(std::floor((f - std::floor(f)) * static_cast<double>(slack)));
        }
        finish(e);
        seeds.push_back(e);
    }

    std::vector<std::int64_t> best_e;
    GridScore best;
    std::int64_t evals = 0;
    auto consider = [&](const std::vector<std::int64_t>& e) {
        const GridScore sc = grid_score(positions(e), m);
        ++evals;
        if (best_e.empty() || sc < best) {
            best = sc;
            best_e = e;
        }
    };
    std::uniform_int_distribution<std::int64_t> any(0, slack);
    while (evals < budget) {
        if (evals < static_cast<std::int64_t>(seeds.size())) {
            consider(seeds[evals]);
        } else if (evals % 8 == 0 || n == 2) {
            std::vector<std::int64_t> e(n);
            for (auto& v : e) v = any(rng);
            finish(e);
            consider(e);
        } else {
            std::vector<std::int64_t> e = best_e;
            std::uniform_int_distribution<std::int64_t> pick(1, n - 2);
            const std::int64_t i = pick(rng);
            std::uniform_int_distribution<std::int64_t> move(e[i - 1], e[i + 1]);
            e[i] = move(rng);
            consider(e);
        }
    }

    IntervalFamily fam;
    fam.n = n;
    fam.m = m;
    fam.separated = true;
    fam.half_units = positions(best_e);
    fam.g = best.g;
    fam.evaluations = evals;
    for (std::int64_t p : fam.half_units) {
        const Rational lo = Rational(p, units) - Rational(1, 2);
        fam.intervals.push_back({lo, lo + Rational(2, units)});
    }
    return fam;
}

std::vector<std::int64_t> cantor_grid_set(double s, int k) {
    if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("Cantor dimension must lie in (0, 1)");
    const double c = std::pow(2.0, -1.0 / s);
    const double delta = std::ldexp(1.0, -k);
    std::vector<double> lefts{-0.5};
    double len = 1.0;
    while (len * c >= delta) {
        std::vector<double> next;
        next.reserve(lefts.size() * 2);
        for (double l : lefts) {
            next.push_back(l);
            next.push_back(l + len - len * c);
        }
        lefts = std::move(next);
        len *= c;
    }
    std::vector<std::int64_t> out;
    for (double l : lefts) out.push_back(static_cast<std::int64_t>(std::floor(std::ldexp(l, k))));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

void write_rationals(std::ostream& out, const std::vector<Rational>& values) {
    for (const Rational& q : values) out << q.str() << '\n';
}

std::vector<Rational> read_rationals(std::istream& in) {
    std::vector<Rational> out;
    std::string line;
    while (std::getline(in, line)) {
        line = trim_copy(line);
        if (line.empty() || line[0] == '#') continue;
        out.push_back(Rational::parse(line));
    }
    return out;
}

}  // namespace tubelab
