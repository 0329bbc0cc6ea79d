#include "tubelab/domains.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace tubelab {

namespace {

constexpr std::int64_t kSplitSteps = std::int64_t{1} << 20;

const Rational kHalf(1, 2);
const Rational kEighth(1, 8);

long double ld(const Rational& q) { return q.to_long_double(); }

long double piece_height(const BoundaryPiece& p, long double t) {
    if (!p.chord) return t * t - 0.125L;
    const long double a = ld(p.lo), b = ld(p.hi);
    return a * a - 0.125L + (a + b) * (t - a);
}

Rational piece_height(const BoundaryPiece& p, const Rational& t) {
    if (!p.chord) return t * t - kEighth;
    return p.lo * p.lo - kEighth + (p.lo + p.hi) * (t - p.lo);
}

// Compares (c_1 ... c_k)^2 against target for growing k and returns the
// largest k with product^2 >= target (strict: > target). Logs decide unless
// the two sides are within 1e-9, where the exact product is used.
int levels_above(const MoranSpec& spec, const Rational& target, bool strict) {
    if (!(target > Rational(0))) throw std::invalid_argument("delta must be positive");
    const long double log_target = std::log(ld(target));
    long double log_prod = 0;
    Rational prod(1);
    bool exact = true;
    int k = 0;
    for (const MoranLevel& lv : spec.levels) {
        log_prod += std::log(ld(lv.c));
        if (exact) {
            try {
                prod *= lv.c;
            } catch (const std::overflow_error&) {
                exact = false;
            }
        }
        const long double diff = 2 * log_prod - log_target;
        bool above;
        if (diff > 1e-9L) {
            above = true;
        } else if (diff < -1e-9L) {
            above = false;
        } else {
            if (!exact) throw std::overflow_error("scale comparison too close to decide in 64-bit rationals");
            const Rational sq = prod * prod;
            above = strict ? sq > target : sq >= target;
        }
        if (!above) return k;
        ++k;
    }
    throw std::out_of_range("spec '" + spec.name + "' has too few levels for delta " + target.str());
}

}  // namespace

GcsDomain::GcsDomain(const MoranSet& cantor, int depth) : cantor_(cantor) {
    if (depth < 0) depth = cantor.depth;
    if (depth > cantor.depth)
        throw std::out_of_range("domain depth " + std::to_string(depth) + " exceeds the built depth " +
                                std::to_string(cantor.depth));
    if (!check_gcs(cantor).endpoint_ok) throw std::invalid_argument("end-point condition violated");
    depth_ = depth;
    for (const auto& iv : cantor.generations[depth]) pieces_.push_back({iv.lo, iv.hi, false, 0});
    for (int k = 1; k <= depth; ++k)
        for (const auto& iv : cantor.removed[k]) pieces_.push_back({iv.lo, iv.hi, true, k});
    std::sort(pieces_.begin(), pieces_.end(), [](const BoundaryPiece& a, const BoundaryPiece& b) { return a.lo < b.lo; });
    for (const auto& p : pieces_) starts_.push_back(ld(p.lo));
}

GcsDomain GcsDomain::polygon(std::vector<Rational> parameters) {
    std::sort(parameters.begin(), parameters.end());
    parameters.erase(std::unique(parameters.begin(), parameters.end()), parameters.end());
    if (parameters.size() < 2 || parameters.front() != -kHalf || parameters.back() != kHalf)
        throw std::invalid_argument("polygon parameters must lie in [-1/2, 1/2] and contain both ends");
    GcsDomain d;
    d.finite_ = true;
    for (std::size_t i = 0; i + 1 < parameters.size(); ++i) d.pieces_.push_back({parameters[i], parameters[i + 1], true, 1});
    for (const auto& p : d.pieces_) d.starts_.push_back(ld(p.lo));
    return d;
}

GcsDomain GcsDomain::truncated(int depth) const {
    if (finite_) return *this;
    return GcsDomain(cantor_, depth);
}

std::size_t GcsDomain::piece_at(long double t) const {
    const auto it = std::upper_bound(starts_.begin(), starts_.end(), t);
    if (it == starts_.begin()) return 0;
    return static_cast<std::size_t>(it - starts_.begin()) - 1;
}

Rational GcsDomain::gamma(const Rational& t) const {
    if (t < -kHalf || t > kHalf) throw std::out_of_range("parameter outside [-1/2, 1/2]");
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), t,
                               [](const Rational& v, const BoundaryPiece& p) { return v < p.lo; });
    if (it != pieces_.begin()) --it;
    return piece_height(*it, t);
}

long double GcsDomain::gamma(long double t) const {
    if (t < -0.5L || t > 0.5L) throw std::out_of_range("parameter outside [-1/2, 1/2]");
    return piece_height(pieces_[piece_at(t)], t);
}

Rational GcsDomain::left_derivative(const Rational& t) const {
    if (t < -kHalf || t > kHalf) throw std::out_of_range("parameter outside [-1/2, 1/2]");
    if (t == -kHalf) return Rational(0);
    // piece with lo < t <= hi
    auto it = std::lower_bound(pieces_.begin(), pieces_.end(), t,
                               [](const BoundaryPiece& p, const Rational& v) { return p.lo < v; });
    --it;
    return it->chord ? it->lo + it->hi : Rational(2) * t;
}

Rational GcsDomain::right_derivative(const Rational& t) const {
    if (t < -kHalf || t > kHalf) throw std::out_of_range("parameter outside [-1/2, 1/2]");
    if (t == kHalf) return Rational(0);
    // piece with lo <= t < hi
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), t,
                               [](const Rational& v, const BoundaryPiece& p) { return v < p.lo; });
    --it;
    return it->chord ? it->lo + it->hi : Rational(2) * t;
}

GcsDomain gcs_domain(const MoranSet& cantor, int depth) { return GcsDomain(cantor, depth); }

std::vector<Rational> slope_set(const GcsDomain& domain) {
    std::vector<Rational> out{Rational(0)};
    for (const auto& p : domain.pieces())
        for (const Rational& t : {p.lo, p.hi}) {
            out.push_back(domain.left_derivative(t));
            out.push_back(domain.right_derivative(t));
        }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<Rational> expected_slope_set(const MoranSet& cantor, int depth) {
    std::vector<Rational> out{Rational(0)};
    for (const Rational& e : cantor.endpoints(depth)) out.push_back(Rational(2) * e);
    for (int k = 1; k <= depth; ++k)
        for (const auto& iv : cantor.removed[k]) out.push_back(iv.lo + iv.hi);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool is_convex(const GcsDomain& domain) {
    const auto& ps = domain.pieces();
    if (ps.empty() || ps.front().lo != -kHalf || ps.back().hi != kHalf) return false;
    if (domain.gamma(-kHalf) != kEighth || domain.gamma(kHalf) != kEighth) return false;
    Rational last_slope(-2);
    for (std::size_t i = 0; i < ps.size(); ++i) {
        const auto& p = ps[i];
        const Rational in = p.chord ? p.lo + p.hi : Rational(2) * p.lo;
        const Rational out = p.chord ? p.lo + p.hi : Rational(2) * p.hi;
        if (in < last_slope) return false;
        last_slope = out;
        if (i + 1 < ps.size()) {
            if (ps[i + 1].lo != p.hi) return false;
            if (piece_height(p, p.hi) != piece_height(ps[i + 1], p.hi)) return false;
        }
    }
    return true;
}

double map_f(double x, double y) {
    if (x == 0.0) throw std::domain_error("vertical direction has no slope");
    return y / x;
}

std::pair<double, double> map_f_inverse(double slope) {
    if (!(std::abs(slope) <= 1.0)) throw std::domain_error("inverse defined for |slope| <= 1");
    const double n = std::sqrt(1.0 + slope * slope);
    return {1.0 / n, slope / n};
}

int cap_level(const MoranSpec& spec, const Rational& delta) { return levels_above(spec, delta, false); }

int cap_depth(const MoranSpec& spec, const Rational& delta) {
    return levels_above(spec, delta / Rational(16), true) + 1;
}

Rational dyadic_delta(int j) {
    if (j < 0 || j > 62) throw std::out_of_range("dyadic exponent outside [0, 62]");
    return Rational(1, std::int64_t{1} << j);
}

GcsDomain domain_for(const MoranRule& rule, const Rational& smallest) {
    for (int levels = 1; levels <= 64; ++levels) {
        const MoranSpec spec = rule.expand(levels);
        int depth = 0;
        try {
            depth = cap_depth(spec, smallest);
        } catch (const std::out_of_range&) {
            continue;
        }
        return GcsDomain(build_moran(spec, depth), depth);
    }
    throw std::out_of_range("rule '" + rule.name + "' cannot reach delta " + smallest.str());
}

std::size_t CapCover::class_size(int cls) const {
    return static_cast<std::size_t>(
        std::count_if(caps.begin(), caps.end(), [cls](const Cap& c) { return c.cls == cls; }));
}

void CapCover::write_csv(std::ostream& out) const {
    out << "class,t_lo,t_hi,slope,intercept\n";
    char buf[160];
    for (const Cap& c : caps) {
        const std::string cls = c.cls < 0 ? "ceiling" : std::to_string(c.cls);
        std::snprintf(buf, sizeof buf, "%s,%.12g,%.12g,%.12Lg,%.12Lg\n", cls.c_str(), c.t_lo.to_double(),
                      c.t_hi.to_double(), c.slope, c.intercept);
        out << buf;
    }
}

namespace {

struct Sagitta {
    long double width = 0;
    long double slope = 0, intercept = 0;
};

// Largest distance between the boundary over [u, v] and the chord joining its
// ends, with the parallel supporting line at the farthest point. gamma minus
// the chord is convex, so its minimum sits at a piece end or a parabola point
// of derivative equal to the chord slope.
Sagitta sagitta(const GcsDomain& d, long double u, long double v) {
    const long double gu = d.gamma(u), gv = d.gamma(v);
    const long double s = (gv - gu) / (v - u);
    const auto& ps = d.pieces();
    std::size_t i0 = d.piece_at(u), i1 = d.piece_at(v);
    long double best = 0, at = u;
    for (std::size_t i = i0; i <= i1; ++i) {
        const long double lo = std::max(u, ld(ps[i].lo)), hi = std::min(v, ld(ps[i].hi));
        auto visit = [&](long double t) {
            const long double dev = gu + s * (t - u) - piece_height(ps[i], t);
            if (dev > best) {
                best = dev;
                at = t;
            }
        };
        visit(lo);
        visit(hi);
        if (!ps[i].chord && lo <= s / 2 && s / 2 <= hi) visit(s / 2);
    }
    return {best / std::sqrt(1 + s * s), s, d.gamma(at) - s * at};
}

}  // namespace

CapCover cap_cover(const GcsDomain& domain, const Rational& delta, double eta) {
    if (!(eta > 0)) throw std::invalid_argument("eta must be positive");
    if (!(delta > Rational(0) && delta < Rational(1))) throw std::invalid_argument("delta must lie in (0, 1)");
    CapCover cover;
    cover.delta = delta;
    cover.eta = eta;
    const Cap ceiling{-1, -kHalf, kHalf, 0, 0.125L, 0};
    if (domain.finite()) {
        for (const auto& p : domain.pieces())
            cover.caps.push_back({p.level, p.lo, p.hi, ld(p.lo + p.hi), ld(-(p.lo * p.hi) - kEighth), 0});
        cover.caps.push_back(ceiling);
        return cover;
    }
    const MoranSpec& spec = domain.cantor().spec;
    cover.level = cap_level(spec, delta);
    cover.depth = cap_depth(spec, delta);
    if (domain.depth() < cover.depth)
        throw std::out_of_range("depth insufficient: delta " + delta.str() + " needs " + std::to_string(cover.depth) +
                                " generations, domain has " + std::to_string(domain.depth()));
    const GcsDomain work = domain.truncated(cover.depth);
    // Deeper boundaries stay within delta / 64 of this one, so splitting at
    // 63/64 delta keeps every cap a delta-cap of the limit domain.
    const long double dl = ld(delta) * 63 / 64;

    for (const auto& iv : work.cantor().generations[cover.level]) {
        const Rational len = iv.hi - iv.lo;
        const long double a = ld(iv.lo), l = ld(len);
        auto at = [&](std::int64_t j) { return j == kSplitSteps ? ld(iv.hi) : a + l * j / kSplitSteps; };
        auto exact = [&](std::int64_t j) { return iv.lo + len * Rational(j, kSplitSteps); };
        std::int64_t u = 0;
        while (u < kSplitSteps) {
            std::int64_t end = kSplitSteps;
            Sagitta sg = sagitta(work, at(u), at(end));
            if (sg.width >= dl) {
                std::int64_t lo = u, hi = kSplitSteps;
                while (hi - lo > 1) {
                    const std::int64_t mid = lo + (hi - lo) / 2;
                    (sagitta(work, at(u), at(mid)).width < dl ? lo : hi) = mid;
                }
                if (lo == u) throw std::runtime_error("split grid too coarse for delta " + delta.str());
                end = lo;
                sg = sagitta(work, at(u), at(end));
            }
            cover.caps.push_back({0, exact(u), exact(end), sg.slope, sg.intercept, sg.width});
            u = end;
        }
    }
    for (int k = 1; k <= cover.level; ++k)
        for (const auto& iv : work.cantor().removed[k])
            cover.caps.push_back({k, iv.lo, iv.hi, ld(iv.lo + iv.hi), ld(-(iv.lo * iv.hi) - kEighth), 0});
    cover.caps.push_back(ceiling);
    return cover;
}

CapCheck check_cap(const GcsDomain& domain, const Cap& cap) {
    const auto& ps = domain.pieces();
    const long double s = cap.slope, norm = std::sqrt(1 + s * s);
    CapCheck out;
    long double lowest = std::numeric_limits<long double>::infinity();
    // gamma minus the line is convex: its extremes over any range are at range
    // ends, piece ends, or parabola points with derivative s
    for (std::size_t i = 0; i < ps.size(); ++i) {
        const long double lo = ld(ps[i].lo), hi = ld(ps[i].hi);
        std::vector<long double> ts{lo, hi};
        if (!ps[i].chord && lo <= s / 2 && s / 2 <= hi) ts.push_back(s / 2);
        for (long double t : ts) lowest = std::min(lowest, piece_height(ps[i], t) - s * t - cap.intercept);
    }
    if (cap.cls < 0) {
        out.max_distance = 0;
        out.supporting = s == 0 && cap.intercept == 0.125L;
        return out;
    }
    const long double u = ld(cap.t_lo), v = ld(cap.t_hi);
    for (std::size_t i = domain.piece_at(u); i <= domain.piece_at(v); ++i) {
        const long double lo = std::max(u, ld(ps[i].lo)), hi = std::min(v, ld(ps[i].hi));
        for (long double t : {lo, hi})
            out.max_distance = std::max(out.max_distance, std::abs(piece_height(ps[i], t) - s * t - cap.intercept) / norm);
    }
    out.supporting = lowest >= -1e-15L;
    return out;
}

CapCount cap_count(const GcsDomain& domain, const Rational& delta, double eta) {
    const CapCover cover = cap_cover(domain, delta, eta);
    CapCount c;
    c.delta = delta;
    c.level = cover.level;
    c.lower = domain.finite() ? 1 : static_cast<std::int64_t>(domain.cantor().generations[cover.level].size());
    c.upper = static_cast<std::int64_t>(cover.size());
    return c;
}

AffineDimension affine_dim_estimate(const GcsDomain& domain, const std::vector<Rational>& deltas, double eta) {
    if (deltas.size() < 3) throw std::invalid_argument("affine dimension fit needs at least three scales");
    AffineDimension out;
    std::vector<std::pair<double, double>> samples;
    for (const Rational& d : deltas) {
        out.counts.push_back(cap_count(domain, d, eta));
        const auto& c = out.counts.back();
        samples.emplace_back(d.to_double(), std::sqrt(static_cast<double>(c.lower) * static_cast<double>(c.upper)));
    }
    out.fit = exponent_fit(samples);
    return out;
}

EnergyEstimate additive_energy_estimate(const GcsDomain& domain, const Rational& delta, int m, double eta,
                                        std::int64_t enumeration_cap) {
    if (m < 1) throw std::invalid_argument("m must be at least 1");
    if (domain.finite()) throw std::invalid_argument("additive energy needs a Cantor-generated domain");
    const CapCover cover = cap_cover(domain, delta, eta);
    const MoranSet& set = domain.cantor();
    EnergyEstimate out;
    out.level = cover.level;
    out.m0 = cover.level + 1;
    auto power = [m](long double x) { return std::pow(x, static_cast<long double>(m)); };
    auto product_bound = [&](int k) -> long double { return k == 0 ? 1.0L : ld(moran_sum_multiplicity_bound(set, m, k)); };

    for (int cls = 0; cls <= cover.level; ++cls) {
        std::vector<RationalInterval> family;
        for (const Cap& c : cover.caps)
            if (c.cls == cls) family.push_back({c.t_lo, c.t_hi});
        long double mult = -1;
        try {
            mult = ld(sum_multiplicity(family, m, enumeration_cap, true));
        } catch (const std::length_error&) {
        } catch (const std::overflow_error&) {
        }
        if (mult < 0) {
            out.product_bound = true;
            if (cls == 0) {
                // children per generation-K interval, times the tuple count of the parents
                std::int64_t most = 0;
                std::size_t ci = 0;
                for (const auto& iv : set.generations[cover.level]) {
                    std::int64_t here = 0;
                    while (ci < cover.caps.size() && cover.caps[ci].cls == 0 && cover.caps[ci].t_hi <= iv.hi) {
                        ++here;
                        ++ci;
                    }
                    most = std::max(most, here);
                }
                mult = power(ld(most)) * product_bound(cover.level);
            } else {
                // each generation-(cls-1) interval holds n - 1 removed intervals
                mult = power(ld(set.spec.levels[cls - 1].n - 1)) * product_bound(cls - 1);
            }
        }
        out.class_multiplicity.push_back(mult);
        out.m1 = std::max(out.m1, mult);
    }
    out.xi_bound = std::pow(static_cast<long double>(out.m0), 2.0L * m) * out.m1;
    out.energy_exponent = static_cast<double>(std::log(out.xi_bound) / -std::log(ld(delta)));
    return out;
}

}  // namespace tubelab
