#pragma once
// Convex domains generated by Cantor sets: the lower boundary graph over
// [-1/2, 1/2], the ceiling at height 1/8, slope sets, delta-cap covers,
// affine dimension fits and additive energy bounds.
//
// A domain built from C_K uses the parabola t^2 - 1/8 on every generation-K
// interval and the chord over every removed interval of generation <= K.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "tubelab/maximal.hpp"
#include "tubelab/rational.hpp"
#include "tubelab/setgen.hpp"

namespace tubelab {

struct BoundaryPiece {
    Rational lo, hi;
    bool chord = false;
    int level = 0;  // generation of the removed interval; 0 for parabola pieces
};

class GcsDomain {
public:
    // Built from the first `depth` generations (all of them when depth < 0).
    explicit GcsDomain(const MoranSet& cantor, int depth = -1);
    // Convex polygon through (t, t^2 - 1/8), t in the finite set; needs +-1/2.
    static GcsDomain polygon(std::vector<Rational> parameters);

    const MoranSet& cantor() const { return cantor_; }
    int depth() const { return depth_; }
    bool finite() const { return finite_; }
    const std::vector<BoundaryPiece>& pieces() const { return pieces_; }

    // Exact boundary height; throws std::overflow_error when t^2 leaves 64 bits.
    Rational gamma(const Rational& t) const;
    long double gamma(long double t) const;
    // One-sided derivatives of gamma at t; the outer sides of +-1/2 meet the
    // ceiling and have slope 0.
    Rational left_derivative(const Rational& t) const;
    Rational right_derivative(const Rational& t) const;

    // Index of the piece containing t (the left one at a shared endpoint).
    std::size_t piece_at(long double t) const;
    static Rational ceiling() { return Rational(1, 8); }

    // A copy built from fewer generations.
    GcsDomain truncated(int depth) const;

private:
    GcsDomain() = default;
    MoranSet cantor_;
    int depth_ = 0;
    bool finite_ = false;
    std::vector<BoundaryPiece> pieces_;
    std::vector<long double> starts_;
};

// Throws std::invalid_argument when the end-point condition fails.
GcsDomain gcs_domain(const MoranSet& cantor, int depth = -1);

// All one-sided derivatives at breakpoints plus the ceiling slope 0, sorted.
std::vector<Rational> slope_set(const GcsDomain& domain);
// 2 (endpoints of generation K and midpoints of removed intervals up to K) and 0.
std::vector<Rational> expected_slope_set(const MoranSet& cantor, int depth);
// Right derivatives never decrease and heights agree at every breakpoint.
bool is_convex(const GcsDomain& domain);

// Slope of a direction vector; vertical directions throw.
double map_f(double x, double y);
// Unit vector of slope s with positive first coordinate, |s| <= 1.
std::pair<double, double> map_f_inverse(double slope);

// Largest k with c_1 ... c_k >= delta^(1/2), compared exactly.
int cap_level(const MoranSpec& spec, const Rational& delta);
// Smallest depth with (c_1 ... c_d)^2 <= delta / 16: a parabola piece of that
// generation deviates from the limit boundary by at most delta / 64.
int cap_depth(const MoranSpec& spec, const Rational& delta);
Rational dyadic_delta(int j);
// Expands the rule level by level until it is deep enough for cap covers at
// every delta >= smallest, then builds the domain.
GcsDomain domain_for(const MoranRule& rule, const Rational& smallest);

struct Cap {
    int cls = 0;       // 0: split generation-K interval, k >= 1: removed at generation k, -1: ceiling
    Rational t_lo, t_hi;
    long double slope = 0, intercept = 0;  // supporting line y = slope t + intercept
    long double width = 0;                 // max distance of the boundary over [t_lo, t_hi] to the line
};

struct CapCover {
    Rational delta;
    double eta = 0.05;
    int level = 0;  // K(delta)
    int depth = 0;  // generations used for the boundary
    std::vector<Cap> caps;

    std::size_t size() const { return caps.size(); }
    std::size_t class_size(int cls) const;
    void write_csv(std::ostream& out) const;
};

// Split points lie on a grid of 2^20 steps per generation-K interval. Caps
// are delta-caps of every deeper boundary, not only of the one at cap_depth.
CapCover cap_cover(const GcsDomain& domain, const Rational& delta, double eta = 0.05);
// Largest distance of the boundary over the cap interval to its line, and
// whether the line supports the whole boundary.
struct CapCheck {
    long double max_distance = 0;
    bool supporting = false;
};
CapCheck check_cap(const GcsDomain& domain, const Cap& cap);

struct CapCount {
    Rational delta;
    int level = 0;
    std::int64_t lower = 0;  // |I_K|
    std::int64_t upper = 0;  // |cap_cover|
};
CapCount cap_count(const GcsDomain& domain, const Rational& delta, double eta = 0.05);

struct AffineDimension {
    ExponentFit fit;
    std::vector<CapCount> counts;
};
// Fit of sqrt(lower * upper) against 1/delta; needs at least three scales.
AffineDimension affine_dim_estimate(const GcsDomain& domain, const std::vector<Rational>& deltas, double eta = 0.05);

struct EnergyEstimate {
    int level = 0;
    std::int64_t m0 = 0;  // K(delta) + 1 classes
    long double m1 = 0;   // max over classes of the m-fold projected sum multiplicity
    long double xi_bound = 0;  // m0^(2m) m1
    double energy_exponent = 0;
    bool product_bound = false;  // some class used the per-level product bound
    std::vector<long double> class_multiplicity;
};
EnergyEstimate additive_energy_estimate(const GcsDomain& domain, const Rational& delta, int m, double eta = 0.05,
                                        std::int64_t enumeration_cap = 4'000'000);

}  // namespace tubelab
