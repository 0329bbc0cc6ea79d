#pragma once
// Homogeneous Moran sets with exact rational endpoints, dimension estimators,
// the regularity / Katz-Tao / Frostman constants, and interval families with
// small m-fold sum multiplicity.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "tubelab/config.hpp"
#include "tubelab/core.hpp"
#include "tubelab/rational.hpp"

namespace tubelab {

// One level of a Moran construction. Offsets are the left ends of the
// children as fractions of the parent length. A non-empty parent_offsets
// overrides `offsets` for parent number p (in left-to-right order).
struct MoranLevel {
    std::int64_t n = 2;
    Rational c{1, 3};
    std::vector<Rational> offsets;
    std::vector<std::vector<Rational>> parent_offsets;

    const std::vector<Rational>& offsets_for(std::size_t parent) const {
        return parent_offsets.empty() ? offsets : parent_offsets[parent % parent_offsets.size()];
    }
};

struct MoranSpec {
    std::string name;
    std::vector<MoranLevel> levels;  // levels[0] is generation 1

    int available_depth() const { return static_cast<int>(levels.size()); }
    // Throws std::invalid_argument naming the first offending level.
    void validate() const;
};

// Children evenly spread with the extreme ones flush against the parent ends.
std::vector<Rational> flush_offsets(std::int64_t n, const Rational& c);

// Rule-based Moran set: n_k and c_k as expressions in k; offsets either
// "endpoints" (flush, evenly spread) or an explicit list of fractions.
struct MoranRule {
    std::string name = "custom";
    std::string n_rule = "2";
    std::string c_rule = "1/3";
    std::string offsets = "endpoints";
    std::map<std::string, Rational> params;

    MoranSpec expand(int depth) const;
    static MoranRule from_config(const Config& cfg, const std::string& section = "moran");
};

// Offsets "search" (optionally "search: m=3, budget=200, seed=1") place the
// children by search_interval_family(n_k, m), which needs c_k = n_k^-m.
MoranRule middle_thirds_rule();
// n_k = N, c_k = N^-3 with a searched child layout at every level.
MoranRule theorem_a_rule(std::int64_t n, std::int64_t budget = 200);
// n_k = 2^k, c_k = 2^-3k with a searched child layout at level k.
MoranRule theorem_b_rule(std::int64_t budget = 200);

struct RationalInterval {
    Rational lo;
    Rational hi;
    friend bool operator==(const RationalInterval&, const RationalInterval&) = default;
};

struct MoranSet {
    MoranSpec spec;
    int depth = 0;
    std::vector<std::vector<RationalInterval>> generations;  // generations[0] = {[-1/2, 1/2]}
    std::vector<std::vector<std::size_t>> parents;           // parents[k][i] indexes generations[k-1]
    std::vector<std::vector<RationalInterval>> removed;      // removed[k]: gaps of E_{k-1} \ E_k, k >= 1
    std::vector<Rational> midpoints;                         // sorted midpoints of all removed intervals

    Rational generation_length(int k) const;
    std::vector<Rational> endpoints(int k) const;  // sorted, deduplicated
};

MoranSet build_moran(const MoranSpec& spec, int depth);

struct GcsReport {
    bool endpoint_ok = false;
    std::vector<double> hrww_ratio;  // entry k-1 holds log c_k / log(c_1 ... c_k)
};
GcsReport check_gcs(const MoranSet& set);

// log(n_lo ... n_K) / -log(c_lo ... c_K). Proportional prime-exponent vectors
// give the ratio through exact integer arithmetic.
double box_dim_ratio(const MoranSet& set, int k_lo, int k_hi);

enum class QaCount {
    ball,    // |E n I|_r as the closed r-ball covering number
    dyadic,  // number of dyadic r-intervals meeting E n I
};

struct QaProfile {
    double alpha = 0.0;
    double r = 0.0, big_r = 0.0;  // attaining scale pair
    std::int64_t pairs = 0;
    std::string method;
};
// Largest log|E n I|_r / log(R/r) over dyadic r >= delta, dyadic R <= 1 with
// R >= r^(1-gamma) and R > r, and dyadic intervals I of length R.
QaProfile qa_profile(std::vector<double> points, double gamma, double delta, QaCount count = QaCount::ball);

// Smallest C with |E n I|_r <= C (R/r)^s over dyadic delta <= r <= R <= 1 and
// I in D_R; E is given as integer multiples of delta = 2^-k.
double regularity_constant(std::vector<std::int64_t> points, int k, double s);

// Largest |P n B(x, rho)| / (rho/delta)^t over centres x of P and dyadic rho
// in [delta, 1]; squares count when they meet the closed ball.
double katz_tao_constant(const std::vector<DyadicSquare>& squares, double t);
// Same counts divided by rho^s |P|.
double frostman_constant(const std::vector<DyadicSquare>& squares, double s);
// One-dimensional versions: counts are delta-covering numbers.
double katz_tao_constant(const std::vector<double>& points, int k, double t);
double frostman_constant(const std::vector<double>& points, int k, double s);

struct IntervalFamily {
    std::vector<RationalInterval> intervals;
    bool separated = false;
    std::int64_t n = 0;
    int m = 0;
    std::vector<std::int64_t> half_units;  // left ends on the N^-m / 2 grid, from -1/2
    std::int64_t g = 0;                    // certified m-fold sum multiplicity
    std::int64_t evaluations = 0;
};

// Exact maximum over y of the number of ordered m-tuples whose interval sum
// contains y. Throws when |F|^m exceeds `cap`. With half_open the intervals
// are read as [lo, hi), so a tiling has multiplicity one.
std::int64_t sum_multiplicity(const std::vector<RationalInterval>& family, int m,
                              std::int64_t cap = 4'000'000, bool half_open = false);

// Product of the per-level multiplicities of the normalized child families.
std::int64_t moran_sum_multiplicity_bound(const MoranSet& set, int m, int k_hi);
// Per-level factors used by the product above.
std::vector<std::int64_t> moran_level_multiplicities(const MoranSet& set, int m, int k_hi);

// Seeded deterministic search; the result after `budget` evaluations is the
// best of the first `budget` candidates, so g never increases with budget.
IntervalFamily search_interval_family(std::int64_t n, int m, std::int64_t budget, std::uint64_t seed = 1);
// m-fold multiplicity of a family on the half-unit grid (intervals of length 2).
std::int64_t grid_sum_multiplicity(const std::vector<std::int64_t>& positions, int m);

// Cantor-type set with n = 2 children of ratio 2^(-1/s), flush ends, inside
// [-1/2, 1/2). Left ends of the deepest generation with length >= delta are
// snapped down to delta Z. Returns integer multiples of delta = 2^-k.
std::vector<std::int64_t> cantor_grid_set(double s, int k);

void write_rationals(std::ostream& out, const std::vector<Rational>& values);
std::vector<Rational> read_rationals(std::istream& in);

}  // namespace tubelab
