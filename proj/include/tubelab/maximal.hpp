#pragma once
// Grid versions of the Nikodym and Kakeya maximal operators, bush
// constructions, tube-sum norms and log-log exponent fits.
//
// Operator tubes are digital: the tube centred at cell (qx, qy) with slope
// t * delta covers columns qx - M/2 .. qx + M/2 (M = 1/delta) and, in column
// ix, the five rows shear(ix) + j_q - 2 .. shear(ix) + j_q + 2, where
// shear(ix) is the rounded height of the slope-t line at the column centre and
// j_q = qy - shear(qx). This is a 4-delta tube up to one cell.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tubelab/core.hpp"
#include "tubelab/incidence.hpp"

namespace tubelab {

struct DirectionSet {
    int k = 0;
    std::vector<std::int64_t> slopes;  // sorted multiples of delta in [-M, M)
    std::string provenance = "explicit";

    std::size_t size() const { return slopes.size(); }
    double delta() const;

    static DirectionSet cantor(double s, int k);
    static DirectionSet explicit_set(int k, std::vector<std::int64_t> slopes);
    // Every grid slope in [lo, hi].
    static DirectionSet net_of_arc(int k, double lo, double hi);
    // Rationals snapped down to the delta grid.
    static DirectionSet from_rationals(int k, const std::vector<Rational>& values);
};

// Nonnegative cell-constant function on a box of cells; zero outside the box.
class GridFunction {
public:
    GridFunction() = default;
    GridFunction(const GridBox& box, double value = 0.0);

    const GridBox& box() const { return box_; }
    int scale() const { return box_.k; }
    double at(std::int64_t ix, std::int64_t iy) const {
        if (!box_.contains(ix, iy)) return 0.0;
        return values_[index(ix, iy)];
    }
    void set(std::int64_t ix, std::int64_t iy, double v);
    const std::vector<double>& values() const { return values_; }
    // (sum |v|^p delta^2)^(1/p)
    double lp_norm(double p) const;
    double max() const;

    static GridFunction indicator(const GridBox& box, const CellSet& cells);
    // Cells of the box whose centre lies in the closed disc.
    static GridFunction disc(const GridBox& box, double cx, double cy, double radius);

private:
    std::size_t index(std::int64_t ix, std::int64_t iy) const {
        return static_cast<std::size_t>((ix - box_.ix0) * box_.height() + (iy - box_.iy0));
    }
    GridBox box_;
    std::vector<double> values_;
};

// Row offset of the digital line with slope index t at column ix.
std::int64_t digital_shear(std::int64_t t, std::int64_t ix, int k);
// Number of cells in an operator tube: 5 (M + 1).
std::int64_t operator_tube_cells(int k);

// Tube averages of f for one direction at every cell of [0,1)^2.
GridFunction direction_averages(const GridFunction& f, std::int64_t slope);
GridFunction nikodym_apply(const GridFunction& f, const DirectionSet& directions, int threads = 1);
// slope index -> max over centres in [0,1)^2 of the tube average
std::map<std::int64_t, double> kakeya_apply(const GridFunction& f, const DirectionSet& directions, int threads = 1);

// Bush tubes are three-row digital lines of unit length centred at the cell
// with corner (1/2, 1/2), clipped to [0,1)^2. For a bush cell q in a tube of
// slope t, the operator tube at q with slope t contains the rows of that bush
// tube, and it contains R whenever |qx - M/2| + reach <= M/2.
struct BushPair {
    int k = 0;
    std::vector<std::int64_t> slopes;
    CellSet core;         // R: cells in every bush tube
    CellSet union_cells;  // A
    double rho = 0.0;
    std::int64_t reach = 0;       // max column distance of R from the centre column
    double core_constant = 0.0;   // |R| rho / delta^2
    double union_constant = 0.0;  // |A| / (delta |T|)

    // Cells of A whose operator tubes contain R.
    std::vector<Cell> covered_union() const;
};
BushPair bush_construction(const DirectionSet& directions, double omega, double rho);
// Cells of one bush tube inside [0,1)^2.
std::vector<Cell> bush_tube_cells(int k, std::int64_t slope);

enum class MaximalOperator { nikodym, kakeya };

struct NormOptions {
    MaximalOperator op = MaximalOperator::nikodym;
    std::vector<double> weights;  // per slope, Kakeya only; default delta^s each
    double s = 1.0;
    int threads = 1;
};
double norm_ratio(const GridFunction& f, const DirectionSet& directions, double p, const NormOptions& options = {});

struct DualSumResult {
    double norm = 0.0;
    double max_distance = 0.0;  // max vertical distance cell centre -> tube, in units of delta
};
// assignment[ix * M + iy] is the tube for cell (ix, iy) of [0,1)^2. The sum of
// indicators is evaluated on x in [0,1), y in [-2,3).
DualSumResult dual_sum_norm(const std::vector<DyadicTube>& assignment, int k, double p_prime);
// For each cell, the tube through the cell whose slope in the set points
// closest to z, shifted by at most `a` rows towards z.
std::vector<DyadicTube> adversarial_assignment(const DirectionSet& directions, double a = 2.0, double zx = 0.5,
                                               double zy = 0.5);

struct TubeSumResult {
    double norm = 0.0;
    double frostman = 0.0;  // C: Frostman constant of the slope set with exponent s
    double bound = 0.0;     // C^(1/p) delta^(2/p') |F|
    double ratio = 0.0;
};
TubeSumResult tube_sum_norm(const TubeFamily& family, double p_prime, double s);
// One dyadic tube per slope, through the point (1/2, 1/2).
TubeFamily bush_family(const DirectionSet& directions);

struct ExponentFit {
    double beta = 0.0;      // slope of log value against log(1/delta)
    double intercept = 0.0;
    double residual = 0.0;  // sum of squared residuals
};
ExponentFit exponent_fit(const std::vector<std::pair<double, double>>& samples);

}  // namespace tubelab
