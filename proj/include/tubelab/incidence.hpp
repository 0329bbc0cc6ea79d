#pragma once
// Rich points of dyadic tube families, the incidence ratio against the
// Katz-Tao / regularity bound, the sharp parallel-packing example and random
// Cantor-slope families.

#include <cstdint>
#include <string>
#include <vector>

#include "tubelab/core.hpp"

namespace tubelab {

struct TubeFamily {
    int k = 0;
    std::vector<DyadicTube> tubes;

    std::size_t size() const { return tubes.size(); }
    // Slope multiset sigma(F) as integer multiples of delta, sorted.
    std::vector<std::int64_t> slope_indices() const;
    std::vector<DyadicSquare> duals() const;
    void validate() const;
};

// Per-cell tube counts over [0,1)^2 stored column by column. Counters start
// at 16 bits and the whole grid is widened to 32 bits on the first overflow.
class MultiplicityGrid {
public:
    explicit MultiplicityGrid(int k);

    int scale() const { return k_; }
    std::int64_t side() const { return side_; }
    bool widened() const { return !wide_.empty(); }

    void add_tube(const DyadicTube& tube);
    void merge(const MultiplicityGrid& other);
    std::uint32_t at(std::int64_t ix, std::int64_t iy) const {
        const std::size_t i = static_cast<std::size_t>(ix * side_ + iy);
        return wide_.empty() ? small_[i] : wide_[i];
    }
    std::uint64_t total() const;
    std::uint32_t max() const;
    // cells_at_least[r] = number of cells with multiplicity >= r, r = 0..max.
    std::vector<std::int64_t> cells_at_least() const;

private:
    void widen();
    void bump(std::size_t i);

    int k_;
    std::int64_t side_;
    std::vector<std::uint16_t> small_;
    std::vector<std::uint32_t> wide_;
};

// Accumulates the family with `threads` workers; per-worker grids are merged
// in worker order.
MultiplicityGrid accumulate(const TubeFamily& family, int threads = 1);

struct RichPointSet {
    int r = 1;
    CellSet cells;
    std::vector<std::uint32_t> multiplicity;  // aligned with cells.cells()
};

RichPointSet rich_points(const TubeFamily& family, int r, int threads = 1);
RichPointSet rich_points(const MultiplicityGrid& grid, int r);

struct IncidenceReport {
    int r = 1;
    std::int64_t rich_cells = 0;
    double c_kt = 0.0;
    double c_reg = 0.0;
    double ratio = 0.0;
};

// ratio = |P_r| r^((s+1)/s) / ((C_KT C_reg)^(1/s) delta^-1 |F|), with C_KT the
// Katz-Tao (delta,1) constant of the dual squares and C_reg the (delta,s)
// regularity constant of the slope set.
IncidenceReport verify_incidence_bound(const TubeFamily& family, double s, int r, int threads = 1);
// Same for several thresholds, sharing one multiplicity grid and the constants.
std::vector<IncidenceReport> incidence_sweep(const TubeFamily& family, double s, const std::vector<int>& rs,
                                             int threads = 1);

struct SharpExample {
    TubeFamily family;
    double s = 0.5;
    int r = 1;
    std::int64_t width_cells = 0;      // thick tube width in cells (delta^s snapped to the grid)
    std::vector<std::int64_t> slopes;  // Theta as multiples of delta
    double c = 0.25;                   // P = [0, 1/r] x [0, c * width]
    GridBox p_cells;                   // cells meeting P
    double predicted_size = 0.0;       // r delta^(s-1)
    bool paper_range = true;           // r <= delta^-s and delta^-s(1-s) >= r^(1-s)
};

// Throws std::invalid_argument naming the failed inequality.
SharpExample sharp_example(double s, int k, int r);

// Slopes: Cantor set of dimension s in [-1/2, 1/2). Intercepts: for each slope
// an arithmetic progression in [0, 1) with step delta^(1-s) snapped to the
// grid and a random offset.
TubeFamily cantor_katz_tao_family(double s, int k, std::uint64_t seed);

}  // namespace tubelab
