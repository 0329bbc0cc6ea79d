#pragma once
// Brute-force reference implementations. Each one follows the definition as
// literally as possible and shares no code path with the fast versions.

#include <cstdint>
#include <vector>

#include "tubelab/core.hpp"
#include "tubelab/maximal.hpp"

namespace tubelab::oracle {

// Decides c n T != empty for the grid cell (ix, iy) by maximizing the concave
// slack min(upper - y0, y1 - lower) over the column, in exact integers.
bool cell_meets_tube(const DyadicTube& tube, int grid_k, std::int64_t ix, std::int64_t iy);

// Multiplicity of every cell of [0,1)^2 by looping over (cell, tube) pairs.
std::vector<std::uint32_t> multiplicities(const std::vector<DyadicTube>& tubes, int k);

// Covering number of points on the line by trying every left-anchored ball.
std::int64_t covering_number_1d(std::vector<double> points, double r);

// max over windows of |E n I|_r / (R/r)^s with E given as integer multiples of 2^-k.
double regularity_constant(const std::vector<std::int64_t>& points, int k, double s);

// Katz-Tao and Frostman constants of a family of squares (counted by the
// squares meeting each ball) and of 1-D point sets (counted by exact covering).
double katz_tao_constant(const std::vector<DyadicSquare>& squares, double t);
double frostman_constant(const std::vector<DyadicSquare>& squares, double s);
double katz_tao_constant(const std::vector<double>& points, int k, double t);
double frostman_constant(const std::vector<double>& points, int k, double s);

// Ordered m-tuple enumeration of interval sums; counts the tuples containing
// each candidate point y (every left endpoint sum and right endpoint sum).
std::int64_t sum_multiplicity(const std::vector<std::pair<double, double>>& intervals, int m);

// Average of f over the operator tube centred at cell (qx, qy) with slope
// index t, summing the tube cells one by one.
double tube_average(const GridFunction& f, std::int64_t t, std::int64_t qx, std::int64_t qy);
// Cell-wise maximum of tube_average over the directions, on [0,1)^2.
std::vector<double> nikodym_apply(const GridFunction& f, const DirectionSet& directions);

}  // namespace tubelab::oracle
