#pragma once
// Small planar helpers shared by the tube and bush code: points, convex
// polygon clipping, areas, and an exact sign test for short sums of doubles.

#include <initializer_list>
#include <vector>

namespace tubelab {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

using Polygon = std::vector<Point>;

// Keeps the part of `poly` where a*x + b*y <= c.
Polygon clip_halfplane(const Polygon& poly, double a, double b, double c);
Polygon clip_rect(const Polygon& poly, double x0, double x1, double y0, double y1);
Polygon intersect_convex(const Polygon& p, const Polygon& q);
double polygon_area(const Polygon& poly);

// Exact sign of t1 + t2 + ... computed with an error-free expansion.
int exact_sign_sum(std::initializer_list<double> terms);

// Exact sign of y - (alpha*x + beta); alpha, beta, x, y arbitrary doubles.
int exact_sign_above_line(double y, double alpha, double x, double beta);

// Integral over t in [0,1] of clamp(f0 + (f1-f0) t, lo, hi).
double clamped_linear_integral(double f0, double f1, double lo, double hi);

}  // namespace tubelab
