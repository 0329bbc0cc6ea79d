#include "tubelab/geometry.hpp"

#include <cmath>

namespace tubelab {

Polygon clip_halfplane(const Polygon& poly, double a, double b, double c) {
    Polygon out;
    const std::size_t n = poly.size();
    if (n == 0) return out;
    out.reserve(n + 2);
    for (std::size_t i = 0; i < n; ++i) {
        const Point& p = poly[i];
        const Point& q = poly[(i + 1) % n];
        double fp = a * p.x + b * p.y - c;
        double fq = a * q.x + b * q.y - c;
        if (fp <= 0) out.push_back(p);
        if ((fp < 0 && fq > 0) || (fp > 0 && fq < 0)) {
            double t = fp / (fp - fq);
            out.push_back({p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
        }
    }
    return out;
}

Polygon clip_rect(const Polygon& poly, double x0, double x1, double y0, double y1) {
    Polygon r = clip_halfplane(poly, -1, 0, -x0);
    r = clip_halfplane(r, 1, 0, x1);
    r = clip_halfplane(r, 0, -1, -y0);
    return clip_halfplane(r, 0, 1, y1);
}

double polygon_area(const Polygon& poly) {
    double s = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point& p = poly[i];
        const Point& q = poly[(i + 1) % n];
        s += p.x * q.y - q.x * p.y;
    }
    return std::fabs(s) / 2.0;
}

Polygon intersect_convex(const Polygon& p, const Polygon& q) {
    // q is assumed counter-clockwise; each edge contributes one half-plane.
    Polygon out = p;
    const std::size_t n = q.size();
    for (std::size_t i = 0; i < n && !out.empty(); ++i) {
        const Point& u = q[i];
        const Point& v = q[(i + 1) % n];
        // Interior lies to the left of u->v: cross(v-u, x-u) >= 0.
        double a = (v.y - u.y);
        double b = -(v.x - u.x);
        double c = a * u.x + b * u.y;
        out = clip_halfplane(out, a, b, c);
    }
    return out;
}

namespace {

void two_sum(double a, double b, double& s, double& e) {
    s = a + b;
    double bb = s - a;
    e = (a - (s - bb)) + (b - bb);
}

}  // namespace

int exact_sign_sum(std::initializer_list<double> terms) {
    double h[16];
    int len = 0;
    for (double t : terms) {
        double q = t;
        int out = 0;
        for (int i = 0; i < len; ++i) {
            double s, e;
            two_sum(q, h[i], s, e);
            if (e != 0.0) h[out++] = e;
            q = s;
        }
        h[out++] = q;
        len = out;
    }
    for (int i = len - 1; i >= 0; --i) {
        if (h[i] > 0) return 1;
        if (h[i] < 0) return -1;
    }
    return 0;
}

int exact_sign_above_line(double y, double alpha, double x, double beta) {
    double p = alpha * x;
    double e = std::fma(alpha, x, -p);
    return exact_sign_sum({y, -p, -e, -beta});
}

namespace {

// Integral over [0,1] of max(g, 0) for the linear g with g(0)=g0, g(1)=g1.
double positive_part_integral(double g0, double g1) {
    if (g0 >= 0 && g1 >= 0) return 0.5 * (g0 + g1);
    if (g0 <= 0 && g1 <= 0) return 0.0;
    double pos = g0 > 0 ? g0 : g1;
    return pos * pos / (2.0 * std::fabs(g1 - g0));
}

}  // namespace

double clamped_linear_integral(double f0, double f1, double lo, double hi) {
    if (hi <= lo) return 0.0;
    return lo + positive_part_integral(f0 - lo, f1 - lo) - positive_part_integral(f0 - hi, f1 - hi);
}

}  // namespace tubelab
