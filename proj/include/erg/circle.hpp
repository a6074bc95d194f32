#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace erg {

// Representative of a circle point in [0, 1).
inline double wrap(double x) {
    double r = x - std::floor(x);
    return r >= 1.0 ? r - 1.0 : r;
}

// Metric on R/Z, values in [0, 1/2].
inline double circle_dist(double a, double b) {
    double d = std::fabs(wrap(a) - wrap(b));
    return d > 0.5 ? 1.0 - d : d;
}

// Signed displacement from a to b along the shorter arc, in (-1/2, 1/2].
inline double circle_delta(double a, double b) {
    double d = wrap(b - a);
    return d > 0.5 ? d - 1.0 : d;
}

// Closed or open metric ball on the circle.  radius < 1/2 so the
// complement is nonempty and "between two points" is unambiguous.
struct Arc {
    double center = 0.0;
    double radius = 0.0;
    bool closed = true;

    Arc() = default;
    Arc(double c, double r, bool cl = true) : center(wrap(c)), radius(r), closed(cl) {}

    bool contains(double x) const {
        double d = circle_dist(x, center);
        return closed ? d <= radius : d < radius;
    }

    double lo() const { return wrap(center - radius); }
    double hi() const { return wrap(center + radius); }
    double length() const { return 2.0 * radius; }

    // Distance from x to the boundary, positive inside.
    double boundary_gap(double x) const { return radius - circle_dist(x, center); }

    // Arc running counterclockwise from lo to hi.
    static Arc from_endpoints(double lo, double hi, bool closed = true) {
        double len = wrap(hi - lo);
        return Arc(wrap(lo + len / 2.0), len / 2.0, closed);
    }

    // Shorter arc with endpoints a and b.
    static Arc between(double a, double b, bool closed = true) {
        double d = circle_delta(a, b);
        return Arc(wrap(a + d / 2.0), std::fabs(d) / 2.0, closed);
    }
};

// Union of two overlapping arcs, as an arc.  Caller guarantees overlap
// and that the union is still shorter than the full circle.
Arc arc_union(const Arc& a, const Arc& b);

// Grid points i/n lying in the arc, in counterclockwise order from lo.
std::vector<double> grid_points_in_arc(const Arc& arc, int n);

}  // namespace erg
