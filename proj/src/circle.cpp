#include "erg/circle.hpp"

#include <cmath>

#include "erg/errors.hpp"

namespace erg {

Arc arc_union(const Arc& a, const Arc& b) {
    // Work in coordinates unrolled from a.lo().
    double base = a.lo();
    double a_lo = 0.0, a_hi = a.length();
    double b_lo = wrap(b.lo() - base), b_hi = b_lo + b.length();
    if (b_lo > a_hi + 1e-12) {
        // b starts past a's end; the overlap must be across the wrap,
        // i.e. b ends at/after base + 1.
        if (b_hi < 1.0 - 1e-12)
            throw Error(ErrorCode::DegenerateGeometry, "arc_union: arcs do not overlap");
        b_lo -= 1.0;
        b_hi -= 1.0;
    }
    double lo = std::min(a_lo, b_lo);
    double hi = std::max(a_hi, b_hi);
    if (hi - lo >= 1.0 - 1e-12)
        throw Error(ErrorCode::DegenerateGeometry, "arc_union: union covers the circle");
    return Arc::from_endpoints(base + lo, base + hi, a.closed || b.closed);
}

std::vector<double> grid_points_in_arc(const Arc& arc, int n) {
    std::vector<double> out;
    double lo = arc.center - arc.radius;
    double hi = arc.center + arc.radius;
    long first = static_cast<long>(std::ceil(lo * n - 1e-9));
    long last = static_cast<long>(std::floor(hi * n + 1e-9));
    out.reserve(static_cast<std::size_t>(std::max<long>(0, last - first + 1)));
    for (long i = first; i <= last; ++i) {
        double x = wrap(static_cast<double>(i) / static_cast<double>(n));
        if (arc.contains(x)) out.push_back(x);
    }
    return out;
}

}  // namespace erg
