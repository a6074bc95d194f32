#include "erg/plmap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "erg/errors.hpp"

namespace erg {

namespace {

constexpr double kKnotTol = 1e-12;

void sort_dedupe(std::vector<double>& v, double tol) {
    std::sort(v.begin(), v.end());
    std::vector<double> out;
    out.reserve(v.size());
    for (double x : v) {
        if (out.empty() || x - out.back() > tol) out.push_back(x);
    }
    v.swap(out);
}

}  // namespace

void PLMap::validate() const {
    if (breakpoints.size() < 2 || breakpoints.size() != lift_values.size())
        throw Error(ErrorCode::ConfigError, "PLMap: breakpoints/liftValues size mismatch");
    if (std::fabs(breakpoints.front()) > kKnotTol || std::fabs(breakpoints.back() - 1.0) > kKnotTol)
        throw Error(ErrorCode::ConfigError, "PLMap: breakpoints must run from 0 to 1");
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
        if (breakpoints[i + 1] <= breakpoints[i])
            throw Error(ErrorCode::ConfigError, "PLMap: breakpoints not strictly increasing");
    if (std::fabs(lift_values.back() - lift_values.front() - degree) > 1e-9)
        throw Error(ErrorCode::ConfigError, "PLMap: lift does not close with the declared degree");
    // Surjectivity: the lift's image over [0, 1] must have length >= 1.
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double v : lift_values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (hi - lo < 1.0 - 1e-9)
        throw Error(ErrorCode::ConfigError, "PLMap: lift image shorter than 1, not surjective");
}

double PLMap::max_abs_slope() const {
    double s = 0.0;
    for (std::size_t i = 0; i < pieces(); ++i) s = std::max(s, std::fabs(slope(i)));
    return s;
}

double PLMap::min_abs_slope() const {
    double s = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pieces(); ++i) s = std::min(s, std::fabs(slope(i)));
    return s;
}

double PLMap::lift(double t) const {
    double k = std::floor(t);
    double u = t - k;
    if (u >= 1.0) {  // guard against rounding at the seam
        u -= 1.0;
        k += 1.0;
    }
    // Last breakpoint <= u.
    auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), u);
    std::size_t i = static_cast<std::size_t>(it - breakpoints.begin());
    i = (i == 0) ? 0 : i - 1;
    if (i >= pieces()) i = pieces() - 1;
    double t0 = breakpoints[i], t1 = breakpoints[i + 1];
    double v0 = lift_values[i], v1 = lift_values[i + 1];
    double v = (u - t0) == 0.0 ? v0 : v0 + (v1 - v0) * ((u - t0) / (t1 - t0));
    return v + k * static_cast<double>(degree);
}

double PLMap::iterate(double x, int n) const {
    double y = wrap(x);
    for (int i = 0; i < n; ++i) y = (*this)(y);
    return y;
}

std::vector<double> PLMap::preimages(double y) const {
    if (!finite_preimages())
        throw Error(ErrorCode::ZeroSlopePiece, "preimages: map has a constant piece");
    double yy = wrap(y);
    std::vector<double> out;
    for (std::size_t i = 0; i < pieces(); ++i) {
        double t0 = breakpoints[i], t1 = breakpoints[i + 1];
        double v0 = lift_values[i], v1 = lift_values[i + 1];
        double lo = std::min(v0, v1), hi = std::max(v0, v1);
        double s = (v1 - v0) / (t1 - t0);
        long m0 = static_cast<long>(std::ceil(lo - yy - 1e-12));
        long m1 = static_cast<long>(std::floor(hi - yy + 1e-12));
        for (long m = m0; m <= m1; ++m) {
            double target = yy + static_cast<double>(m);
            double x = t0 + (target - v0) / s;
            if (x < t0 - 1e-12 || x > t1 + 1e-12) continue;
            x = std::clamp(x, t0, t1);
            out.push_back(wrap(x));
        }
    }
    sort_dedupe(out, 1e-12);
    // The seam 0/1 may appear twice after wrapping.
    if (out.size() > 1 && out.front() < 1e-12 && out.back() > 1.0 - 1e-12) out.pop_back();
    return out;
}

PLMap PLMap::simplified(double slope_tol) const {
    PLMap g;
    g.degree = degree;
    g.breakpoints.push_back(breakpoints[0]);
    g.lift_values.push_back(lift_values[0]);
    for (std::size_t i = 0; i + 1 < pieces(); ++i) {
        double s0 = slope(i), s1 = slope(i + 1);
        if (std::fabs(s1 - s0) <= slope_tol * std::max(1.0, std::fabs(s0))) continue;
        g.breakpoints.push_back(breakpoints[i + 1]);
        g.lift_values.push_back(lift_values[i + 1]);
    }
    g.breakpoints.push_back(breakpoints.back());
    g.lift_values.push_back(lift_values.back());
    return g;
}

PLMap PLMap::linear(int degree, double offset) {
    PLMap f;
    f.degree = degree;
    f.breakpoints = {0.0, 1.0};
    f.lift_values = {offset, offset + degree};
    return f;
}

PLMap PLMap::from_circle_anchors(const std::vector<std::pair<double, double>>& anchors) {
    if (anchors.size() < 1)
        throw Error(ErrorCode::ConfigError, "from_circle_anchors: need at least one anchor");
    const std::size_t m = anchors.size();
    // Unroll positions and values from the first anchor; consecutive circular
    // gaps are taken in [0, 1).
    std::vector<double> t(m + 1), y(m + 1);
    t[0] = wrap(anchors[0].first);
    y[0] = wrap(anchors[0].second);
    for (std::size_t j = 1; j < m; ++j) {
        double dt = wrap(anchors[j].first - anchors[j - 1].first);
        double dy = wrap(anchors[j].second - anchors[j - 1].second);
        if (dt <= kKnotTol)
            throw Error(ErrorCode::ConfigError, "from_circle_anchors: coincident anchors");
        t[j] = t[j - 1] + dt;
        y[j] = y[j - 1] + dy;
    }
    t[m] = t[0] + 1.0;
    y[m] = y[0] + 1.0;
    if (m > 1 && t[m] - t[m - 1] <= kKnotTol)
        throw Error(ErrorCode::ConfigError, "from_circle_anchors: coincident anchors at seam");
    if (m > 1 && y[m] - y[m - 1] < -kKnotTol)
        throw Error(ErrorCode::MonotonicityBreak, "from_circle_anchors: decreasing values");

    // The knot span [t0, t0+1] covers exactly one integer point t*.
    double tstar = std::ceil(t[0] - kKnotTol);
    auto lift_at = [&](double tt) {
        auto it = std::upper_bound(t.begin(), t.end(), tt);
        std::size_t i = static_cast<std::size_t>(it - t.begin());
        i = (i == 0) ? 0 : i - 1;
        if (i >= m) i = m - 1;
        double u = t[i + 1] == t[i] ? 0.0 : (tt - t[i]) / (t[i + 1] - t[i]);
        return y[i] + u * (y[i + 1] - y[i]);
    };

    std::vector<std::pair<double, double>> knots;  // (u in [0,1), lift value at u)
    knots.reserve(m + 1);
    knots.emplace_back(0.0, lift_at(tstar) - tstar);  // degree 1 shift
    for (std::size_t j = 0; j < m; ++j) {
        double u = wrap(t[j]);
        double shift = t[j] - u;
        knots.emplace_back(u, y[j] - shift);
    }
    std::sort(knots.begin(), knots.end());
    PLMap g;
    g.degree = 1;
    for (auto& [u, v] : knots) {
        if (!g.breakpoints.empty() && u - g.breakpoints.back() <= kKnotTol) continue;
        g.breakpoints.push_back(u);
        g.lift_values.push_back(v);
    }
    g.breakpoints.push_back(1.0);
    g.lift_values.push_back(g.lift_values.front() + 1.0);
    g.validate();
    return g;
}

PLMap compose(const PLMap& outer, const PLMap& inner) {
    // Breakpoints: inner's, plus inner-preimages of outer's circle knots.
    std::vector<double> bps(inner.breakpoints.begin(), inner.breakpoints.end() - 1);
    for (std::size_t i = 0; i < inner.pieces(); ++i) {
        double t0 = inner.breakpoints[i], t1 = inner.breakpoints[i + 1];
        double v0 = inner.lift_values[i], v1 = inner.lift_values[i + 1];
        double lo = std::min(v0, v1), hi = std::max(v0, v1);
        double s = (v1 - v0) / (t1 - t0);
        if (s == 0.0) continue;
        for (std::size_t j = 0; j + 1 < outer.breakpoints.size(); ++j) {
            double b = outer.breakpoints[j];
            long m0 = static_cast<long>(std::ceil(lo - b - 1e-12));
            long m1 = static_cast<long>(std::floor(hi - b + 1e-12));
            for (long m = m0; m <= m1; ++m) {
                double x = t0 + (b + static_cast<double>(m) - v0) / s;
                if (x > t0 + kKnotTol && x < t1 - kKnotTol) bps.push_back(x);
            }
        }
    }
    bps.push_back(0.0);
    sort_dedupe(bps, kKnotTol);
    while (!bps.empty() && bps.back() >= 1.0 - kKnotTol) bps.pop_back();

    PLMap h;
    h.degree = outer.degree * inner.degree;
    h.breakpoints = bps;
    h.breakpoints.push_back(1.0);
    h.lift_values.reserve(h.breakpoints.size());
    for (std::size_t i = 0; i + 1 < h.breakpoints.size(); ++i)
        h.lift_values.push_back(outer.lift(inner.lift(h.breakpoints[i])));
    h.lift_values.push_back(h.lift_values.front() + h.degree);
    return h;
}

namespace {

// Sup over [a, b] of the distance of the value to the nearest integer.
double max_dist_to_int(double a, double b) {
    if (a > b) std::swap(a, b);
    // A half-integer inside the interval -> 1/2 is attained.
    double first_half = std::floor(2.0 * a) / 2.0 + 0.5;
    bool has_half = false;
    for (double hpt = first_half; hpt <= b + 1e-15; hpt += 0.5) {
        if (hpt >= a - 1e-15 && std::fabs(hpt - std::round(hpt)) > 0.25) {
            has_half = true;
            break;
        }
    }
    auto tent = [](double v) {
        double d = std::fabs(v - std::round(v));
        return d;
    };
    if (has_half) return 0.5;
    return std::max(tent(a), tent(b));
}

}  // namespace

double c0_distance(const PLMap& f, const PLMap& g) {
    std::vector<double> bps = f.breakpoints;
    bps.insert(bps.end(), g.breakpoints.begin(), g.breakpoints.end());
    sort_dedupe(bps, 0.0);
    double best = 0.0;
    for (std::size_t i = 0; i + 1 < bps.size(); ++i) {
        double ha = f.lift(bps[i]) - g.lift(bps[i]);
        double hb = f.lift(bps[i + 1]) - g.lift(bps[i + 1]);
        best = std::max(best, max_dist_to_int(ha, hb));
        if (best >= 0.5) return 0.5;
    }
    return best;
}

bool LocalHomeo::is_identity() const {
    double c = map.lift_values[0] - map.breakpoints[0];
    if (std::fabs(c - std::round(c)) > 1e-15) return false;
    for (std::size_t i = 0; i < map.breakpoints.size(); ++i)
        if (std::fabs(map.lift_values[i] - map.breakpoints[i] - c) > 1e-15) return false;
    return true;
}

LocalHomeo LocalHomeo::identity() {
    LocalHomeo t;
    t.support = Arc(0.0, 0.0, true);
    t.map = PLMap::identity();
    return t;
}

LocalHomeo LocalHomeo::knots(const Arc& support, const std::vector<std::pair<double, double>>& k) {
    double lo = support.lo(), hi = support.hi();
    std::vector<std::pair<double, double>> anchors;
    anchors.reserve(k.size() + 2);
    anchors.emplace_back(lo, lo);
    for (auto& [src, dst] : k) {
        if (!support.contains(src) || !support.contains(dst))
            throw Error(ErrorCode::SupportOverflow, "LocalHomeo: knot outside support");
        anchors.emplace_back(src, dst);
    }
    anchors.emplace_back(hi, hi);
    LocalHomeo t;
    t.support = support;
    t.map = PLMap::from_circle_anchors(anchors);
    // Strict monotonicity of the lift makes this a circle homeomorphism.
    for (std::size_t i = 0; i + 1 < t.map.lift_values.size(); ++i)
        if (t.map.lift_values[i + 1] - t.map.lift_values[i] <= 0.0)
            throw Error(ErrorCode::MonotonicityBreak, "LocalHomeo: knots not increasing");
    return t;
}

LocalHomeo LocalHomeo::knot(const Arc& support, double src, double dst) {
    return knots(support, {{src, dst}});
}

PLMap compose_local(const PLMap& f, const LocalHomeo& t) { return compose(t.map, f); }

SampledMap SampledMap::from_plmap(const PLMap& f, int n) {
    SampledMap s;
    s.degree = f.degree;
    s.lipschitz = f.max_abs_slope();
    s.lift_samples.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        s.lift_samples[static_cast<std::size_t>(i)] = f.lift(static_cast<double>(i) / n);
    return s;
}

PLMap pl_approximate(const SampledMap& samples, double eps, double min_slope) {
    const std::size_t n = samples.lift_samples.size();
    if (n < 2) throw Error(ErrorCode::ResolutionTooCoarse, "pl_approximate: too few samples");
    const double h = samples.grid_step();
    if (samples.lipschitz * h / 2.0 >= eps)
        throw Error(ErrorCode::ResolutionTooCoarse,
                    "pl_approximate: sample spacing cannot certify eps at this modulus");

    std::vector<double> m(n);
    double prev_sign = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        double v0 = samples.lift_samples[i];
        double v1 = (i + 1 < n) ? samples.lift_samples[i + 1]
                                : samples.lift_samples[0] + samples.degree;
        m[i] = (v1 - v0) / h;
        if (std::fabs(m[i]) >= min_slope) prev_sign = m[i] > 0 ? 1.0 : -1.0;
    }
    // Clamp flat pieces to +-min_slope, carrying the sign of the last steep
    // piece so plateaus tilt consistently.
    std::vector<double> mc = m;
    double sign = 1.0;
    double drift = 0.0;  // total lift change introduced by clamping
    for (std::size_t i = 0; i < n; ++i) {
        if (std::fabs(m[i]) >= min_slope) {
            sign = m[i] > 0 ? 1.0 : -1.0;
            continue;
        }
        mc[i] = sign * min_slope;
        drift += (mc[i] - m[i]) * h;
    }
    // Redistribute the drift over steep pieces so the lift still closes.
    if (drift != 0.0) {
        double steep_weight = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (std::fabs(mc[i]) >= 10.0 * min_slope) steep_weight += h;
        if (steep_weight <= 0.0)
            throw Error(ErrorCode::ResolutionTooCoarse,
                        "pl_approximate: map too flat to absorb slope clamping");
        for (std::size_t i = 0; i < n; ++i)
            if (std::fabs(mc[i]) >= 10.0 * min_slope) mc[i] -= drift / steep_weight;
    }

    PLMap g;
    g.degree = samples.degree;
    g.breakpoints.resize(n + 1);
    g.lift_values.resize(n + 1);
    g.breakpoints[0] = 0.0;
    g.lift_values[0] = samples.lift_samples[0];
    double dev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        g.breakpoints[i + 1] = (i + 1 < n) ? static_cast<double>(i + 1) * h : 1.0;
        g.lift_values[i + 1] = g.lift_values[i] + mc[i] * h;
        if (i + 1 < n) dev = std::max(dev, std::fabs(g.lift_values[i + 1] - samples.lift_samples[i + 1]));
    }
    // Snap the seam (clamp redistribution is exact up to rounding).
    g.lift_values[n] = g.lift_values[0] + samples.degree;
    if (dev + samples.lipschitz * h / 2.0 >= eps)
        throw Error(ErrorCode::ResolutionTooCoarse, "pl_approximate: cannot certify eps");
    g = g.simplified();
    g.validate();
    return g;
}

}  // namespace erg
