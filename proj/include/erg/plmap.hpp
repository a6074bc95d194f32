#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "erg/circle.hpp"

namespace erg {

// Continuous piecewise-linear circle endomorphism, stored as its lift on
// [0, 1]: breakpoints 0 = t_0 < ... < t_k = 1 with lift values v_0..v_k,
// v_k = v_0 + degree.  Evaluation is interpolation then reduction mod 1.
struct PLMap {
    std::vector<double> breakpoints;
    std::vector<double> lift_values;
    int degree = 1;

    void validate() const;

    std::size_t pieces() const { return breakpoints.size() - 1; }
    double slope(std::size_t i) const {
        return (lift_values[i + 1] - lift_values[i]) / (breakpoints[i + 1] - breakpoints[i]);
    }
    double max_abs_slope() const;
    double min_abs_slope() const;
    bool finite_preimages() const { return min_abs_slope() > 0.0; }

    // Lift F(t) for any real t, with F(t + 1) = F(t) + degree.
    double lift(double t) const;

    double operator()(double x) const { return wrap(lift(wrap(x))); }

    double iterate(double x, int n) const;

    // All solutions of f(x) = y, one linear solve per piece.
    // Throws ZeroSlopePiece if a constant piece exists.
    std::vector<double> preimages(double y) const;

    // Merge adjacent pieces with equal slope.
    PLMap simplified(double slope_tol = 1e-9) const;

    // Lift t -> degree * t + offset.
    static PLMap linear(int degree, double offset = 0.0);
    static PLMap identity() { return linear(1, 0.0); }
    static PLMap rotation(double r) { return linear(1, r); }

    // Degree-1 map through circle anchor pairs (x_j -> y_j), given in
    // counterclockwise order of x; affine between consecutive anchors and
    // between the last and the first (going around).  Suited to local
    // homeomorphisms: anchors on the diagonal pin the identity.
    static PLMap from_circle_anchors(const std::vector<std::pair<double, double>>& anchors);
};

// outer(inner(x)) as a PLMap; degree multiplies.
PLMap compose(const PLMap& outer, const PLMap& inner);

// sup_x d(f(x), g(x)), exact over the merged breakpoint set.
double c0_distance(const PLMap& f, const PLMap& g);

// Circle homeomorphism equal to the identity outside a support arc.
struct LocalHomeo {
    Arc support;
    PLMap map;

    bool is_identity() const;
    double operator()(double x) const { return map(x); }

    static LocalHomeo identity();
    // Increasing bijection of the support arc fixing its endpoints and
    // mapping src to dst (both strictly inside the arc).
    static LocalHomeo knot(const Arc& support, double src, double dst);
    // Piecewise map of the support arc given as interior (src, dst) knots in
    // counterclockwise order; endpoints fixed.
    static LocalHomeo knots(const Arc& support, const std::vector<std::pair<double, double>>& k);
};

PLMap compose_local(const PLMap& f, const LocalHomeo& t);

// Uniform samples of the lift of a continuous circle endomorphism:
// value at i/n is lift_samples[i], and the lift continues with
// lift(1) = lift_samples[0] + degree.
struct SampledMap {
    std::vector<double> lift_samples;
    int degree = 1;
    double lipschitz = 0.0;  // modulus-of-continuity bound for the sampled map

    double grid_step() const { return 1.0 / static_cast<double>(lift_samples.size()); }
    static SampledMap from_plmap(const PLMap& f, int n);
};

// Piecewise-linear approximation with all slopes bounded away from zero,
// within eps of the samples, same degree.  Throws ResolutionTooCoarse when
// the declared modulus cannot certify eps-closeness at this spacing.
PLMap pl_approximate(const SampledMap& samples, double eps, double min_slope = 1e-3);

}  // namespace erg
