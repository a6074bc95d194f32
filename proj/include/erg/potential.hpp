#pragma once

#include <functional>
#include <vector>

#include "erg/circle.hpp"

namespace erg {

// Grid-sampled continuous function on the circle with a Lipschitz bound;
// evaluation is cyclic linear interpolation.
struct Potential {
    std::vector<double> samples;
    double lipschitz = 0.0;

    void validate() const;

    int grid() const { return static_cast<int>(samples.size()); }
    double grid_step() const { return 1.0 / static_cast<double>(samples.size()); }

    double operator()(double x) const;

    double max() const;
    double min() const;

    // Exact max of the interpolant over a closed arc (attained at an arc
    // endpoint or an interior sample).
    double max_over(const Arc& arc) const;

    Potential shifted(double c) const;  // samples + c

    static Potential sample(const std::function<double(double)>& f, int n, double lipschitz);
    static Potential constant(double c, int n = 16);
};

}  // namespace erg
