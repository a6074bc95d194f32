#include "erg/potential.hpp"

#include <algorithm>
#include <cmath>

#include "erg/errors.hpp"

namespace erg {

void Potential::validate() const {
    if (samples.size() < 2)
        throw Error(ErrorCode::ConfigError, "Potential: need at least two samples");
    if (lipschitz < 0.0) throw Error(ErrorCode::ConfigError, "Potential: negative Lipschitz bound");
    const double h = grid_step();
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double next = samples[(i + 1) % samples.size()];
        if (std::fabs(next - samples[i]) > lipschitz * h + 1e-12)
            throw Error(ErrorCode::ConfigError,
                        "Potential: samples violate the declared Lipschitz bound");
    }
}

double Potential::operator()(double x) const {
    const std::size_t n = samples.size();
    double t = wrap(x) * static_cast<double>(n);
    std::size_t i = static_cast<std::size_t>(t);
    if (i >= n) i = n - 1;
    double u = t - static_cast<double>(i);
    return samples[i] + u * (samples[(i + 1) % n] - samples[i]);
}

double Potential::max() const { return *std::max_element(samples.begin(), samples.end()); }
double Potential::min() const { return *std::min_element(samples.begin(), samples.end()); }

double Potential::max_over(const Arc& arc) const {
    double best = std::max((*this)(arc.lo()), (*this)(arc.hi()));
    for (double x : grid_points_in_arc(arc, grid())) best = std::max(best, (*this)(x));
    return best;
}

Potential Potential::shifted(double c) const {
    Potential p = *this;
    for (double& v : p.samples) v += c;
    return p;
}

Potential Potential::sample(const std::function<double(double)>& f, int n, double lipschitz) {
    Potential p;
    p.lipschitz = lipschitz;
    p.samples.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        p.samples[static_cast<std::size_t>(i)] = f(static_cast<double>(i) / n);
    return p;
}

Potential Potential::constant(double c, int n) {
    Potential p;
    p.lipschitz = 0.0;
    p.samples.assign(static_cast<std::size_t>(n), c);
    return p;
}

}  // namespace erg
