#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "erg/birkhoff.hpp"
#include "erg/plmap.hpp"
#include "erg/potential.hpp"

namespace erg {

// Outer Ulam discretization: bin-to-bin mass fractions under f (row
// stochastic) and the per-bin max of phi.  transition[i] lists (j, fraction)
// with fraction > 0 only if f(closed bin i) meets closed bin j.
struct UlamModel {
    int bins = 0;
    std::vector<std::vector<std::pair<int, double>>> transition;
    std::vector<double> bin_potential;
};

UlamModel build_ulam(const PLMap& f, const Potential& phi, int bins);

// Certified upper bound for sup over invariant measures of the phi integral:
// the linear program over invariance-balanced edge flows of the outer
// enclosure, whose optimum is the maximum mean cycle of the transition graph
// with source-bin potentials.  cycle lists the bins of an optimal cycle.
struct UlamBound {
    double value = 0.0;
    double bar = 0.0;
    std::vector<int> cycle;
};

UlamBound ulam_upper_bound(const PLMap& f, const Potential& phi, int bins);
UlamBound ulam_upper_bound(const UlamModel& model);

// Transition matrix + optimal cycle indicator as CSV, for offline inspection.
void dump_ulam_csv(const UlamModel& model, const UlamBound& bound, const std::string& path);

struct Orbit {
    std::vector<double> points;  // one full period, starting at the smallest
    int period = 0;
};

// All periodic orbits of period <= p_max, one linear solve per piece of the
// lift of f^p; exact in lift arithmetic, rotations deduplicated.
// Throws BranchExplosion when the composed piece count exceeds piece_cap.
std::vector<Orbit> periodic_orbits(const PLMap& f, int p_max, std::size_t piece_cap = 200000);

struct LowerBound {
    double value = 0.0;       // best of the two routes below
    double periodic_best = 0.0;
    Orbit witness{};
    double random_tail_best = 0.0;
};

// Max orbit average of phi over enumerated periodic orbits, plus the best
// tail average over seeded random orbits as a secondary lower bound.
LowerBound best_periodic_average(const PLMap& f, const Potential& phi, int p_max, std::uint64_t seed,
                                 int n_orbits = 10000, int orbit_len = 1000);

// phi0 - beta, beta the certified upper bound; afterwards every invariant
// average is <= 0 up to the bar width.
Potential normalize(const Potential& phi0, double beta);

}  // namespace erg
