#pragma once

#include <optional>
#include <vector>

#include "erg/circle.hpp"
#include "erg/plmap.hpp"
#include "erg/potential.hpp"

namespace erg {

// n-step Birkhoff sum of phi along the f-orbit of start.
struct BirkhoffRecord {
    double start = 0.0;
    int steps = 0;
    double sum = 0.0;
    double average = 0.0;
};

BirkhoffRecord birkhoff_sum(const PLMap& f, const Potential& phi, double x, int n);

// A value together with a rigorous one-sided grid error bar.
struct Bounded {
    double value = 0.0;
    double bar = 0.0;
};

// Lip(phi) * (1 + s + ... + s^(n-1)) * h: worst-case drift of an n-step sum
// between a grid point and any point within h of it, s = max |slope|.
double grid_sum_bar(const PLMap& f, const Potential& phi, int n, int grid);

// M_m = max over grid of (1/m) S_m f; the true sup lies in [M_m, M_m + bar].
Bounded max_finite_average(const PLMap& f, const Potential& phi, int m, int grid);

// Smallest m <= cap such that M_j + bar_j <= a/2 for every j in [m, 2m);
// by block decomposition this certifies (1/n) S_n f <= a/2 for all n >= m.
// Throws NotFound if no m <= cap qualifies.
int m_zero(const PLMap& f, const Potential& phi, double a, int grid, int cap = 64);

// A grid start point whose orbit re-enters B after n steps.
struct ReturnPair {
    double y = 0.0;
    int n = 0;
    double sum = 0.0;
};

// Pair in B maximizing S_n f(y) over grid starts and n <= horizon
// (ties: smaller n, then smaller y).  nullopt when no grid orbit returns.
std::optional<ReturnPair> best_return(const PLMap& f, const Potential& phi, const Arc& B,
                                      int horizon, int grid);

// Best pair with S_n f(y) >= -eta, or nullopt (Case I evidence at this grid).
std::optional<ReturnPair> find_nonneg_return(const PLMap& f, const Potential& phi, const Arc& B,
                                             int horizon, int grid, double eta);

// c_k = sup over K_k = closed ball cap f^{-k}(closed ball) of (1/k) S_k f,
// c-bar = max over k <= m0, with the attaining record and grid bar.
// Witness fields are restricted to first-return pairs (no intermediate visit
// to the closed ball) so a closing perturbation does not touch the orbit.
struct CbarAnalysis {
    double value = 0.0;  // c-bar over all pairs
    double bar = 0.0;
    BirkhoffRecord witness{};      // best first-return pair overall
    double witness_image = 0.0;    // f^k at the witness
    bool has_interior = false;     // an interior-mapping near-optimal witness exists
    BirkhoffRecord interior_witness{};
    double interior_image = 0.0;
};

// Throws EmptyReturnSet if every K_k is empty at this resolution.
// delta_bd: a witness image within delta_bd of the ball boundary is not
// counted as interior.
CbarAnalysis c_bar(const PLMap& f, const Potential& phi, double x0, double eps, int m0, int grid,
                   double eta, double delta_bd);

// First-return data of one point with respect to a union of arcs.
struct ReturnSample {
    double x = 0.0;
    bool returns = false;
    int n = 0;          // N_ret
    double sum = 0.0;   // S_{N_ret} f
    double mapped = 0.0;  // f_2 = f^{N_ret}
    double psi = 0.0;   // sum / n
};

ReturnSample first_return(const PLMap& f, const Potential& phi, const std::vector<Arc>& domain,
                          double x, int horizon);

// Grid tables of N_ret, f_2 and psi over a domain I.  Points that do not
// come back within the horizon are marked non-returning (outside D).
struct ReturnStructure {
    std::vector<Arc> domain;
    int horizon = 0;
    std::vector<ReturnSample> samples;  // at grid points, counterclockwise per arc

    bool in_domain(double x) const;
    // Index of the grid sample nearest to x (by circle distance).
    std::size_t index_near(double x) const;
};

ReturnStructure return_structure(const PLMap& f, const Potential& phi,
                                 const std::vector<Arc>& domain, int horizon, int grid);

}  // namespace erg
