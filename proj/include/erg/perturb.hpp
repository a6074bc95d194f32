#pragma once

#include <optional>
#include <string>
#include <vector>

#include "erg/birkhoff.hpp"
#include "erg/circle.hpp"
#include "erg/plmap.hpp"
#include "erg/potential.hpp"

namespace erg {

enum class CaseTag { CaseI, CaseIIa, CaseIIb };

const char* case_tag_name(CaseTag t);
CaseTag case_tag_from_name(const std::string& s);

// Outcome of the dichotomy on return sums near the support proxy x.
struct CaseReport {
    CaseTag tag = CaseTag::CaseI;
    double x = 0.0;    // center of the search ball
    double eps = 0.0;  // its radius
    double eta = 0.0;

    // Case I
    double x0 = 0.0;
    int n0 = 0;
    int n1 = 0;           // first return of x0
    double residual = 0.0;  // S_{n1} f(x0), reported instead of the exact 0

    // Case II
    double a0 = 0.0;
    int m0 = 0;
    double cbar = 0.0;
    double cbar_bar = 0.0;
    BirkhoffRecord witness{};    // (q, n_q) in IIa; (z1, n_{z1}) in IIb
    double witness_image = 0.0;  // f^{n} at the witness
};

// Radial escape schedule around the periodic source alpha.
struct AlphaSchedule {
    double alpha = 0.0;
    int n_q = 0;  // N_ret(alpha)
    double R1 = 0.0, R2 = 0.0;
    std::vector<double> s;  // s_0 = R1 > s_1 > ...
    std::vector<double> r;  // r_i = min(Q(s_i), s_i)
    double P_R1 = 0.0;
    bool flat = false;  // P(R1) <= eta: schedule degenerates to the identity
    double z_max = 0.0;
    double psi_alpha = 0.0;
    double psi_q = 0.0;
    double psi_zmax = 0.0;
};

// Context of the Case IIb geometry, carried for the verification suites.
struct CaseIIbGeometry {
    double q = 0.0, q0 = 0.0;
    int n_q = 0;
    Arc E{};
    double delta = 0.0;          // Prop. 3.3 radius around q0
    Arc I_arc{};                 // E union B_delta[q0]
    Arc W0{};
    Arc W_alpha{};
    double tube_radius = 0.0;    // delta_3 of V(L)
    Arc V_L{};
    int horizon = 0;
};

struct PerturbationPlan {
    CaseTag tag = CaseTag::CaseI;
    std::vector<LocalHomeo> steps;  // applied in order: f -> steps[0] o f -> ...
    double periodic_point = 0.0;
    int period = 0;
    std::vector<Arc> supports;
    std::optional<AlphaSchedule> schedule;
    std::optional<CaseIIbGeometry> geometry;
    CaseReport report{};
    double beta = 0.0;  // normalization constant used for phi
};

// The dichotomy: runs the return search in B_eps(x); best sum >= -eta is
// Case I (with the first-return decomposition of the witness), otherwise
// Case II with the c-bar analysis and the (a)/(b) subcase decided by whether
// a near-optimal witness maps into the open ball.
CaseReport case_split(const PLMap& f, const Potential& phi, double x, double eps, int m0, int grid,
                      double eta, int horizon);

// Case I: T supported in B mapping f^{n1}(x0) to x0; returns T o f with x0
// periodic of period n1, and the plan.
std::pair<PLMap, PerturbationPlan> perturb_case_one(const PLMap& f, const Potential& phi,
                                                    const CaseReport& report, const Arc& B,
                                                    int grid);

// Case II(a): T supported in the closed ball mapping f^{n_q}(q) to q.
std::pair<PLMap, PerturbationPlan> perturb_case_a(const PLMap& f, const Potential& phi,
                                                  const CaseReport& report, int grid);

// Case II(b) pieces -------------------------------------------------------

struct EQResult {
    double q0 = 0.0;
    double q = 0.0;
    int n_q = 0;
    double q_average = 0.0;  // (1/n_q) S_{n_q} f(q)
    Arc E{};
};

// q0 = boundary image of the c-bar witness; P = preimages of q0 up to depth
// m0 inside the closed ball; P~ filters by average >= c-bar - eta; q is the
// element of P~ closest to q0; E is the closed arc [q, q0].
EQResult build_E_q_q0(const PLMap& f, const Potential& phi, const CaseReport& report, int m0,
                      int grid, std::size_t branch_cap = 200000);

// Largest delta (halving from a geometric cap) such that every grid z in E
// outside the q-component of f^{-j}(B_delta[q0]) has (1/j) S_j f(z) <
// c-bar - eta/2 for all j <= m0.  Throws DeltaCollapse at grid resolution.
double find_delta(const PLMap& f, const Potential& phi, const EQResult& eq, double cbar, int m0,
                  int grid, double eta, double eps_c);

struct AlphaChoice {
    double z_max = 0.0;
    double alpha = 0.0;
    double psi_alpha = 0.0;
    double psi_zmax = 0.0;
};

// z_max = argmax of psi on the closure of W0; alpha near z_max with
// 4 m0 [psi(z_max) - psi(alpha)] <= |psi(alpha) - psi(q)|, psi(alpha) >=
// psi(q), and f_2(alpha) interior to B_delta[q0].
AlphaChoice choose_alpha(const ReturnStructure& rs, const Arc& W0, double q, double psi_q, int m0,
                         double eta, const Arc& delta_ball, int grid);

// T1: increasing bijection of V(L) fixing its endpoints, mapping f_2(alpha)
// to alpha; V(L) is the tube of radius delta_3 around the segment L from
// alpha to f_2(alpha), delta_3 maximal with V(L) inside the interior of I.
struct T1Result {
    LocalHomeo t1;
    Arc V_L{};
    double tube_radius = 0.0;
};
T1Result build_T1(double f2_alpha, double alpha, const Arc& I_arc, int grid);

// Grid envelopes P(s), Q(s) and the sequences s_i (monotone pseudo-inverse
// of P at thresholds 2^-i P(R1)) and r_i = min(Q(s_i), s_i).  Table-driven so
// synthetic return data can exercise the closed forms.
AlphaSchedule lambda_schedule(const std::vector<double>& xs, const std::vector<bool>& in_D,
                              const std::vector<double>& psi, const std::vector<double>& f2_tilde,
                              double alpha, int n_q, double R1, double R2, double eta, int grid);

// T2: increasing PL homeomorphism of B_R2(alpha) fixing alpha, radius map
// through the anchors rho(r_k) = s_{k-1}, joined to the identity at R2.
LocalHomeo build_T2(const AlphaSchedule& schedule);

// Compose the plan steps onto f and verify the declared periodic point.
PLMap assemble(const PLMap& f, const PerturbationPlan& plan, double periodicity_tol = 1e-9);

}  // namespace erg
