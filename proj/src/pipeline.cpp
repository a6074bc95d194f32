#include "erg/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "erg/errors.hpp"

namespace erg {

namespace {

bool power_of_two(int n) { return n >= 16 && (n & (n - 1)) == 0; }

// Grid run of a predicate over the samples of a return structure, as the
// closed arc spanned by the contiguous block of true samples containing the
// sample nearest to seed.  Throws DegenerateGeometry when that sample fails
// the predicate.
template <typename Pred>
Arc grid_run(const ReturnStructure& rs, double seed, Pred pred, const char* what) {
    std::size_t qi = rs.index_near(seed);
    if (!pred(rs.samples[qi]))
        throw Error(ErrorCode::DegenerateGeometry,
                    std::string("component seed falls outside ") + what);
    std::size_t lo = qi, hi = qi;
    while (lo > 0 && pred(rs.samples[lo - 1])) --lo;
    while (hi + 1 < rs.samples.size() && pred(rs.samples[hi + 1])) ++hi;
    return Arc::from_endpoints(rs.samples[lo].x, rs.samples[hi].x, true);
}

std::pair<PLMap, PerturbationPlan> perturb_case_b(const PLMap& f, const Potential& phi,
                                                  const CaseReport& rep, const RunConfig& cfg,
                                                  double eps_c) {
    const int grid = cfg.grid;
    const double h = 1.0 / grid;

    EQResult eq = build_E_q_q0(f, phi, rep, rep.m0, grid);
    double delta = find_delta(f, phi, eq, rep.cbar, rep.m0, grid, rep.eta, eps_c);
    Arc delta_ball(eq.q0, delta, true);
    Arc I_arc = arc_union(eq.E, delta_ball);
    int horizon = cfg.horizon_factor * rep.m0;

    ReturnStructure rs = return_structure(f, phi, {I_arc}, horizon, grid);

    Arc W0 = grid_run(
        rs, eq.q, [&](const ReturnSample& s) { return s.returns && delta_ball.contains(s.mapped); },
        "the returning set of the radius ball");
    // The q-component must sit inside E, clear of the ball around q0.
    if (circle_dist(W0.center, eq.q0) <= W0.radius + delta + h ||
        !eq.E.contains(W0.lo()) || !eq.E.contains(W0.hi()))
        throw Error(ErrorCode::DegenerateGeometry, "q-component leaks out of the segment");

    ReturnSample q_sample = first_return(f, phi, {I_arc}, eq.q, horizon);
    if (!q_sample.returns)
        throw Error(ErrorCode::DegenerateGeometry, "q does not return to the domain");
    double psi_q = q_sample.psi;

    AlphaChoice ac = choose_alpha(rs, W0, eq.q, psi_q, rep.m0, rep.eta, delta_ball, grid);
    ReturnSample a_sample = first_return(f, phi, {I_arc}, ac.alpha, horizon);
    if (!a_sample.returns)
        throw Error(ErrorCode::NoValidAlpha, "alpha does not return to the domain");
    double f2_alpha = a_sample.mapped;
    int n_alpha = a_sample.n;

    T1Result t1 = build_T1(f2_alpha, ac.alpha, I_arc, grid);

    Arc W_alpha = grid_run(
        rs, ac.alpha,
        [&](const ReturnSample& s) {
            return s.returns && W0.contains(s.x) && t1.V_L.contains(s.mapped);
        },
        "the straightened-return set");

    double R1 = std::max(circle_dist(ac.alpha, W_alpha.lo()),
                         circle_dist(ac.alpha, W_alpha.hi())) +
                h;
    // On the circle the straightened-return component always reaches the end
    // of the segment at q, so a taper ball inside the segment cannot contain
    // it.  The escape argument only needs the taper to stay clear of the ball
    // around q0 and inside the perturbation budget; it may spill past q.
    double R2 = std::min({circle_dist(ac.alpha, eq.q0) - delta - h, 2.0 * R1 + 4.0 * h,
                          cfg.epsilon / 2.0});
    if (R2 <= R1)
        throw Error(ErrorCode::DegenerateGeometry, "no room between escape radii");

    // Straightened first-return tables for the radial schedule.
    std::vector<double> xs, psi, f2t;
    std::vector<bool> in_D;
    for (const ReturnSample& s : rs.samples) {
        xs.push_back(s.x);
        in_D.push_back(s.returns);
        psi.push_back(s.psi);
        f2t.push_back(s.returns ? t1.t1(s.mapped) : s.x);
    }
    AlphaSchedule sched =
        lambda_schedule(xs, in_D, psi, f2t, ac.alpha, n_alpha, R1, R2, rep.eta, grid);
    sched.z_max = ac.z_max;
    sched.psi_alpha = ac.psi_alpha;
    sched.psi_zmax = ac.psi_zmax;
    sched.psi_q = psi_q;
    LocalHomeo t2 = build_T2(sched);

    PerturbationPlan plan;
    plan.tag = CaseTag::CaseIIb;
    plan.report = rep;
    plan.periodic_point = ac.alpha;
    plan.period = n_alpha;
    plan.steps = {t1.t1, t2};
    plan.supports = {t1.V_L};
    if (!t2.is_identity()) plan.supports.push_back(t2.support);
    plan.schedule = sched;
    CaseIIbGeometry geom;
    geom.q = eq.q;
    geom.q0 = eq.q0;
    geom.n_q = eq.n_q;
    geom.E = eq.E;
    geom.delta = delta;
    geom.I_arc = I_arc;
    geom.W0 = W0;
    geom.W_alpha = W_alpha;
    geom.tube_radius = t1.tube_radius;
    geom.V_L = t1.V_L;
    geom.horizon = horizon;
    plan.geometry = geom;

    PLMap fhat = assemble(f, plan);
    return {fhat, plan};
}

}  // namespace

void RunConfig::validate() const {
    if (!(epsilon > 0.0 && epsilon < 0.5))
        throw Error(ErrorCode::ConfigError, "epsilon must lie in (0, 1/2)");
    if (!power_of_two(grid)) throw Error(ErrorCode::ConfigError, "grid must be a power of two >= 16");
    if (!power_of_two(bins)) throw Error(ErrorCode::ConfigError, "bins must be a power of two >= 16");
    if (horizon0 < 1 || horizon_factor < 1 || m0_cap < 1 || p_max < 1)
        throw Error(ErrorCode::ConfigError, "horizons and caps must be positive");
    if (tol <= 0.0 || eta <= 0.0) throw Error(ErrorCode::ConfigError, "tol and eta must be positive");
}

PipelineResult run_pipeline(const PLMap& f0, const Potential& phi0, const RunConfig& cfg) {
    cfg.validate();
    f0.validate();
    phi0.validate();

    PipelineResult res;
    res.f = f0.simplified();
    res.base_bound = ulam_upper_bound(res.f, phi0, cfg.bins);
    res.beta = res.base_bound.value;
    Potential phi = normalize(phi0, res.beta);

    // Support proxies: optimal-cycle bins by potential, best first.
    std::vector<int> cyc = res.base_bound.cycle;
    std::sort(cyc.begin(), cyc.end());
    cyc.erase(std::unique(cyc.begin(), cyc.end()), cyc.end());
    UlamModel model = build_ulam(res.f, phi0, cfg.bins);
    // Bins tied at the top of a flat maximum are ordered by their margin: the
    // circular distance to the nearest bin whose potential drops below theirs.
    // A proxy on the edge of a plateau leaves the construction no room on one
    // side, so interior bins go first.
    auto pot = [&](int b) { return model.bin_potential[static_cast<std::size_t>(b)]; };
    auto margin = [&](int b) {
        for (int r = 1; 2 * r < cfg.bins; ++r) {
            int lo = (b - r + cfg.bins) % cfg.bins;
            int hi = (b + r) % cfg.bins;
            if (pot(lo) < pot(b) - 1e-12 || pot(hi) < pot(b) - 1e-12) return r;
        }
        return cfg.bins / 2;
    };
    std::vector<int> marg(model.bin_potential.size(), 0);
    for (int b : cyc) marg[static_cast<std::size_t>(b)] = margin(b);
    std::stable_sort(cyc.begin(), cyc.end(), [&](int a, int b) {
        if (pot(a) != pot(b)) return pot(a) > pot(b);
        return marg[static_cast<std::size_t>(a)] > marg[static_cast<std::size_t>(b)];
    });
    if (cyc.empty()) throw Error(ErrorCode::ConstructionFailed, "empty optimal cycle");
    const std::size_t max_proxies = std::min<std::size_t>(cyc.size(), 8);

    CertifyOptions copt;
    copt.bins = cfg.bins;
    copt.grid = cfg.grid;
    copt.p_max = cfg.p_max;
    copt.seed = cfg.seed;
    copt.tol = cfg.tol;
    copt.eta = cfg.eta;

    std::string last_error = "no attempt ran";
    bool have_fallback = false;
    PipelineResult fallback;

    for (double eps_c = cfg.epsilon / 4.0; eps_c >= cfg.epsilon / 32.0 - 1e-15; eps_c /= 2.0) {
        for (std::size_t pi = 0; pi < max_proxies; ++pi) {
            ++res.attempts;
            double x = (static_cast<double>(cyc[pi]) + 0.5) / cfg.bins;
            try {
                auto T0 = std::chrono::steady_clock::now();
                auto lap = [&](const char* what) {
                    if (!std::getenv("ERG_TRACE")) return;
                    auto T1 = std::chrono::steady_clock::now();
                    std::fprintf(stderr, "[trace] eps_c=%g proxy=%zu %s %.2fs\n", eps_c, pi, what,
                                 std::chrono::duration<double>(T1 - T0).count());
                    T0 = T1;
                };
                CaseReport rep =
                    case_split(res.f, phi, x, eps_c, cfg.m0_cap, cfg.grid, cfg.eta, cfg.horizon0);
                lap("case_split");
                // A closing residual beyond the tolerance would fail its
                // lemma check anyway; skip the expensive certification.
                if (rep.tag == CaseTag::CaseI && std::fabs(rep.residual) > cfg.tol)
                    throw Error(ErrorCode::ConstructionFailed,
                                "case I residual exceeds the tolerance at this radius");
                std::pair<PLMap, PerturbationPlan> built = [&] {
                    switch (rep.tag) {
                        case CaseTag::CaseI:
                            return perturb_case_one(res.f, phi, rep, Arc(x, eps_c, true), cfg.grid);
                        case CaseTag::CaseIIa:
                            return perturb_case_a(res.f, phi, rep, cfg.grid);
                        case CaseTag::CaseIIb:
                        default:
                            return perturb_case_b(res.f, phi, rep, cfg, eps_c);
                    }
                }();
                lap("build");
                built.second.beta = res.beta;
                if (built.second.steps.empty()) built.first = assemble(res.f, built.second);
                if (c0_distance(res.f, built.first) >= cfg.epsilon)
                    throw Error(ErrorCode::ConstructionFailed,
                                "assembled map drifts beyond the budget");
                res.fhat = built.first;
                res.plan = built.second;
                res.certificate =
                    certify(res.f, res.fhat, res.plan, phi0, cfg.epsilon, copt);
                lap("certify");
                if (res.certificate.verdict) return res;
                if (!have_fallback) {
                    fallback = res;
                    have_fallback = true;
                }
            } catch (const Error& e) {
                last_error = std::string(error_code_name(e.code)) + ": " + e.what();
                if (std::getenv("ERG_TRACE"))
                    std::fprintf(stderr, "[trace] eps_c=%g proxy=%zu x=%.6f failed: %s\n", eps_c,
                                 pi, x, last_error.c_str());
            }
        }
    }
    if (have_fallback) return fallback;
    throw Error(ErrorCode::ConstructionFailed, "retry ladder exhausted (" + last_error + ")");
}

}  // namespace erg
