#include "erg/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "erg/errors.hpp"

namespace erg {

const char* case_tag_name(CaseTag t) {
    switch (t) {
        case CaseTag::CaseI: return "I";
        case CaseTag::CaseIIa: return "IIa";
        case CaseTag::CaseIIb: return "IIb";
    }
    return "?";
}

CaseTag case_tag_from_name(const std::string& s) {
    if (s == "I") return CaseTag::CaseI;
    if (s == "IIa") return CaseTag::CaseIIa;
    if (s == "IIb") return CaseTag::CaseIIb;
    throw Error(ErrorCode::ConfigError, "unknown case tag: " + s);
}

CaseReport case_split(const PLMap& f, const Potential& phi, double x, double eps, int m0, int grid,
                      double eta, int horizon) {
    CaseReport rep;
    rep.x = wrap(x);
    rep.eps = eps;
    rep.eta = eta;
    const Arc B(rep.x, eps, true);

    auto best = best_return(f, phi, B, horizon, grid);
    if (!best)
        throw Error(ErrorCode::EmptyReturnSet, "case_split: no grid orbit returns in the horizon");
    rep.n0 = best->n;

    if (best->sum <= eta) {
        // Every return sum sits at or below the normalization level, so the
        // recurrence is tight: split the best orbit at its visits to B and
        // keep the segment closest to a zero sum, so the closed orbit average
        // stays nearest the normalization level.
        rep.tag = CaseTag::CaseI;
        double z = best->y, seg_start = best->y, seg_sum = 0.0;
        int seg_len = 0;
        double best_abs = std::numeric_limits<double>::infinity();
        double best_seg = -std::numeric_limits<double>::infinity();
        bool have = false;
        for (int n = 1; n <= best->n; ++n) {
            seg_sum += phi(z);
            z = f(z);
            ++seg_len;
            if (!B.contains(z)) continue;
            bool take = false;
            if (seg_sum >= -eta) {
                if (!have || std::fabs(seg_sum) < best_abs) {
                    take = true;
                    have = true;
                    best_abs = std::fabs(seg_sum);
                }
            } else if (!have && seg_sum > best_seg) {
                take = true;  // fallback until a qualifying segment shows up
            }
            if (take) {
                rep.x0 = seg_start;
                rep.n1 = seg_len;
                rep.residual = seg_sum;
                best_seg = seg_sum;
            }
            seg_start = z;
            seg_sum = 0.0;
            seg_len = 0;
        }
        return rep;
    }

    rep.a0 = best->sum / best->n;
    rep.m0 = std::max(m_zero(f, phi, rep.a0, grid, m0), best->n + 1);
    CbarAnalysis cb = c_bar(f, phi, rep.x, eps, rep.m0, grid, eta, 2.0 / grid);
    rep.cbar = cb.value;
    rep.cbar_bar = cb.bar;
    if (cb.has_interior) {
        rep.tag = CaseTag::CaseIIa;
        rep.witness = cb.interior_witness;
        rep.witness_image = cb.interior_image;
    } else {
        rep.tag = CaseTag::CaseIIb;
        rep.witness = cb.witness;
        rep.witness_image = cb.witness_image;
    }
    return rep;
}

namespace {

// Close the loop: a single local homeomorphism supported in a small arc
// inside B, mapping src to dst, making dst periodic with the given period.
std::pair<PLMap, PerturbationPlan> closing_plan(const PLMap& f, const Arc& B, double src,
                                                double dst, int period, CaseTag tag,
                                                const CaseReport& rep, int grid) {
    PerturbationPlan plan;
    plan.tag = tag;
    plan.report = rep;
    plan.periodic_point = wrap(dst);
    plan.period = period;
    if (circle_dist(src, dst) < 1e-13) return {f.simplified(), plan};

    Arc core = Arc::between(src, dst, true);
    double pad = 0.5 * std::min(B.boundary_gap(core.lo()), B.boundary_gap(core.hi()));
    pad = std::min(pad, 2.0 * core.radius + 1.0 / grid);
    if (pad < 1e-12)
        throw Error(ErrorCode::DegenerateGeometry, "closing support collapses at the boundary");
    Arc supp(core.center, core.radius + pad, true);
    if (supp.radius >= 0.5 - 1e-12)
        throw Error(ErrorCode::DegenerateGeometry, "closing support covers the circle");
    // The intermediate orbit points must stay off the support so the new
    // orbit truly closes; first returns guarantee it, this re-checks.
    double z = plan.periodic_point;
    for (int j = 1; j < period; ++j) {
        z = f(z);
        if (supp.contains(z))
            throw Error(ErrorCode::DegenerateGeometry, "orbit re-enters the closing support");
    }
    LocalHomeo t = LocalHomeo::knot(supp, src, dst);
    plan.steps = {t};
    plan.supports = {supp};
    return {compose_local(f, t).simplified(), plan};
}

}  // namespace

std::pair<PLMap, PerturbationPlan> perturb_case_one(const PLMap& f, const Potential& phi,
                                                    const CaseReport& report, const Arc& B,
                                                    int grid) {
    (void)phi;
    double src = f.iterate(report.x0, report.n1);
    return closing_plan(f, B, src, report.x0, report.n1, CaseTag::CaseI, report, grid);
}

std::pair<PLMap, PerturbationPlan> perturb_case_a(const PLMap& f, const Potential& phi,
                                                  const CaseReport& report, int grid) {
    (void)phi;
    const Arc B(report.x, report.eps, true);
    return closing_plan(f, B, report.witness_image, report.witness.start, report.witness.steps,
                        CaseTag::CaseIIa, report, grid);
}

EQResult build_E_q_q0(const PLMap& f, const Potential& phi, const CaseReport& report, int m0,
                      int grid, std::size_t branch_cap) {
    const Arc B(report.x, report.eps, true);
    const double q0 = report.witness_image;

    struct Cand {
        double x;
        int depth;
        double avg;
    };
    std::vector<Cand> ptilde;
    std::vector<double> cur{q0};
    std::size_t total = 0;
    for (int depth = 1; depth <= m0; ++depth) {
        std::vector<double> next;
        for (double y : cur)
            for (double p : f.preimages(y)) next.push_back(p);
        total += next.size();
        if (total > branch_cap)
            throw Error(ErrorCode::BranchExplosion, "preimage tree exceeds the branch cap");
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end(),
                               [](double a, double b) { return std::fabs(a - b) < 1e-12; }),
                   next.end());
        for (double p : next) {
            if (!B.contains(p)) continue;
            BirkhoffRecord rec = birkhoff_sum(f, phi, p, depth);
            if (rec.average >= report.cbar - report.eta)
                ptilde.push_back({p, depth, rec.average});
        }
        cur = std::move(next);
        if (cur.empty()) break;
    }
    // The defining witness chain belongs to the candidate set by construction;
    // add it explicitly so the set is never empty.
    ptilde.push_back({report.witness.start, report.witness.steps, report.witness.average});

    std::sort(ptilde.begin(), ptilde.end(),
              [&](const Cand& a, const Cand& b) {
                  return circle_dist(a.x, q0) < circle_dist(b.x, q0);
              });
    const double floor_dist = 8.0 / grid;
    const Cand* pick = nullptr;
    for (const Cand& c : ptilde)
        if (circle_dist(c.x, q0) >= floor_dist) {
            pick = &c;
            break;
        }
    if (!pick)
        throw Error(ErrorCode::DegenerateGeometry,
                    "every high-average preimage sits on top of the boundary image");
    EQResult eq;
    eq.q0 = wrap(q0);
    eq.q = wrap(pick->x);
    eq.n_q = pick->depth;
    eq.q_average = pick->avg;
    eq.E = Arc::between(eq.q, eq.q0, true);
    return eq;
}

double find_delta(const PLMap& f, const Potential& phi, const EQResult& eq, double cbar, int m0,
                  int grid, double eta, double eps_c) {
    const double h = 1.0 / grid;
    std::vector<double> xs = grid_points_in_arc(eq.E, grid);
    if (xs.size() < 4) throw Error(ErrorCode::DeltaCollapse, "E too short for the grid");
    std::size_t qi = 0;
    double bd = 1.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double d = circle_dist(xs[i], eq.q);
        if (d < bd) {
            bd = d;
            qi = i;
        }
    }
    // Trajectories and running sums up to m0 steps, per grid point.
    const std::size_t n = xs.size();
    std::vector<std::vector<double>> pos(static_cast<std::size_t>(m0 + 1),
                                         std::vector<double>(n));
    std::vector<std::vector<double>> sum(static_cast<std::size_t>(m0 + 1),
                                         std::vector<double>(n, 0.0));
    pos[0] = xs;
    for (int j = 1; j <= m0; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            sum[static_cast<std::size_t>(j)][i] =
                sum[static_cast<std::size_t>(j - 1)][i] + phi(pos[static_cast<std::size_t>(j - 1)][i]);
            pos[static_cast<std::size_t>(j)][i] = f(pos[static_cast<std::size_t>(j - 1)][i]);
        }

    std::vector<char> marked(n);
    for (double delta = std::min(circle_dist(eq.q, eq.q0) / 4.0, eps_c / 4.0); delta >= 4.0 * h;
         delta /= 2.0) {
        bool ok = true;
        for (int j = 1; j <= m0 && ok; ++j) {
            auto& pj = pos[static_cast<std::size_t>(j)];
            for (std::size_t i = 0; i < n; ++i)
                marked[i] = circle_dist(pj[i], eq.q0) <= delta ? 1 : 0;
            // Component of q inside the marked set, in grid order.
            std::size_t lo = qi, hi = qi;
            if (marked[qi]) {
                while (lo > 0 && marked[lo - 1]) --lo;
                while (hi + 1 < n && marked[hi + 1]) ++hi;
            } else {
                lo = 1;
                hi = 0;  // empty run
            }
            for (std::size_t i = 0; i < n && ok; ++i) {
                if (!marked[i] || (i >= lo && i <= hi)) continue;
                if (sum[static_cast<std::size_t>(j)][i] / j >= cbar - eta / 2.0) ok = false;
            }
        }
        if (ok) return delta;
    }
    throw Error(ErrorCode::DeltaCollapse, "no admissible radius above the grid resolution");
}

AlphaChoice choose_alpha(const ReturnStructure& rs, const Arc& W0, double q, double psi_q, int m0,
                         double eta, const Arc& delta_ball, int grid) {
    const double h = 1.0 / grid;
    const ReturnSample* zmax = nullptr;
    for (const ReturnSample& s : rs.samples) {
        if (!s.returns || !W0.contains(s.x)) continue;
        if (!zmax || s.psi > zmax->psi) zmax = &s;
    }
    if (!zmax) throw Error(ErrorCode::NoValidAlpha, "no returning sample in W0");

    // Room left for the straightening tube: distance to the ends of W0 and of
    // the mapped point to the ball boundary.  Breaks exact psi ties (flat
    // potential tops) away from the domain edge, where the tube has no space.
    auto room = [&](const ReturnSample& s) {
        return std::min({circle_dist(s.x, W0.lo()), circle_dist(s.x, W0.hi()),
                         delta_ball.boundary_gap(s.mapped)});
    };
    const ReturnSample* best = nullptr;
    for (const ReturnSample& s : rs.samples) {
        if (!s.returns || !W0.contains(s.x)) continue;
        // The straightening tube around the return segment has radius half the
        // image's boundary gap, and needs at least two grid steps to be
        // representable; require a four-step gap so the tube always fits.
        if (delta_ball.boundary_gap(s.mapped) <= 4.0 * h) continue;
        if (s.psi < psi_q - eta) continue;
        if (4.0 * m0 * (zmax->psi - s.psi) > (s.psi - psi_q) + 4.0 * m0 * eta) continue;
        if (!best || s.psi > best->psi || (s.psi == best->psi && room(s) > room(*best)))
            best = &s;
    }
    if (!best) throw Error(ErrorCode::NoValidAlpha, "no admissible point near the psi maximizer");
    AlphaChoice out;
    out.z_max = zmax->x;
    out.psi_zmax = zmax->psi;
    out.alpha = best->x;
    out.psi_alpha = best->psi;
    return out;
}

T1Result build_T1(double f2_alpha, double alpha, const Arc& I_arc, int grid) {
    const double h = 1.0 / grid;
    Arc L = Arc::between(alpha, f2_alpha, true);
    double gap = std::min(I_arc.boundary_gap(L.lo()), I_arc.boundary_gap(L.hi()));
    double delta3 = gap / 2.0;
    if (delta3 < 2.0 * h)
        throw Error(ErrorCode::SupportOverflow, "segment tube does not fit inside the domain");
    T1Result out;
    out.tube_radius = delta3;
    out.V_L = Arc(L.center, L.radius + delta3, true);
    out.t1 = circle_dist(f2_alpha, alpha) < 1e-13 ? LocalHomeo::identity()
                                                  : LocalHomeo::knot(out.V_L, f2_alpha, alpha);
    return out;
}

AlphaSchedule lambda_schedule(const std::vector<double>& xs, const std::vector<bool>& in_D,
                              const std::vector<double>& psi, const std::vector<double>& f2_tilde,
                              double alpha, int n_q, double R1, double R2, double eta, int grid) {
    AlphaSchedule sched;
    sched.alpha = wrap(alpha);
    sched.n_q = n_q;
    sched.R1 = R1;
    sched.R2 = R2;
    const double h = 1.0 / grid;

    struct Entry {
        double d;     // distance to alpha
        double psi;
        double df;    // distance of the mapped-and-straightened point to alpha
    };
    std::vector<Entry> e;
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (in_D[i]) e.push_back({circle_dist(xs[i], alpha), psi[i], circle_dist(f2_tilde[i], alpha)});
    if (e.empty()) throw Error(ErrorCode::DegenerateGeometry, "empty return domain");
    std::sort(e.begin(), e.end(), [](const Entry& a, const Entry& b) { return a.d < b.d; });

    sched.psi_alpha = e.front().psi;
    const std::size_t n = e.size();
    std::vector<double> pmax(n), qmin(n);
    double run = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        run = std::max(run, e[i].psi - sched.psi_alpha);
        pmax[i] = run;
    }
    run = std::numeric_limits<double>::infinity();
    for (std::size_t i = n; i-- > 0;) {
        run = std::min(run, e[i].df);
        qmin[i] = run;
    }
    auto P = [&](double s) {
        // sup of psi - psi(alpha) over returning points within distance s.
        std::size_t lo = 0, cnt = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (e[i].d <= s) {
                lo = i;
                ++cnt;
            } else
                break;
        return cnt == 0 ? 0.0 : std::max(0.0, pmax[lo]);
    };
    auto Q = [&](double s) {
        // inf of the straightened-return distance over points farther than s.
        for (std::size_t i = 0; i < n; ++i)
            if (e[i].d > s) return qmin[i];
        return std::numeric_limits<double>::infinity();
    };

    sched.P_R1 = P(R1);
    sched.s = {R1};
    // The flat shortcut is only for a potential that is constant to machine
    // precision near alpha; any genuine variation, however small, still
    // supports an escape ladder and the block-average bounds scale with P_R1
    // itself, so eta plays no role here.
    (void)eta;
    if (sched.P_R1 <= 1e-12) {
        sched.flat = true;
        return sched;
    }
    for (int i = 1; i <= 40; ++i) {
        double thr = sched.P_R1 * std::ldexp(1.0, -i);
        // Largest s with P(s) <= thr: just below the first sample whose
        // prefix max exceeds the threshold.
        double si = sched.s.back() * (1.0 - 1e-6);
        for (std::size_t k = 0; k < n; ++k)
            if (pmax[k] > thr && e[k].d <= si) {
                si = e[k].d * (1.0 - 1e-12) - 1e-15;
                break;
            }
        si = std::min(si, sched.s.back() * (1.0 - 1e-6));
        // A real point between two grid samples can return slightly closer
        // than the sampled infimum past si suggests; widening the window by
        // one grid step keeps ri a true lower bound for the return distance
        // of everything farther than si.  Levels below the grid step cannot
        // be bounded this way, so the ladder stops there.
        double ri = std::min(Q(std::max(0.0, si - h)), si);
        if (si <= h || ri <= 0.0) break;
        // Once the sampled geometry stops resolving strictly smaller escape
        // radii, deeper levels carry no information; stop so the level arrays
        // match the radial map anchors one-to-one.
        if (!sched.r.empty() && ri >= sched.r.back() - 1e-12) break;
        sched.s.push_back(si);
        sched.r.push_back(ri);
    }
    return sched;
}

LocalHomeo build_T2(const AlphaSchedule& sched) {
    if (sched.flat || sched.r.empty()) return LocalHomeo::identity();
    const std::size_t K = sched.r.size();
    // Radius anchors rho(r_k) = s_{k-1}, ascending in radius (k descending);
    // ties in r keep the larger target so the map stays monotone.
    std::vector<std::pair<double, double>> anch;
    for (std::size_t k = K; k-- > 0;) {
        double r = sched.r[k], s = sched.s[k];  // r_{k+1} -> s_k
        if (!anch.empty() && r <= anch.back().first + 1e-12) {
            anch.back().second = std::max(anch.back().second, s);
            continue;
        }
        if (!anch.empty() && s <= anch.back().second + 1e-15) continue;
        anch.emplace_back(r, s);
    }
    if (anch.empty()) return LocalHomeo::identity();
    if (anch.back().first >= sched.R2 - 1e-12 || sched.R1 >= sched.R2 - 1e-12)
        throw Error(ErrorCode::DegenerateGeometry, "escape radii collapse");

    const double a = sched.alpha;
    Arc support(a, sched.R2, true);
    std::vector<std::pair<double, double>> kts;
    for (std::size_t i = anch.size(); i-- > 0;)
        kts.emplace_back(wrap(a - anch[i].first), wrap(a - anch[i].second));
    kts.emplace_back(a, a);
    for (std::size_t i = 0; i < anch.size(); ++i)
        kts.emplace_back(wrap(a + anch[i].first), wrap(a + anch[i].second));
    LocalHomeo t2 = LocalHomeo::knots(support, kts);
    return t2;
}

PLMap assemble(const PLMap& f, const PerturbationPlan& plan, double periodicity_tol) {
    PLMap g = f.simplified();
    for (const LocalHomeo& t : plan.steps) {
        if (t.is_identity()) continue;
        g = compose_local(g, t).simplified();
    }
    g.validate();
    if (plan.period > 0 &&
        circle_dist(g.iterate(plan.periodic_point, plan.period), plan.periodic_point) >
            periodicity_tol)
        throw Error(ErrorCode::PeriodicityLost, "declared orbit does not close after assembly");
    return g;
}

}  // namespace erg
