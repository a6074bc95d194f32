#include "erg/measure_opt.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <set>

#include "erg/errors.hpp"

namespace erg {

UlamModel build_ulam(const PLMap& f, const Potential& phi, int bins) {
    UlamModel m;
    m.bins = bins;
    m.transition.resize(static_cast<std::size_t>(bins));
    m.bin_potential.resize(static_cast<std::size_t>(bins));
    const double h = 1.0 / static_cast<double>(bins);
    const int n = bins;

    std::vector<double> mass(static_cast<std::size_t>(n), 0.0);
    std::vector<char> touched(static_cast<std::size_t>(n), 0);
    std::vector<int> touched_list;

    for (int i = 0; i < n; ++i) {
        double a = static_cast<double>(i) * h, b = static_cast<double>(i + 1) * h;
        m.bin_potential[static_cast<std::size_t>(i)] =
            phi.max_over(Arc::from_endpoints(a, b == 1.0 ? 1.0 - 1e-15 : b));
        touched_list.clear();

        auto touch = [&](int j, double frac) {
            auto k = static_cast<std::size_t>(j);
            if (!touched[k]) {
                touched[k] = 1;
                touched_list.push_back(j);
            }
            mass[k] += frac;
        };

        // Split the bin at the breakpoints of f, then push each affine
        // segment's image interval onto the bins it crosses.
        std::vector<double> cuts{a, b};
        for (double t : f.breakpoints)
            if (t > a + 1e-15 && t < b - 1e-15) cuts.push_back(t);
        std::sort(cuts.begin(), cuts.end());
        for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
            double x0 = cuts[c], x1 = cuts[c + 1];
            double v0 = f.lift(x0), v1 = f.lift(x1);
            double lo = std::min(v0, v1), hi = std::max(v0, v1);
            double slope = (v1 - v0) / (x1 - x0);
            long jlo = static_cast<long>(std::floor(lo / h - 1e-9));
            long jhi = static_cast<long>(std::floor(hi / h + 1e-9));
            for (long jj = jlo; jj <= jhi; ++jj) {
                int j = static_cast<int>(((jj % n) + n) % n);
                double wlo = static_cast<double>(jj) * h, whi = wlo + h;
                double ov = std::min(hi, whi) - std::max(lo, wlo);
                if (ov < -1e-12) continue;
                double frac = slope == 0.0 ? (ov >= 0.0 ? (x1 - x0) : 0.0)
                                           : std::max(ov, 0.0) / std::fabs(slope);
                touch(j, frac);
            }
        }
        auto& row = m.transition[static_cast<std::size_t>(i)];
        std::sort(touched_list.begin(), touched_list.end());
        for (int j : touched_list) {
            auto k = static_cast<std::size_t>(j);
            row.emplace_back(j, mass[k] / h);
            mass[k] = 0.0;
            touched[k] = 0;
        }
    }
    return m;
}

UlamBound ulam_upper_bound(const UlamModel& model) {
    // The invariance LP over edge flows (x_e >= 0, balanced at every bin,
    // total mass 1, objective sum of source-bin potentials) attains its
    // optimum on a single cycle; solve it as a maximum mean cycle problem
    // with Karp's dynamic program.
    const int n = model.bins;
    const double NEG = -std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> d(static_cast<std::size_t>(n + 1),
                                       std::vector<double>(static_cast<std::size_t>(n), NEG));
    std::vector<std::vector<int>> pred(static_cast<std::size_t>(n + 1),
                                       std::vector<int>(static_cast<std::size_t>(n), -1));
    for (int v = 0; v < n; ++v) d[0][static_cast<std::size_t>(v)] = 0.0;
    for (int k = 0; k < n; ++k) {
        auto& cur = d[static_cast<std::size_t>(k)];
        auto& nxt = d[static_cast<std::size_t>(k + 1)];
        auto& pn = pred[static_cast<std::size_t>(k + 1)];
        for (int u = 0; u < n; ++u) {
            double du = cur[static_cast<std::size_t>(u)];
            if (du == NEG) continue;
            double cand = du + model.bin_potential[static_cast<std::size_t>(u)];
            for (auto& [v, frac] : model.transition[static_cast<std::size_t>(u)]) {
                (void)frac;
                auto vi = static_cast<std::size_t>(v);
                if (cand > nxt[vi]) {
                    nxt[vi] = cand;
                    pn[vi] = u;
                }
            }
        }
    }
    double mu = NEG;
    int vstar = -1;
    for (int v = 0; v < n; ++v) {
        auto vi = static_cast<std::size_t>(v);
        if (d[static_cast<std::size_t>(n)][vi] == NEG) continue;
        double worst = std::numeric_limits<double>::infinity();
        for (int k = 0; k < n; ++k) {
            if (d[static_cast<std::size_t>(k)][vi] == NEG) continue;
            worst = std::min(worst, (d[static_cast<std::size_t>(n)][vi] -
                                     d[static_cast<std::size_t>(k)][vi]) /
                                        static_cast<double>(n - k));
        }
        if (worst > mu) {
            mu = worst;
            vstar = v;
        }
    }
    if (vstar < 0) throw Error(ErrorCode::LPInfeasible, "ulam_upper_bound: no cycle in the graph");

    // Walk the critical path back from vstar; every node repeat closes a
    // cycle on the path, and some cycle on it attains the optimum mean.
    std::vector<int> path(static_cast<std::size_t>(n + 1));
    int v = vstar;
    for (int k = n; k >= 0; --k) {
        path[static_cast<std::size_t>(k)] = v;
        if (k > 0) v = pred[static_cast<std::size_t>(k)][static_cast<std::size_t>(v)];
    }
    UlamBound out;
    out.value = mu;
    double best_cycle = NEG;
    std::vector<int> last_seen(static_cast<std::size_t>(n), -1);
    for (int k = 0; k <= n; ++k) {
        int node = path[static_cast<std::size_t>(k)];
        int prev = last_seen[static_cast<std::size_t>(node)];
        if (prev >= 0) {
            double s = 0.0;
            for (int j = prev; j < k; ++j)
                s += model.bin_potential[static_cast<std::size_t>(path[static_cast<std::size_t>(j)])];
            double mean = s / (k - prev);
            if (mean > best_cycle) {
                best_cycle = mean;
                out.cycle.assign(path.begin() + prev, path.begin() + k);
            }
        }
        last_seen[static_cast<std::size_t>(node)] = k;
    }
    if (best_cycle > out.value) out.value = best_cycle;
    // value uses per-bin maxima, so it is already an upper bound; the caller
    // sets bar to the Lipschitz drop of phi across one bin, quantifying the
    // over-estimate: the true optimum lies in [value - bar, value].
    out.bar = 0.0;
    return out;
}

UlamBound ulam_upper_bound(const PLMap& f, const Potential& phi, int bins) {
    UlamModel model = build_ulam(f, phi, bins);
    UlamBound b = ulam_upper_bound(model);
    b.bar = phi.lipschitz / static_cast<double>(bins);
    return b;
}

void dump_ulam_csv(const UlamModel& model, const UlamBound& bound, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IOError, "dump_ulam_csv: cannot open " + path);
    std::set<int> on_cycle(bound.cycle.begin(), bound.cycle.end());
    out << "from,to,fraction,from_potential,from_on_cycle\n";
    for (int i = 0; i < model.bins; ++i)
        for (auto& [j, frac] : model.transition[static_cast<std::size_t>(i)])
            out << i << ',' << j << ',' << frac << ','
                << model.bin_potential[static_cast<std::size_t>(i)] << ','
                << (on_cycle.count(i) ? 1 : 0) << '\n';
}

namespace {

long long orbit_key(const std::vector<double>& pts) {
    double mn = *std::min_element(pts.begin(), pts.end());
    return static_cast<long long>(std::llround(mn * 1e9));
}

}  // namespace

std::vector<Orbit> periodic_orbits(const PLMap& f, int p_max, std::size_t piece_cap) {
    std::vector<Orbit> orbits;
    std::set<std::pair<int, long long>> seen;
    PLMap fp = f.simplified();
    for (int p = 1; p <= p_max; ++p) {
        if (p > 1) {
            fp = compose(fp, f).simplified();
            if (fp.pieces() > piece_cap)
                throw Error(ErrorCode::BranchExplosion,
                            "periodic_orbits: composed map exceeds the piece cap");
        }
        std::vector<double> fixed;
        for (std::size_t i = 0; i < fp.pieces(); ++i) {
            double t0 = fp.breakpoints[i], t1 = fp.breakpoints[i + 1];
            double v0 = fp.lift_values[i], v1 = fp.lift_values[i + 1];
            double g0 = v0 - t0, g1 = v1 - t1;  // lift(x) - x, affine on the piece
            if (std::fabs(g1 - g0) < 1e-12) {
                if (std::fabs(g0 - std::round(g0)) < 1e-9) {
                    fixed.push_back(t0);
                    fixed.push_back(t1);
                }
                continue;
            }
            double lo = std::min(g0, g1), hi = std::max(g0, g1);
            long m0 = static_cast<long>(std::ceil(lo - 1e-12));
            long m1 = static_cast<long>(std::floor(hi + 1e-12));
            for (long m = m0; m <= m1; ++m) {
                double x = t0 + (static_cast<double>(m) - g0) * (t1 - t0) / (g1 - g0);
                if (x >= t0 - 1e-12 && x <= t1 + 1e-12) fixed.push_back(std::clamp(x, t0, t1));
            }
        }
        for (double x : fixed) {
            double xx = wrap(x);
            // Minimal period: smallest divisor of p that already closes.
            int minimal = p;
            for (int dperiod = 1; dperiod < p; ++dperiod) {
                if (p % dperiod != 0) continue;
                if (circle_dist(f.iterate(xx, dperiod), xx) < 1e-9) {
                    minimal = dperiod;
                    break;
                }
            }
            if (minimal != p) continue;  // found when p == minimal
            Orbit o;
            o.period = p;
            double z = xx;
            for (int j = 0; j < p; ++j) {
                o.points.push_back(z);
                z = f(z);
            }
            std::rotate(o.points.begin(),
                        std::min_element(o.points.begin(), o.points.end()), o.points.end());
            auto key = std::make_pair(p, orbit_key(o.points));
            if (seen.insert(key).second) orbits.push_back(std::move(o));
        }
    }
    return orbits;
}

LowerBound best_periodic_average(const PLMap& f, const Potential& phi, int p_max,
                                 std::uint64_t seed, int n_orbits, int orbit_len) {
    LowerBound lb;
    lb.periodic_best = -std::numeric_limits<double>::infinity();

    std::vector<Orbit> orbits;
    for (int p = p_max; p >= 1; --p) {
        try {
            orbits = periodic_orbits(f, p, 20000);
            break;
        } catch (const Error& e) {
            if (e.code != ErrorCode::BranchExplosion) throw;
        }
    }
    for (const Orbit& o : orbits) {
        double s = 0.0;
        for (double x : o.points) s += phi(x);
        double avg = s / o.period;
        if (avg > lb.periodic_best) {
            lb.periodic_best = avg;
            lb.witness = o;
        }
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const int tail = std::min(500, orbit_len);
    lb.random_tail_best = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < n_orbits; ++k) {
        double z = uni(rng);
        double s = 0.0;
        for (int j = 0; j < orbit_len; ++j) {
            if (j >= orbit_len - tail) s += phi(z);
            z = f(z);
        }
        lb.random_tail_best = std::max(lb.random_tail_best, s / tail);
    }
    lb.value = std::max(lb.periodic_best, lb.random_tail_best);
    return lb;
}

Potential normalize(const Potential& phi0, double beta) { return phi0.shifted(-beta); }

}  // namespace erg
