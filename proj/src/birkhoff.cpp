#include "erg/birkhoff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "erg/errors.hpp"

namespace erg {

BirkhoffRecord birkhoff_sum(const PLMap& f, const Potential& phi, double x, int n) {
    BirkhoffRecord r;
    r.start = wrap(x);
    r.steps = n;
    double y = r.start;
    for (int i = 0; i < n; ++i) {
        r.sum += phi(y);
        y = f(y);
    }
    r.average = n > 0 ? r.sum / n : 0.0;
    return r;
}

double grid_sum_bar(const PLMap& f, const Potential& phi, int n, int grid) {
    const double h = 1.0 / static_cast<double>(grid);
    const double s = f.max_abs_slope();
    double spread = 0.0, pw = 1.0;
    for (int i = 0; i < n; ++i) {
        spread += pw;
        pw *= s;
        if (spread > 1e30) break;  // bound is useless past this point anyway
    }
    return phi.lipschitz * h * spread;
}

Bounded max_finite_average(const PLMap& f, const Potential& phi, int m, int grid) {
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid; ++i) {
        double x = static_cast<double>(i) / grid;
        best = std::max(best, birkhoff_sum(f, phi, x, m).sum);
    }
    Bounded b;
    b.value = best / m;
    b.bar = grid_sum_bar(f, phi, m, grid) / m;
    return b;
}

int m_zero(const PLMap& f, const Potential& phi, double a, int grid, int cap) {
    // Precompute M_j + bar_j for j = 1..2*cap-1, then scan windows.
    std::vector<double> upper(static_cast<std::size_t>(2 * cap), 0.0);
    std::vector<double> sums(static_cast<std::size_t>(grid), 0.0);
    std::vector<double> pts(static_cast<std::size_t>(grid));
    for (int i = 0; i < grid; ++i) pts[static_cast<std::size_t>(i)] = static_cast<double>(i) / grid;
    for (int j = 1; j < 2 * cap; ++j) {
        double best = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < grid; ++i) {
            auto k = static_cast<std::size_t>(i);
            sums[k] += phi(pts[k]);
            pts[k] = f(pts[k]);
            best = std::max(best, sums[k]);
        }
        upper[static_cast<std::size_t>(j)] = best / j + grid_sum_bar(f, phi, j, grid) / j;
    }
    for (int m = 1; m <= cap; ++m) {
        bool ok = true;
        for (int j = m; j < 2 * m; ++j)
            if (upper[static_cast<std::size_t>(j)] > a / 2.0) {
                ok = false;
                break;
            }
        if (ok) return m;
    }
    throw Error(ErrorCode::NotFound, "m_zero: no certified window up to the cap");
}

std::optional<ReturnPair> best_return(const PLMap& f, const Potential& phi, const Arc& B,
                                      int horizon, int grid) {
    std::optional<ReturnPair> best;
    for (double y : grid_points_in_arc(B, grid)) {
        double sum = 0.0, z = y;
        for (int n = 1; n <= horizon; ++n) {
            sum += phi(z);
            z = f(z);
            if (!B.contains(z)) continue;
            // Ties prefer smaller n, then smaller y.
            if (!best || sum > best->sum ||
                (sum == best->sum && (n < best->n || (n == best->n && y < best->y))))
                best = ReturnPair{y, n, sum};
        }
    }
    return best;
}

std::optional<ReturnPair> find_nonneg_return(const PLMap& f, const Potential& phi, const Arc& B,
                                             int horizon, int grid, double eta) {
    auto best = best_return(f, phi, B, horizon, grid);
    if (best && best->sum >= -eta) return best;
    return std::nullopt;
}

CbarAnalysis c_bar(const PLMap& f, const Potential& phi, double x0, double eps, int m0, int grid,
                   double eta, double delta_bd) {
    const Arc B(x0, eps, true);
    CbarAnalysis out;
    out.value = -std::numeric_limits<double>::infinity();
    double best_first = -std::numeric_limits<double>::infinity();
    double best_interior = -std::numeric_limits<double>::infinity();
    bool any = false, any_first = false;
    double worst_bar = 0.0;
    for (double y : grid_points_in_arc(B, grid)) {
        double sum = 0.0, z = y;
        bool revisited = false;
        for (int k = 1; k <= m0; ++k) {
            sum += phi(z);
            z = f(z);
            if (!B.contains(z)) continue;
            any = true;
            double avg = sum / k;
            if (avg > out.value) out.value = avg;
            worst_bar = std::max(worst_bar, grid_sum_bar(f, phi, k, grid) / k);
            if (!revisited) {
                if (avg > best_first) {
                    best_first = avg;
                    out.witness = BirkhoffRecord{y, k, sum, avg};
                    out.witness_image = z;
                    any_first = true;
                }
                if (B.boundary_gap(z) > delta_bd && avg > best_interior) {
                    best_interior = avg;
                    out.interior_witness = BirkhoffRecord{y, k, sum, avg};
                    out.interior_image = z;
                }
            }
            revisited = true;  // later k's are no longer first returns
        }
    }
    if (!any || !any_first) throw Error(ErrorCode::EmptyReturnSet, "c_bar: no return pairs found");
    out.bar = worst_bar;
    out.has_interior = best_interior > -std::numeric_limits<double>::infinity() &&
                       best_interior >= out.value - eta;
    return out;
}

ReturnSample first_return(const PLMap& f, const Potential& phi, const std::vector<Arc>& domain,
                          double x, int horizon) {
    auto inside = [&](double z) {
        for (const Arc& a : domain)
            if (a.contains(z)) return true;
        return false;
    };
    ReturnSample s;
    s.x = wrap(x);
    double z = s.x;
    for (int n = 1; n <= horizon; ++n) {
        s.sum += phi(z);
        z = f(z);
        if (inside(z)) {
            s.returns = true;
            s.n = n;
            s.mapped = z;
            s.psi = s.sum / n;
            return s;
        }
    }
    s.returns = false;
    s.n = 0;
    s.sum = 0.0;
    s.psi = 0.0;
    return s;
}

bool ReturnStructure::in_domain(double x) const {
    for (const Arc& a : domain)
        if (a.contains(x)) return true;
    return false;
}

std::size_t ReturnStructure::index_near(double x) const {
    std::size_t best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double d = circle_dist(samples[i].x, x);
        if (d < bd) {
            bd = d;
            best = i;
        }
    }
    return best;
}

ReturnStructure return_structure(const PLMap& f, const Potential& phi,
                                 const std::vector<Arc>& domain, int horizon, int grid) {
    ReturnStructure rs;
    rs.domain = domain;
    rs.horizon = horizon;
    for (const Arc& a : domain)
        for (double x : grid_points_in_arc(a, grid))
            rs.samples.push_back(first_return(f, phi, domain, x, horizon));
    return rs;
}

}  // namespace erg
