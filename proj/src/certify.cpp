#include "erg/certify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "json.hpp"

#include "erg/errors.hpp"

namespace erg {

namespace {

void record(LemmaCheck& c, bool ok) {
    ++c.checked;
    if (!ok) {
        ++c.failed;
        c.pass = false;
    }
}

double apply_steps(const std::vector<LocalHomeo>& steps, double y) {
    for (const LocalHomeo& t : steps) y = t(y);
    return y;
}

}  // namespace

Certificate certify(const PLMap& f, const PLMap& fhat, const PerturbationPlan& plan,
                    const Potential& phi0, double eps, const CertifyOptions& opt) {
    Certificate c;
    c.epsilon = eps;
    c.tol = opt.tol;
    c.seed = opt.seed;
    c.case_tag = case_tag_name(plan.tag);
    c.residual = plan.report.residual;
    c.distance = c0_distance(f, fhat);
    c.period = plan.period;

    double z = plan.periodic_point;
    double osum = 0.0;
    for (int j = 0; j < plan.period; ++j) {
        c.orbit.push_back(z);
        osum += phi0(z);
        z = fhat(z);
    }
    c.orbit_average = plan.period > 0 ? osum / plan.period : 0.0;

    c.upper = ulam_upper_bound(fhat, phi0, opt.bins);
    c.upper_base = ulam_upper_bound(f, phi0, opt.bins);
    LowerBound lb = best_periodic_average(fhat, phi0, opt.p_max, opt.seed);
    c.lower_bound_oracle = lb.value;
    c.random_tail_best = lb.random_tail_best;
    c.periodic_best = lb.periodic_best;

    auto& checks = c.lemma_checks;

    record(checks["periodicity"],
           plan.period > 0 &&
               circle_dist(fhat.iterate(plan.periodic_point, plan.period), plan.periodic_point) <=
                   1e-9);

    {
        // f-hat may only differ from f where f lands inside a support arc.
        auto& lc = checks["support_containment"];
        for (int i = 0; i < opt.grid; ++i) {
            double x = static_cast<double>(i) / opt.grid;
            double fx = f(x);
            bool in_supp = false;
            for (const Arc& a : plan.supports)
                if (a.contains(fx)) {
                    in_supp = true;
                    break;
                }
            if (in_supp) continue;
            record(lc, circle_dist(fhat(x), fx) <= 1e-9);
        }
        if (lc.checked == 0) record(lc, true);
    }

    const Potential phi_n = phi0.shifted(-plan.beta);

    if (plan.tag == CaseTag::CaseI) {
        record(checks["case_i_return_bound"], std::fabs(plan.report.residual) <= opt.tol);
        record(checks["orbit_average_consistency"],
               plan.period > 0 &&
                   std::fabs(c.orbit_average - plan.beta -
                             plan.report.residual / plan.period) <= opt.tol);
    } else if (plan.tag == CaseTag::CaseIIa) {
        record(checks["orbit_average_consistency"],
               std::fabs(c.orbit_average - plan.beta - plan.report.cbar) <=
                   plan.report.cbar_bar + opt.tol);
    } else if (plan.schedule && plan.geometry) {
        const AlphaSchedule& sc = *plan.schedule;
        const CaseIIbGeometry& g = *plan.geometry;
        const double h = 1.0 / opt.grid;
        const double alpha = sc.alpha;
        const std::size_t K = sc.r.size();

        record(checks["orbit_average_consistency"],
               std::fabs(c.orbit_average - plan.beta - sc.psi_alpha) <=
                   phi_n.lipschitz * 4.0 * h + opt.tol);

        record(checks["alpha_inequality"],
               sc.psi_alpha >= sc.psi_q - plan.report.eta - opt.tol &&
                   4.0 * plan.report.m0 * (sc.psi_zmax - sc.psi_alpha) <=
                       (sc.psi_alpha - sc.psi_q) + 4.0 * plan.report.m0 * plan.report.eta +
                           opt.tol);

        record(checks["escape_inequality"],
               sc.n_q * (sc.psi_zmax - sc.psi_alpha) - (sc.psi_alpha - sc.psi_q) <=
                   opt.tol + 4.0 * plan.report.m0 * plan.report.eta * sc.n_q);

        const LocalHomeo t2 =
            plan.steps.size() >= 2 ? plan.steps.back() : LocalHomeo::identity();

        ReturnStructure rs =
            return_structure(f, phi_n, {g.I_arc}, g.horizon, opt.grid);

        {
            // T2 moves every point of its ball strictly away from alpha.
            auto& lc = checks["expansion"];
            for (const ReturnSample& s : rs.samples) {
                double d = circle_dist(s.x, alpha);
                if (d > sc.R2) continue;
                record(lc, circle_dist(t2(s.x), alpha) >= d - 1e-9);
            }
            if (lc.checked == 0) record(lc, true);
        }

        {
            // Radius map bracket: distances in [r_{k+1}, r_k] land in [s_k, s_{k-1}].
            auto& lc = checks["bracket"];
            for (const ReturnSample& s : rs.samples) {
                double d = circle_dist(s.x, alpha);
                for (std::size_t k = 1; k < K; ++k) {
                    if (d < sc.r[k] - 1e-12 || d > sc.r[k - 1] + 1e-12) continue;
                    double rho = circle_dist(t2(s.x), alpha);
                    record(lc, rho >= sc.s[k] - 1e-9 && rho <= sc.s[k - 1] + 1e-9);
                }
            }
            if (lc.checked == 0) record(lc, true);
        }

        // f-hat_2 on the grid: straightened-and-pushed first return.
        std::vector<double> fhat2(rs.samples.size(), 0.0);
        for (std::size_t i = 0; i < rs.samples.size(); ++i)
            if (rs.samples[i].returns)
                fhat2[i] = apply_steps(plan.steps, rs.samples[i].mapped);

        {
            // Close return under f-hat_2 pins the point near alpha one level up.
            auto& lc = checks["close_return"];
            for (std::size_t i = 0; i < rs.samples.size(); ++i) {
                const ReturnSample& s = rs.samples[i];
                if (!s.returns) continue;
                double dz = circle_dist(s.x, alpha);
                double dw = circle_dist(fhat2[i], alpha);
                for (std::size_t k = 0; k + 1 <= K && k + 1 < sc.s.size(); ++k)
                    if (dw < sc.s[k]) record(lc, dz <= sc.s[k + 1] + 1e-9);
            }
            if (lc.checked == 0) record(lc, true);
        }

        auto fhat2_point = [&](double x, bool& ok, double& psi_out) {
            ReturnSample s = first_return(f, phi_n, {g.I_arc}, x, g.horizon);
            ok = s.returns;
            psi_out = s.psi;
            return ok ? apply_steps(plan.steps, s.mapped) : x;
        };
        bool okq = false;
        double psi_alpha_now = sc.psi_alpha;
        fhat2_point(alpha, okq, psi_alpha_now);
        if (!okq) psi_alpha_now = sc.psi_alpha;

        {
            // Staying n steps in W_alpha forces distance <= s_n.
            auto& lc = checks["stay_time"];
            // Orbit blocks entirely inside W_alpha obey the averaged bound.
            auto& lba = checks["block_average"];
            for (const ReturnSample& s : rs.samples) {
                if (!s.returns || !g.W_alpha.contains(s.x)) continue;
                double w = s.x;
                double block_sum = 0.0;
                int m = 0;
                for (std::size_t n = 0; n + 1 < sc.s.size() && n < 64; ++n) {
                    bool ok = false;
                    double psi_w = 0.0;
                    double next = fhat2_point(w, ok, psi_w);
                    if (!ok) break;
                    block_sum += psi_w;
                    ++m;
                    // The level-(n+1) distance bound requires n+1 confirmed
                    // stays: the image must still lie inside W_alpha.
                    if (!g.W_alpha.contains(next)) break;
                    record(lc, circle_dist(s.x, alpha) <=
                                   sc.s[std::min(n + 1, sc.s.size() - 1)] + 1e-9);
                    record(lba, block_sum / m <=
                                     psi_alpha_now + 2.0 * sc.P_R1 / m + opt.tol);
                    w = next;
                }
            }
            if (lc.checked == 0) record(lc, true);
            if (lba.checked == 0) record(lba, true);
        }

        {
            // Outside W0 the return average never beats psi(q).
            auto& lc = checks["outside_w0_bound"];
            double slack = plan.report.cbar_bar + phi_n.lipschitz * (g.delta + h) + opt.tol;
            for (const ReturnSample& s : rs.samples) {
                if (!s.returns || g.W0.contains(s.x)) continue;
                record(lc, s.psi <= sc.psi_q + slack);
            }
            if (lc.checked == 0) record(lc, true);
        }
    }

    record(checks["maximality_lower"],
           c.orbit_average >= lb.value - opt.tol &&
               c.orbit_average >= lb.random_tail_best - 1e-6);

    bool all_pass = true;
    for (auto& [name, lc] : checks) {
        (void)name;
        if (!lc.pass) all_pass = false;
    }
    c.verdict = c.distance < eps &&
                c.orbit_average >= c.upper.value - c.upper.bar - opt.tol && all_pass;
    return c;
}

std::string certificate_to_json(const Certificate& c) {
    nlohmann::json j;
    j["epsilon"] = c.epsilon;
    j["distance"] = c.distance;
    j["orbit"] = c.orbit;
    j["period"] = c.period;
    j["orbitAverage"] = c.orbit_average;
    j["upperBound"] = {{"value", c.upper.value}, {"bar", c.upper.bar}};
    j["upperBoundBase"] = {{"value", c.upper_base.value}, {"bar", c.upper_base.bar}};
    j["lowerBoundOracle"] = c.lower_bound_oracle;
    j["randomTailBest"] = c.random_tail_best;
    j["periodicBest"] = c.periodic_best;
    nlohmann::json checks = nlohmann::json::object();
    for (auto& [name, lc] : c.lemma_checks)
        checks[name] = {{"pass", lc.pass}, {"checked", lc.checked}, {"failed", lc.failed}};
    j["lemmaChecks"] = checks;
    j["verdict"] = c.verdict;
    j["tol"] = c.tol;
    j["seed"] = c.seed;
    j["caseTag"] = c.case_tag;
    j["residual"] = c.residual;
    return j.dump(2) + "\n";
}

Certificate certificate_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    Certificate c;
    c.epsilon = j.at("epsilon").get<double>();
    c.distance = j.at("distance").get<double>();
    c.orbit = j.at("orbit").get<std::vector<double>>();
    c.period = j.at("period").get<int>();
    c.orbit_average = j.at("orbitAverage").get<double>();
    c.upper.value = j.at("upperBound").at("value").get<double>();
    c.upper.bar = j.at("upperBound").at("bar").get<double>();
    c.upper_base.value = j.at("upperBoundBase").at("value").get<double>();
    c.upper_base.bar = j.at("upperBoundBase").at("bar").get<double>();
    c.lower_bound_oracle = j.at("lowerBoundOracle").get<double>();
    c.random_tail_best = j.at("randomTailBest").get<double>();
    c.periodic_best = j.at("periodicBest").get<double>();
    for (auto& [name, v] : j.at("lemmaChecks").items()) {
        LemmaCheck lc;
        lc.pass = v.at("pass").get<bool>();
        lc.checked = v.at("checked").get<int>();
        lc.failed = v.at("failed").get<int>();
        c.lemma_checks[name] = lc;
    }
    c.verdict = j.at("verdict").get<bool>();
    c.tol = j.at("tol").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.case_tag = j.at("caseTag").get<std::string>();
    c.residual = j.at("residual").get<double>();
    return c;
}

void emit_report(const Certificate& c, const PLMap& fhat, const Potential& phi0,
                 const std::string& json_path, const std::string& csv_path) {
    {
        std::ofstream out(json_path);
        if (!out) throw Error(ErrorCode::IOError, "emit_report: cannot open " + json_path);
        out << certificate_to_json(c);
    }
    std::ofstream csv(csv_path);
    if (!csv) throw Error(ErrorCode::IOError, "emit_report: cannot open " + csv_path);
    csv << "n,x_n,running_average\n";
    double x = c.orbit.empty() ? 0.0 : c.orbit.front();
    double sum = 0.0;
    const int steps = 2000;
    csv.precision(17);
    for (int n = 0; n < steps; ++n) {
        sum += phi0(x);
        csv << n << ',' << x << ',' << sum / (n + 1) << '\n';
        x = fhat(x);
    }
}

}  // namespace erg
