#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "erg/measure_opt.hpp"
#include "erg/perturb.hpp"

namespace erg {

struct LemmaCheck {
    bool pass = true;
    int checked = 0;
    int failed = 0;
};

struct Certificate {
    double epsilon = 0.0;
    double distance = 0.0;  // d(f, f-hat)
    std::vector<double> orbit;
    int period = 0;
    double orbit_average = 0.0;  // under phi0
    UlamBound upper{};           // Ulam LP on f-hat
    UlamBound upper_base{};      // same on f, for context
    double lower_bound_oracle = 0.0;
    double random_tail_best = 0.0;
    double periodic_best = 0.0;
    std::map<std::string, LemmaCheck> lemma_checks;
    bool verdict = false;
    double tol = 0.0;
    std::uint64_t seed = 0;
    std::string case_tag;
    double residual = 0.0;  // Case I: S_{n1} f(x0)
};

struct CertifyOptions {
    int bins = 4096;
    int grid = 16384;
    int p_max = 8;
    std::uint64_t seed = 1;
    double tol = 1e-3;
    double eta = 1e-6;
};

// End-to-end verification record.  Failures are recorded in the certificate,
// never thrown.
Certificate certify(const PLMap& f, const PLMap& fhat, const PerturbationPlan& plan,
                    const Potential& phi0, double eps, const CertifyOptions& opt);

// Certificate as JSON plus orbit and sampled Birkhoff-average trajectories
// as CSV (columns: n, x_n, running average).
void emit_report(const Certificate& c, const PLMap& fhat, const Potential& phi0,
                 const std::string& json_path, const std::string& csv_path);

std::string certificate_to_json(const Certificate& c);
Certificate certificate_from_json(const std::string& text);

}  // namespace erg
