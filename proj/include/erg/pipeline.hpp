#pragma once

#include <cstdint>
#include <string>

#include "erg/certify.hpp"
#include "erg/measure_opt.hpp"
#include "erg/perturb.hpp"

namespace erg {

struct RunConfig {
    std::string map_path;
    std::string potential_path;
    std::string out_dir = ".";
    double epsilon = 0.1;
    int grid = 16384;
    int bins = 4096;
    int horizon0 = 256;     // initial return-search horizon
    int horizon_factor = 64;  // return-structure horizon = factor * m0
    int m0_cap = 64;
    int p_max = 8;
    double tol = 1e-3;
    double eta = 1e-6;
    std::uint64_t seed = 1;

    void validate() const;  // throws ConfigError
};

struct PipelineResult {
    PLMap f;
    PLMap fhat;
    PerturbationPlan plan;
    double beta = 0.0;
    UlamBound base_bound{};
    Certificate certificate{};
    int attempts = 0;
};

// The whole construction: normalize, pick the support proxy from the optimal
// Ulam cycle, split cases, build the perturbation with the retry ladder
// (epsilon halving and next-proxy fallback), assemble and certify.
// Throws ConstructionFailed when the ladder is exhausted.
PipelineResult run_pipeline(const PLMap& f0, const Potential& phi0, const RunConfig& cfg);

}  // namespace erg
