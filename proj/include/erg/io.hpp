#pragma once

#include <string>

#include "erg/perturb.hpp"
#include "erg/plmap.hpp"
#include "erg/potential.hpp"

namespace erg {

// JSON schemas:
//   map:       {"breakpoints": [...], "liftValues": [...], "degree": n}
//   samples:   {"samples": [...], "degree": n, "lipschitz": L}
//   potential: {"samples": [...], "lipschitz": L}

std::string plmap_to_json(const PLMap& f);
PLMap plmap_from_json(const std::string& text);

std::string potential_to_json(const Potential& p);
Potential potential_from_json(const std::string& text);

std::string sampled_map_to_json(const SampledMap& m);
SampledMap sampled_map_from_json(const std::string& text);

std::string plan_to_json(const PerturbationPlan& plan);
PerturbationPlan plan_from_json(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace erg
