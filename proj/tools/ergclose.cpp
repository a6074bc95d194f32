// ergclose: periodic-orbit closing for piecewise-linear circle maps.
//
// Subcommands:
//   approximate  sampled lift -> piecewise-linear map with slopes off zero
//   maximize     certified upper bound for the best invariant average
//   perturb      build the closing perturbation (plan + perturbed map)
//   certify      verify a perturbed map against its plan
//   pipeline     perturb + certify + reports
//   sweep        upper bound across bin refinements
//
// Exit codes: 0 success / verdict true, 1 verdict false, 2 bad config,
// 3 construction failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "erg/certify.hpp"
#include "erg/errors.hpp"
#include "erg/io.hpp"
#include "erg/measure_opt.hpp"
#include "erg/pipeline.hpp"

namespace {

using erg::RunConfig;

void load_config(const std::string& path, RunConfig& cfg) {
    nlohmann::json j = nlohmann::json::parse(erg::read_file(path));
    if (j.contains("map")) cfg.map_path = j["map"].get<std::string>();
    if (j.contains("potential")) cfg.potential_path = j["potential"].get<std::string>();
    if (j.contains("out")) cfg.out_dir = j["out"].get<std::string>();
    if (j.contains("epsilon")) cfg.epsilon = j["epsilon"].get<double>();
    if (j.contains("grid")) cfg.grid = j["grid"].get<int>();
    if (j.contains("bins")) cfg.bins = j["bins"].get<int>();
    if (j.contains("horizon0")) cfg.horizon0 = j["horizon0"].get<int>();
    if (j.contains("horizonFactor")) cfg.horizon_factor = j["horizonFactor"].get<int>();
    if (j.contains("m0Cap")) cfg.m0_cap = j["m0Cap"].get<int>();
    if (j.contains("pMax")) cfg.p_max = j["pMax"].get<int>();
    if (j.contains("tol")) cfg.tol = j["tol"].get<double>();
    if (j.contains("eta")) cfg.eta = j["eta"].get<double>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
}

int run(int argc, char** argv) {
    CLI::App app{"periodic-orbit closing for piecewise-linear circle maps"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path, fhat_path, plan_path, samples_path;
    int levels = 4;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file");
        sub->add_option("--map", cfg.map_path, "piecewise-linear map JSON");
        sub->add_option("--potential", cfg.potential_path, "potential JSON");
        sub->add_option("--out", cfg.out_dir, "output directory");
        sub->add_option("--eps", cfg.epsilon, "closeness budget");
        sub->add_option("--grid", cfg.grid, "verification grid (power of two)");
        sub->add_option("--bins", cfg.bins, "Ulam bins (power of two)");
        sub->add_option("--seed", cfg.seed, "random seed for the lower-bound oracle");
        sub->add_option("--tol", cfg.tol, "certification tolerance");
    };

    CLI::App* ap = app.add_subcommand("approximate", "fit a PL map to a sampled lift");
    ap->add_option("--samples", samples_path, "sampled lift JSON")->required();
    add_common(ap);

    CLI::App* mx = app.add_subcommand("maximize", "certified upper bound via the Ulam LP");
    add_common(mx);

    CLI::App* pb = app.add_subcommand("perturb", "build the closing perturbation");
    add_common(pb);

    CLI::App* cf = app.add_subcommand("certify", "verify a perturbed map against its plan");
    cf->add_option("--fhat", fhat_path, "perturbed map JSON")->required();
    cf->add_option("--plan", plan_path, "perturbation plan JSON")->required();
    add_common(cf);

    CLI::App* pl = app.add_subcommand("pipeline", "perturb, certify and write reports");
    add_common(pl);

    CLI::App* sw = app.add_subcommand("sweep", "upper bound across bin refinements");
    sw->add_option("--levels", levels, "number of dyadic refinement levels");
    add_common(sw);

    CLI11_PARSE(app, argc, argv);
    if (!config_path.empty()) {
        RunConfig from_file;
        load_config(config_path, from_file);
        // Command-line values win: take the file value only where the command
        // line left the default.
        RunConfig defaults;
        auto keep = [&](auto& field, auto& file_val, auto& def_val) {
            if (field == def_val) field = file_val;
        };
        keep(cfg.map_path, from_file.map_path, defaults.map_path);
        keep(cfg.potential_path, from_file.potential_path, defaults.potential_path);
        keep(cfg.out_dir, from_file.out_dir, defaults.out_dir);
        keep(cfg.epsilon, from_file.epsilon, defaults.epsilon);
        keep(cfg.grid, from_file.grid, defaults.grid);
        keep(cfg.bins, from_file.bins, defaults.bins);
        keep(cfg.horizon0, from_file.horizon0, defaults.horizon0);
        keep(cfg.horizon_factor, from_file.horizon_factor, defaults.horizon_factor);
        keep(cfg.m0_cap, from_file.m0_cap, defaults.m0_cap);
        keep(cfg.p_max, from_file.p_max, defaults.p_max);
        keep(cfg.tol, from_file.tol, defaults.tol);
        keep(cfg.eta, from_file.eta, defaults.eta);
        keep(cfg.seed, from_file.seed, defaults.seed);
    }

    std::filesystem::create_directories(cfg.out_dir);

    if (*ap) {
        erg::SampledMap samples = erg::sampled_map_from_json(erg::read_file(samples_path));
        erg::PLMap g = erg::pl_approximate(samples, cfg.epsilon);
        std::string out = (std::filesystem::path(cfg.out_dir) / "map.json").string();
        erg::write_file(out, erg::plmap_to_json(g));
        std::cout << "wrote " << out << " (" << g.pieces() << " pieces)\n";
        return 0;
    }

    erg::PLMap f = erg::plmap_from_json(erg::read_file(cfg.map_path));
    erg::Potential phi = erg::potential_from_json(erg::read_file(cfg.potential_path));

    if (*mx) {
        cfg.validate();
        erg::UlamModel model = erg::build_ulam(f, phi, cfg.bins);
        erg::UlamBound b = erg::ulam_upper_bound(model);
        b.bar = phi.lipschitz / cfg.bins;
        erg::dump_ulam_csv(model, b,
                           (std::filesystem::path(cfg.out_dir) / "ulam.csv").string());
        nlohmann::json j{{"value", b.value}, {"bar", b.bar}, {"cycleLength", b.cycle.size()}};
        std::cout << j.dump(2) << '\n';
        return 0;
    }

    if (*sw) {
        cfg.validate();
        std::cout << "bins,value,bar\n";
        std::vector<int> order;
        int b = cfg.bins;
        for (int l = 0; l < levels && b >= 16; ++l, b /= 2) order.push_back(b);
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            erg::UlamBound ub = erg::ulam_upper_bound(f, phi, *it);
            std::printf("%d,%.12g,%.12g\n", *it, ub.value, ub.bar);
        }
        return 0;
    }

    if (*cf) {
        cfg.validate();
        erg::PLMap fhat = erg::plmap_from_json(erg::read_file(fhat_path));
        erg::PerturbationPlan plan = erg::plan_from_json(erg::read_file(plan_path));
        erg::CertifyOptions copt;
        copt.bins = cfg.bins;
        copt.grid = cfg.grid;
        copt.p_max = cfg.p_max;
        copt.seed = cfg.seed;
        copt.tol = cfg.tol;
        copt.eta = cfg.eta;
        erg::Certificate cert = erg::certify(f, fhat, plan, phi, cfg.epsilon, copt);
        erg::emit_report(cert, fhat, phi,
                         (std::filesystem::path(cfg.out_dir) / "certificate.json").string(),
                         (std::filesystem::path(cfg.out_dir) / "trajectory.csv").string());
        std::cout << erg::certificate_to_json(cert);
        return cert.verdict ? 0 : 1;
    }

    // perturb and pipeline both run the construction.
    erg::PipelineResult res = erg::run_pipeline(f, phi, cfg);
    std::filesystem::path out(cfg.out_dir);
    erg::write_file((out / "fhat.json").string(), erg::plmap_to_json(res.fhat));
    erg::write_file((out / "plan.json").string(), erg::plan_to_json(res.plan));
    if (*pb) {
        std::cout << "case " << erg::case_tag_name(res.plan.tag) << ", period "
                  << res.plan.period << ", attempts " << res.attempts << '\n';
        return 0;
    }
    erg::emit_report(res.certificate, res.fhat, phi, (out / "certificate.json").string(),
                     (out / "trajectory.csv").string());
    erg::UlamModel model = erg::build_ulam(res.fhat, phi, cfg.bins);
    erg::dump_ulam_csv(model, res.certificate.upper, (out / "ulam.csv").string());
    std::cout << erg::certificate_to_json(res.certificate);
    return res.certificate.verdict ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const erg::Error& e) {
        std::cerr << "error [" << erg::error_code_name(e.code) << "]: " << e.what() << '\n';
        switch (e.code) {
            case erg::ErrorCode::ConfigError:
            case erg::ErrorCode::IOError:
                return 2;
            default:
                return 3;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
