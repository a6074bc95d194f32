#include "erg/io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "erg/errors.hpp"

namespace erg {

namespace {

using nlohmann::json;

json arc_to_json(const Arc& a) {
    return json{{"center", a.center}, {"radius", a.radius}, {"closed", a.closed}};
}

Arc arc_from_json(const json& j) {
    return Arc(j.at("center").get<double>(), j.at("radius").get<double>(),
               j.at("closed").get<bool>());
}

json plmap_to_obj(const PLMap& f) {
    return json{{"breakpoints", f.breakpoints}, {"liftValues", f.lift_values},
                {"degree", f.degree}};
}

PLMap plmap_from_obj(const json& j) {
    PLMap f;
    f.breakpoints = j.at("breakpoints").get<std::vector<double>>();
    f.lift_values = j.at("liftValues").get<std::vector<double>>();
    f.degree = j.at("degree").get<int>();
    f.validate();
    return f;
}

json homeo_to_obj(const LocalHomeo& t) {
    return json{{"support", arc_to_json(t.support)}, {"map", plmap_to_obj(t.map)}};
}

LocalHomeo homeo_from_obj(const json& j) {
    LocalHomeo t;
    t.support = arc_from_json(j.at("support"));
    t.map = plmap_from_obj(j.at("map"));
    return t;
}

json record_to_obj(const BirkhoffRecord& r) {
    return json{{"start", r.start}, {"steps", r.steps}, {"sum", r.sum}, {"average", r.average}};
}

BirkhoffRecord record_from_obj(const json& j) {
    BirkhoffRecord r;
    r.start = j.at("start").get<double>();
    r.steps = j.at("steps").get<int>();
    r.sum = j.at("sum").get<double>();
    r.average = j.at("average").get<double>();
    return r;
}

}  // namespace

std::string plmap_to_json(const PLMap& f) { return plmap_to_obj(f).dump(2) + "\n"; }

PLMap plmap_from_json(const std::string& text) { return plmap_from_obj(json::parse(text)); }

std::string potential_to_json(const Potential& p) {
    return json{{"samples", p.samples}, {"lipschitz", p.lipschitz}}.dump(2) + "\n";
}

Potential potential_from_json(const std::string& text) {
    json j = json::parse(text);
    Potential p;
    p.samples = j.at("samples").get<std::vector<double>>();
    p.lipschitz = j.at("lipschitz").get<double>();
    p.validate();
    return p;
}

std::string sampled_map_to_json(const SampledMap& m) {
    return json{{"samples", m.lift_samples}, {"degree", m.degree}, {"lipschitz", m.lipschitz}}
               .dump(2) +
           "\n";
}

SampledMap sampled_map_from_json(const std::string& text) {
    json j = json::parse(text);
    SampledMap m;
    m.lift_samples = j.at("samples").get<std::vector<double>>();
    m.degree = j.at("degree").get<int>();
    m.lipschitz = j.at("lipschitz").get<double>();
    return m;
}

std::string plan_to_json(const PerturbationPlan& plan) {
    json j;
    j["caseTag"] = case_tag_name(plan.tag);
    json steps = json::array();
    for (const LocalHomeo& t : plan.steps) steps.push_back(homeo_to_obj(t));
    j["steps"] = steps;
    j["periodicPoint"] = plan.periodic_point;
    j["period"] = plan.period;
    json supports = json::array();
    for (const Arc& a : plan.supports) supports.push_back(arc_to_json(a));
    j["supports"] = supports;
    j["beta"] = plan.beta;
    const CaseReport& r = plan.report;
    j["report"] = json{{"x", r.x},       {"eps", r.eps},
                       {"eta", r.eta},   {"x0", r.x0},
                       {"n0", r.n0},     {"n1", r.n1},
                       {"residual", r.residual}, {"a0", r.a0},
                       {"m0", r.m0},     {"cbar", r.cbar},
                       {"cbarBar", r.cbar_bar},
                       {"witness", record_to_obj(r.witness)},
                       {"witnessImage", r.witness_image}};
    if (plan.schedule) {
        const AlphaSchedule& s = *plan.schedule;
        j["schedule"] = json{{"alpha", s.alpha},     {"nQ", s.n_q},
                             {"R1", s.R1},           {"R2", s.R2},
                             {"s", s.s},             {"r", s.r},
                             {"pR1", s.P_R1},        {"flat", s.flat},
                             {"zMax", s.z_max},      {"psiAlpha", s.psi_alpha},
                             {"psiQ", s.psi_q},      {"psiZMax", s.psi_zmax}};
    }
    if (plan.geometry) {
        const CaseIIbGeometry& g = *plan.geometry;
        j["geometry"] = json{{"q", g.q},
                             {"q0", g.q0},
                             {"nQ", g.n_q},
                             {"E", arc_to_json(g.E)},
                             {"delta", g.delta},
                             {"I", arc_to_json(g.I_arc)},
                             {"W0", arc_to_json(g.W0)},
                             {"WAlpha", arc_to_json(g.W_alpha)},
                             {"tubeRadius", g.tube_radius},
                             {"VL", arc_to_json(g.V_L)},
                             {"horizon", g.horizon}};
    }
    return j.dump(2) + "\n";
}

PerturbationPlan plan_from_json(const std::string& text) {
    json j = json::parse(text);
    PerturbationPlan plan;
    plan.tag = case_tag_from_name(j.at("caseTag").get<std::string>());
    for (const json& t : j.at("steps")) plan.steps.push_back(homeo_from_obj(t));
    plan.periodic_point = j.at("periodicPoint").get<double>();
    plan.period = j.at("period").get<int>();
    for (const json& a : j.at("supports")) plan.supports.push_back(arc_from_json(a));
    plan.beta = j.at("beta").get<double>();
    const json& r = j.at("report");
    plan.report.tag = plan.tag;
    plan.report.x = r.at("x").get<double>();
    plan.report.eps = r.at("eps").get<double>();
    plan.report.eta = r.at("eta").get<double>();
    plan.report.x0 = r.at("x0").get<double>();
    plan.report.n0 = r.at("n0").get<int>();
    plan.report.n1 = r.at("n1").get<int>();
    plan.report.residual = r.at("residual").get<double>();
    plan.report.a0 = r.at("a0").get<double>();
    plan.report.m0 = r.at("m0").get<int>();
    plan.report.cbar = r.at("cbar").get<double>();
    plan.report.cbar_bar = r.at("cbarBar").get<double>();
    plan.report.witness = record_from_obj(r.at("witness"));
    plan.report.witness_image = r.at("witnessImage").get<double>();
    if (j.contains("schedule")) {
        AlphaSchedule s;
        const json& js = j.at("schedule");
        s.alpha = js.at("alpha").get<double>();
        s.n_q = js.at("nQ").get<int>();
        s.R1 = js.at("R1").get<double>();
        s.R2 = js.at("R2").get<double>();
        s.s = js.at("s").get<std::vector<double>>();
        s.r = js.at("r").get<std::vector<double>>();
        s.P_R1 = js.at("pR1").get<double>();
        s.flat = js.at("flat").get<bool>();
        s.z_max = js.at("zMax").get<double>();
        s.psi_alpha = js.at("psiAlpha").get<double>();
        s.psi_q = js.at("psiQ").get<double>();
        s.psi_zmax = js.at("psiZMax").get<double>();
        plan.schedule = s;
    }
    if (j.contains("geometry")) {
        CaseIIbGeometry g;
        const json& jg = j.at("geometry");
        g.q = jg.at("q").get<double>();
        g.q0 = jg.at("q0").get<double>();
        g.n_q = jg.at("nQ").get<int>();
        g.E = arc_from_json(jg.at("E"));
        g.delta = jg.at("delta").get<double>();
        g.I_arc = arc_from_json(jg.at("I"));
        g.W0 = arc_from_json(jg.at("W0"));
        g.W_alpha = arc_from_json(jg.at("WAlpha"));
        g.tube_radius = jg.at("tubeRadius").get<double>();
        g.V_L = arc_from_json(jg.at("VL"));
        g.horizon = jg.at("horizon").get<int>();
        plan.geometry = g;
    }
    return plan;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IOError, "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IOError, "cannot write " + path);
    out << content;
}

}  // namespace erg
