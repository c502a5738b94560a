#include "dynbc/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace dynbc {

using json = nlohmann::ordered_json;

const std::vector<std::string>& field_names() {
    static const std::vector<std::string> names{"u", "v", "w", "dxn_v", "w_boundary"};
    return names;
}

namespace {

json to_json(const RunConfig& c) {
    json j;
    j["problem"] = {{"N", c.N},
                    {"phi", c.data.phi},
                    {"phi_b", c.data.phi_b},
                    {"level", c.data.level},
                    {"eps", c.eps},
                    {"eps_values", c.eps_values},
                    {"horizon", c.horizon}};
    j["grid"] = {{"R_prime", c.grid.R_prime},
                 {"L", c.grid.L},
                 {"L_max", c.grid.L_max},
                 {"n_lateral", c.grid.n_lateral},
                 {"n_depth", c.grid.n_depth}};
    j["quadrature"] = {{"tol", c.quad_tol},
                       {"d_nodes", c.solver.d_rule.n_nodes()},
                       {"d_tilde_nodes", c.solver.dt_rule.n_nodes()},
                       {"f2_nodes", c.solver.f2_rule.n_nodes()},
                       {"w_nodes", c.solver.w_rule.n_nodes()},
                       {"mesh_cells", c.solver.mesh_cells},
                       {"geometric_levels", c.solver.geometric_levels}};
    j["solver"] = {{"picard_tol", c.solver.picard_tol},
                   {"max_iterations", c.solver.max_iterations},
                   {"T_min", c.solver.t_min},
                   {"ratio_threshold", c.solver.ratio_threshold}};
    j["sweep"] = {{"functionals", c.functionals}, {"tau1", c.tau1},         {"tau2", c.tau2},
                  {"window_samples", c.window_samples}, {"K_lateral", c.K_lateral}, {"K_depth", c.K_depth},
                  {"L_strip", c.L_strip},         {"t_small", c.t_small}};
    j["suite"] = {{"n_lateral", c.suite.n_lateral}, {"n_depth", c.suite.n_depth},     {"R_prime", c.suite.R_prime},
                  {"L", c.suite.L},                 {"instances", c.suite.instances}, {"slack", c.suite.slack},
                  {"stability", c.suite.stability}};
    j["oracle"] = {{"dt", c.fd_dt}};
    j["outputs"] = {{"directory", c.out_dir}, {"fields", c.fields}, {"times", c.field_times}};
    j["seed"] = c.seed;
    j["threads"] = c.threads;
    return j;
}

RunConfig from_json(const json& j) {
    RunConfig c;
    const json& p = j.at("problem");
    c.N = p.at("N").get<int>();
    c.data.phi = p.at("phi").get<std::string>();
    c.data.phi_b = p.at("phi_b").get<std::string>();
    c.data.level = p.at("level").get<double>();
    c.eps = p.at("eps").get<double>();
    c.eps_values = p.at("eps_values").get<std::vector<double>>();
    c.horizon = p.at("horizon").get<double>();

    const json& g = j.at("grid");
    c.grid.R_prime = g.at("R_prime").get<double>();
    c.grid.L = g.at("L").get<double>();
    c.grid.L_max = g.at("L_max").get<double>();
    c.grid.n_lateral = g.at("n_lateral").get<int>();
    c.grid.n_depth = g.at("n_depth").get<int>();

    const json& q = j.at("quadrature");
    auto rule = [&](const char* key, const TimeQuadRule& def) {
        return TimeQuadRule(q.at(key).get<int>(), def.alpha_start(), def.alpha_end());
    };
    c.quad_tol = q.at("tol").get<double>();
    c.solver.d_rule = rule("d_nodes", c.solver.d_rule);
    c.solver.dt_rule = rule("d_tilde_nodes", c.solver.dt_rule);
    c.solver.f2_rule = rule("f2_nodes", c.solver.f2_rule);
    c.solver.w_rule = rule("w_nodes", c.solver.w_rule);
    c.solver.mesh_cells = q.at("mesh_cells").get<int>();
    c.solver.geometric_levels = q.at("geometric_levels").get<int>();

    const json& s = j.at("solver");
    c.solver.picard_tol = s.at("picard_tol").get<double>();
    c.solver.max_iterations = s.at("max_iterations").get<int>();
    c.solver.t_min = s.at("T_min").get<double>();
    c.solver.ratio_threshold = s.at("ratio_threshold").get<double>();

    const json& w = j.at("sweep");
    c.functionals = w.at("functionals").get<std::vector<std::string>>();
    c.tau1 = w.at("tau1").get<double>();
    c.tau2 = w.at("tau2").get<double>();
    c.window_samples = w.at("window_samples").get<int>();
    c.K_lateral = w.at("K_lateral").get<double>();
    c.K_depth = w.at("K_depth").get<double>();
    c.L_strip = w.at("L_strip").get<double>();
    c.t_small = w.at("t_small").get<double>();

    const json& u = j.at("suite");
    c.suite.n_lateral = u.at("n_lateral").get<int>();
    c.suite.n_depth = u.at("n_depth").get<int>();
    c.suite.R_prime = u.at("R_prime").get<double>();
    c.suite.L = u.at("L").get<double>();
    c.suite.instances = u.at("instances").get<int>();
    c.suite.slack = u.at("slack").get<double>();
    c.suite.stability = u.at("stability").get<double>();

    c.fd_dt = j.at("oracle").at("dt").get<double>();

    const json& o = j.at("outputs");
    c.out_dir = o.at("directory").get<std::string>();
    c.fields = o.at("fields").get<std::vector<std::string>>();
    c.field_times = o.at("times").get<std::vector<double>>();

    c.seed = j.at("seed").get<std::uint64_t>();
    c.threads = j.at("threads").get<int>();
    c.suite.seed = c.seed;
    return c;
}

// Every key of `given` must exist in `defaults` with a compatible type.
void check_shape(const json& given, const json& defaults, const std::string& path) {
    for (auto it = given.begin(); it != given.end(); ++it) {
        const std::string key = path.empty() ? it.key() : path + "." + it.key();
        auto d = defaults.find(it.key());
        if (d == defaults.end()) throw ConfigError("unknown config key '" + key + "'");
        const json& v = it.value();
        bool ok;
        if (d->is_object())
            ok = v.is_object();
        else if (d->is_number_integer())
            ok = v.is_number_integer();
        else if (d->is_number())
            ok = v.is_number();
        else
            ok = v.type() == d->type();
        if (!ok) {
            const std::string want = d->is_number_integer() ? "integer" : d->type_name();
            throw ConfigError("config key '" + key + "' has type " + v.type_name() + ", expected " + want);
        }
        if (d->is_object()) check_shape(v, *d, key);
    }
}

}  // namespace

void RunConfig::validate() const {
    auto fail = [](const std::string& m) { throw ConfigError(m); };
    if (N != 2) fail("problem.N: only N = 2 is implemented");
    const auto& names = data_names();
    if (std::find(names.begin(), names.end(), data.phi) == names.end()) fail("problem.phi: unknown data '" + data.phi + "'");
    if (std::find(names.begin(), names.end(), data.phi_b) == names.end())
        fail("problem.phi_b: unknown data '" + data.phi_b + "'");
    if (!std::isfinite(data.level)) fail("problem.level must be finite");
    if (!(eps > 0 && eps < 1)) fail("problem.eps must lie in (0, 1)");
    if (!(horizon > 0)) fail("problem.horizon must be positive");
    if (grid.n_lateral < 3 || grid.n_lateral % 2 == 0) fail("grid.n_lateral must be odd and at least 3");
    if (grid.n_depth < 4) fail("grid.n_depth must be at least 4");
    if (grid.R_prime < 0 || grid.L < 0 || grid.L_max < 0) fail("grid lengths must be nonnegative");
    if (!(quad_tol > 0)) fail("quadrature.tol must be positive");
    if (solver.mesh_cells < 1 || solver.geometric_levels < 0) fail("quadrature mesh sizes must be positive");
    if (!(solver.picard_tol > 0) || solver.max_iterations < 1 || !(solver.t_min > 0))
        fail("solver settings must be positive");
    if (!(solver.ratio_threshold > 0 && solver.ratio_threshold < 1)) fail("solver.ratio_threshold must lie in (0, 1)");
    if (!(fd_dt > 0)) fail("oracle.dt must be positive");
    for (const auto& f : fields)
        if (std::find(field_names().begin(), field_names().end(), f) == field_names().end())
            fail("outputs.fields: unknown field '" + f + "'");
    for (double t : field_times)
        if (!(t > 0)) fail("outputs.times must be positive");
    if (threads < 1) fail("threads must be at least 1");
    if (suite.n_lateral < 3 || suite.n_depth < 3 || suite.instances < 1) fail("suite grid and instances too small");
}

RunConfig parse_config(const std::string& text) {
    json given;
    try {
        given = json::parse(text, nullptr, true, true);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!given.is_object()) throw ConfigError("config must be a JSON object");
    json doc = to_json(RunConfig{});
    check_shape(given, doc, "");
    doc.merge_patch(given);
    try {
        return from_json(doc);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config value error: ") + e.what());
    } catch (const DomainError& e) {
        throw ConfigError(std::string("config value error: ") + e.what());
    }
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config '" + path + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return parse_config(s.str());
}

std::string dump_config(const RunConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

SweepPlan sweep_plan(const RunConfig& c) {
    SweepPlan p;
    p.data = c.data;
    p.grid = c.grid;
    p.solver = c.solver;
    p.horizon = c.horizon;
    p.eps_values = c.eps_values;
    p.functionals = c.functionals;
    p.tau1 = c.tau1;
    p.tau2 = c.tau2;
    p.window_samples = c.window_samples;
    p.K_lateral = c.K_lateral;
    p.K_depth = c.K_depth;
    p.L_strip = c.L_strip;
    p.t_small = c.t_small;
    p.quad_tol = c.quad_tol;
    return p;
}

SuiteConfig suite_config(const RunConfig& c) {
    SuiteConfig s = c.suite;
    s.seed = c.seed;
    return s;
}

ProblemSpec solve_problem(const RunConfig& c, HalfSpaceGrid* grid_out, std::vector<std::string>* notes) {
    const HalfSpaceGrid g = resolve_grid(c.grid, c.data, c.eps, c.horizon, notes);
    if (grid_out) *grid_out = g;
    return make_problem(c.data, g, c.eps, c.horizon);
}

}  // namespace dynbc
