#include "dynbc/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace dynbc {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

void write_text(const fs::path& dir, const std::string& name, const std::string& text) {
    fs::create_directories(dir);
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + (dir / name).string());
}

namespace {

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json grid_json(const HalfSpaceGrid& g) {
    return {{"N", g.dim()},
            {"R_prime", g.lateral_radius()},
            {"L", g.depth()},
            {"n_lateral", g.n_lateral()},
            {"n_depth", g.n_depth()}};
}

std::vector<std::size_t> pick_times(const std::vector<double>& stored, const std::vector<double>& wanted) {
    std::vector<std::size_t> idx;
    if (wanted.empty()) {
        for (std::size_t j = 0; j < stored.size(); ++j) idx.push_back(j);
        return idx;
    }
    for (double t : wanted) {
        if (stored.empty()) break;
        std::size_t best = 0;
        for (std::size_t j = 1; j < stored.size(); ++j)
            if (std::abs(stored[j] - t) < std::abs(stored[best] - t)) best = j;
        if (idx.empty() || idx.back() != best) idx.push_back(best);
    }
    return idx;
}

}  // namespace

std::vector<FieldFile> write_run_fields(const fs::path& dir, const SolverRun& run, const std::vector<std::string>& fields,
                                        const std::vector<double>& times) {
    fs::create_directories(dir);
    std::vector<FieldFile> out;
    for (std::size_t j : pick_times(run.times, times)) {
        for (const std::string& name : fields) {
            char file[64];
            std::snprintf(file, sizeof file, "%s_%04zu.csv", name.c_str(), j);
            std::ofstream os(dir / file, std::ios::binary);
            if (!os) throw std::runtime_error("cannot write " + (dir / file).string());
            if (name == "u")
                write_field_csv(os, run.u[j]);
            else if (name == "v")
                write_field_csv(os, run.v[j]);
            else if (name == "w")
                write_field_csv(os, run.w[j]);
            else if (name == "dxn_v")
                write_field_csv(os, run.dxn_v[j]);
            else if (name == "w_boundary")
                write_field_csv(os, run.w_boundary[j]);
            else
                throw DomainError("unknown field '" + name + "'");
            out.push_back({name, run.times[j], file});
        }
    }
    return out;
}

std::string solve_manifest(const RunConfig& cfg, const HalfSpaceGrid& grid, const std::vector<std::string>& notes,
                           const SolverRun& run, const std::vector<FieldFile>& files) {
    json m;
    m["command"] = "solve";
    m["config"] = json::parse(dump_config(cfg));
    m["grid"] = grid_json(grid);
    m["notes"] = notes;
    m["complete"] = run.complete;
    if (!run.complete) m["failure"] = run.failure;
    json iv = json::array();
    for (std::size_t j = 0; j < run.T_star.size(); ++j)
        iv.push_back({{"start", run.interval_starts[j]},
                      {"T_star", run.T_star[j]},
                      {"iterations", run.iterations[j]},
                      {"residuals", run.residuals[j]}});
    m["intervals"] = std::move(iv);
    json nodes = json::array();
    for (std::size_t j = 0; j < run.times.size(); ++j)
        nodes.push_back({{"t", run.times[j]},
                         {"E_eps_v", num(run.norm_history[j])},
                         {"sup_v", num(sup_norm(run.v[j]))},
                         {"sup_w", num(sup_norm(run.w[j]))},
                         {"sup_u", num(sup_norm(run.u[j]))}});
    m["norms"] = std::move(nodes);
    json fl = json::array();
    for (const FieldFile& f : files) fl.push_back({{"field", f.name}, {"t", f.time}, {"file", f.file}});
    m["fields"] = std::move(fl);
    return m.dump(2) + "\n";
}

std::string command_manifest(const std::string& command, const RunConfig& cfg) {
    json m;
    m["command"] = command;
    m["config"] = json::parse(dump_config(cfg));
    return m.dump(2) + "\n";
}

std::string rates_table(const FunctionalReport& f) {
    std::ostringstream out;
    out.precision(17);
    for (std::size_t i = 0; i < f.points.size(); ++i) {
        const RatePoint& p = f.points[i];
        if (f.point_status[i] == "missing" || !(p.value > 0)) continue;
        out << std::log10(p.eps) << ' ' << std::log10(p.value) << '\n';
    }
    return out.str();
}

void write_rates(const fs::path& dir, const RateReport& report) {
    for (const FunctionalReport& f : report.functionals) write_text(dir, "rates_" + f.name + ".dat", rates_table(f));
}

std::string norm_summary(const SolverRun& run) {
    std::ostringstream out;
    char line[160];
    std::snprintf(line, sizeof line, "%12s %14s %14s %14s %14s\n", "t", "E_eps[v]", "sup|v|", "sup|w|", "sup|u|");
    out << line;
    // about 7 rows: stored times past a doubling of the previous row, from t_end / 128
    double last = run.times.empty() ? 0.0 : run.times.back() / 128;
    for (std::size_t j = 0; j < run.times.size(); ++j) {
        const bool final_row = j + 1 == run.times.size();
        if (!final_row && run.times[j] < 2 * last) continue;
        last = run.times[j];
        std::snprintf(line, sizeof line, "%12.6g %14.6e %14.6e %14.6e %14.6e\n", run.times[j], run.norm_history[j],
                      sup_norm(run.v[j]), sup_norm(run.w[j]), sup_norm(run.u[j]));
        out << line;
    }
    return out.str();
}

std::string oracle_report(const RunConfig& cfg, const HalfSpaceGrid& grid, const FDHistory& fd, const OracleGap& gap,
                          const SolverRun& run) {
    json r;
    r["eps"] = cfg.eps;
    r["grid"] = grid_json(grid);
    r["fd_dt"] = cfg.fd_dt;
    r["diffusion_number"] = fd.diffusion_number;
    r["pollution_radius"] = fd.pollution_radius;
    r["warnings"] = fd.warnings;
    r["K"] = {{"lateral", cfg.K_lateral}, {"depth", cfg.K_depth}};
    r["mild_complete"] = run.complete;
    json pts = json::array();
    for (std::size_t j = 0; j < gap.times.size(); ++j) pts.push_back({{"t", gap.times[j]}, {"gap", gap.gaps[j]}});
    r["gaps"] = std::move(pts);
    r["sup_gap"] = gap.sup_gap;
    return r.dump(2) + "\n";
}

}  // namespace dynbc
