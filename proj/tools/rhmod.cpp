// Command-line front end: solve | evolve | verify | sample, driven by a JSON
// config file. Exit codes: 0 success, 1 verification failure, 2 config
// error, 3 non-convergence, 4 mid-sweep degeneracy.

#include <atomic>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rhmod/verify.hpp"

using namespace rhmod;
using nlohmann::json;

namespace {

int g_log_level = 1;   // 0 quiet, 1 info, 2 debug

void log_info(const std::string& m) {
    if (g_log_level >= 1) std::cerr << "[rhmod] " << m << "\n";
}

void write_text(const std::string& path, const std::string& body) {
    if (path.empty()) {
        std::cout << body;
        return;
    }
    std::ofstream out(path);
    if (!out) throw DomainError("cannot open output file: " + path);
    out << body;
}

std::string out_path(const RunConfig& cfg, const std::string& override_path) {
    return override_path.empty() ? cfg.output.path : override_path;
}

json contours_json(const ContourSystem& cs) {
    auto poly = [](const Path& p) {
        json pts = json::array();
        pts.push_back({p.segs.front().point(0.0).real(), p.segs.front().point(0.0).imag()});
        for (const auto& s : p.segs) {
            int n = s.kind == Segment::Kind::Arc ? 24 : 1;
            for (int k = 1; k <= n; ++k) {
                cplx z = s.point(static_cast<double>(k) / n);
                pts.push_back({z.real(), z.imag()});
            }
        }
        return pts;
    };
    json j;
    for (const auto& group : {std::pair{"main_arcs", &cs.main_arcs}, {"comp_arcs", &cs.comp_arcs}}) {
        json arr = json::array();
        for (const auto& chain : *group.second) {
            json pieces = json::array();
            for (const auto& p : chain.pieces) pieces.push_back(poly(p));
            arr.push_back(pieces);
        }
        j[group.first] = arr;
    }
    auto loops = [&](const std::vector<Chain>& chains) {
        json arr = json::array();
        for (const auto& ch : chains) {
            json paths = json::array();
            for (const auto& p : ch.paths) paths.push_back(poly(p));
            arr.push_back(paths);
        }
        return arr;
    };
    j["loops_m"] = loops(cs.loops_m);
    j["loops_c"] = loops(cs.loops_c);
    j["loop_all"] = poly(cs.loop_all);
    return j;
}

std::string g_contours_path;

int cmd_solve(const RunConfig& cfg, const std::string& out_override) {
    NewtonReport rep = newton_solve(make_branchpoints(cfg), make_scattering(cfg), cfg.x, cfg.t,
                                    make_newton_options(cfg));
    json out = newton_report_json(rep, cfg);
    if (rep.converged) {
        RHPSolution sol = solve_constants(rep.final_alphas, make_scattering(cfg), cfg.x, cfg.t,
                                          make_rhp_options(cfg));
        JumpReport jr = jump_check(sol, 3);
        out["diagnostics"] = {{"jump_max_violation", jr.max_violation},
                              {"moment_cond", sol.moment_cond},
                              {"max_im_constant", sol.max_im_constant}};
        out["W"] = json::array();
        for (cplx w : sol.W) out["W"].push_back({w.real(), w.imag()});
        out["Omega"] = json::array();
        for (cplx o : sol.Omega) out["Omega"].push_back({o.real(), o.imag()});
        if (!g_contours_path.empty())
            write_text(g_contours_path, contours_json(*sol.cs).dump(2) + "\n");
    }
    write_text(out_path(cfg, out_override), out.dump(2) + "\n");
    log_info(rep.converged
                 ? "solve converged in " + std::to_string(rep.iterations) + " iterations"
                 : "solve did not converge: " + rep.stop_reason);
    return rep.converged ? 0 : 3;
}

int cmd_evolve(const RunConfig& cfg, const std::string& out_override) {
    if (!cfg.sweep) throw DomainError("evolve requires a sweep block in the config");
    EvolveOptions opts;
    opts.newton = make_newton_options(cfg);
    Trajectory traj = evolve(make_branchpoints(cfg), make_scattering(cfg), cfg.x, cfg.t,
                             *cfg.sweep, opts);
    if (cfg.output.format == "csv")
        write_text(out_path(cfg, out_override), trajectory_csv(traj));
    else
        write_text(out_path(cfg, out_override), trajectory_json(traj, cfg).dump(2) + "\n");
    log_info("evolve: " + std::to_string(traj.points.size()) + " states" +
             (traj.truncated ? " (truncated: " + traj.stop_reason + ")" : ""));
    return traj.truncated ? 4 : 0;
}

int cmd_verify(const RunConfig& cfg, const std::string& out_override, int jobs) {
    VerifyReport rep = run_verification(cfg, jobs);
    write_text(out_path(cfg, out_override), verify_report_json(rep, cfg).dump(2) + "\n");
    for (const auto& c : rep.checks)
        log_info(c.name + ": " + (c.skipped ? "skipped (" + c.detail + ")"
                                            : (c.passed ? "pass" : "FAIL")));
    return rep.all_passed ? 0 : 1;
}

int cmd_sample(const RunConfig& cfg, const std::string& out_override, int jobs) {
    if (!cfg.grid) throw DomainError("sample requires a sample_grid block in the config");
    ScatteringData sd = make_scattering(cfg);
    RHPSolution sol = solve_constants(make_branchpoints(cfg), sd, cfg.x, cfg.t,
                                      make_rhp_options(cfg));
    const GridSpec& g = *cfg.grid;
    const int total = g.re_n * g.im_n;
    std::vector<std::string> rows(total);

    auto fill_row = [&](int idx) {
        int iy = idx / g.re_n, ix = idx % g.re_n;
        double re = g.re_n == 1 ? g.re_min
                                : g.re_min + (g.re_max - g.re_min) * ix / double(g.re_n - 1);
        double im = g.im_n == 1 ? g.im_min
                                : g.im_min + (g.im_max - g.im_min) * iy / double(g.im_n - 1);
        cplx z(re, im);
        std::string row = fmt17(re) + "," + fmt17(im);
        bool usable = true;
        double clearance = 1e-6 * (1.0 + sol.bps.scale());
        if (sol.cs->loop_all.distance(z) < clearance) usable = false;
        for (const auto& ch : sol.cs->loops_m)
            for (const auto& p : ch.paths) usable = usable && p.distance(z) >= clearance;
        for (const auto& ch : sol.cs->loops_c)
            for (const auto& p : ch.paths) usable = usable && p.distance(z) >= clearance;
        for (const auto& group : {sol.cs->main_arcs, sol.cs->comp_arcs})
            for (const auto& a : group)
                for (const auto& p : a.pieces) usable = usable && p.distance(z) >= clearance;
        if (usable && sd.distance_to_singularities(z) < clearance) usable = false;
        if (!usable) {
            rows[idx] = row + ",,,,,,,skipped\n";
            return;
        }
        try {
            LocationFlags fl = sol.cs->point_location(z);
            cplx gv = eval_g(sol, z, fl);
            cplx hv = eval_h(sol, z, fl);
            cplx Kv = eval_K(sol, z);
            std::string flags = fl.inside_all ? "A" : "O";
            for (std::size_t i = 0; i < fl.inside_m.size(); ++i)
                if (fl.inside_m[i]) flags += "m" + std::to_string(i + 1);
            for (std::size_t i = 0; i < fl.inside_c.size(); ++i)
                if (fl.inside_c[i]) flags += (fl.comp_side[i] > 0 ? "cL" : "cR") + std::to_string(i + 1);
            rows[idx] = row + "," + fmt17(gv.real()) + "," + fmt17(gv.imag()) + "," +
                        fmt17(hv.real()) + "," + fmt17(hv.imag()) + "," + fmt17(Kv.real()) + "," +
                        fmt17(Kv.imag()) + "," + flags + "\n";
        } catch (const std::exception&) {
            rows[idx] = row + ",,,,,,,skipped\n";
        }
    };

    if (jobs <= 1) {
        for (int i = 0; i < total; ++i) fill_row(i);
    } else {
        std::atomic<int> next{0};
        auto worker = [&]() {
            for (;;) {
                int i = next.fetch_add(1);
                if (i >= total) return;
                fill_row(i);
            }
        };
        std::vector<std::thread> pool;
        for (int w = 0; w < jobs; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::string body = "re_z,im_z,re_g,im_g,re_h,im_h,re_K,im_K,location\n";
    for (const auto& r : rows) body += r;
    write_text(out_path(cfg, out_override), body);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"g-function / determinant engine for hyperelliptic modulation systems"};
    app.require_subcommand(1);

    std::string config_path, out_override, log_level = "info";
    int jobs = 1;
    app.add_option("--log-level", log_level, "quiet|info|debug");

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file")->required();
        sub->add_option("--out", out_override, "output path (overrides config output.path)");
        sub->add_option("--jobs", jobs, "worker threads for independent tasks");
        sub->add_option("--emit-contours", g_contours_path,
                        "also write the arc/loop polylines as JSON (solve only)");
    };
    CLI::App* solve = app.add_subcommand("solve", "solve the modulation system at one (x,t)");
    CLI::App* evolve_cmd = app.add_subcommand("evolve", "sweep the branchpoints along x or t");
    CLI::App* verify = app.add_subcommand("verify", "run the self-consistency battery");
    CLI::App* sample = app.add_subcommand("sample", "tabulate g, h, K on a z-grid");
    for (CLI::App* sub : {solve, evolve_cmd, verify, sample}) add_common(sub);

    CLI11_PARSE(app, argc, argv);
    g_log_level = log_level == "quiet" ? 0 : log_level == "debug" ? 2 : 1;

    RunConfig cfg;
    try {
        cfg = load_config_file(config_path);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (solve->parsed()) return cmd_solve(cfg, out_override);
        if (evolve_cmd->parsed()) return cmd_evolve(cfg, out_override);
        if (verify->parsed()) return cmd_verify(cfg, out_override, jobs);
        if (sample->parsed()) return cmd_sample(cfg, out_override, jobs);
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
