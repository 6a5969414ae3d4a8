#include "rhmod/verify.hpp"

#include <atomic>
#include <functional>
#include <cmath>
#include <thread>

#include "rhmod/linalg.hpp"

#include <nlohmann/json.hpp>

namespace rhmod {

namespace {

// deterministic probe points in each location class, kept clear of the
// integration contours
struct ClassPoints {
    std::vector<cplx> outside, standard, in_m, in_c;
};

ClassPoints collect_class_points(const ContourSystem& cs, int per_class) {
    ClassPoints out;
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (const auto& s : cs.loop_all.segs)
        for (int k = 0; k <= 16; ++k) {
            cplx p = s.point(k / 16.0);
            x0 = std::min(x0, p.real());
            x1 = std::max(x1, p.real());
            y0 = std::min(y0, p.imag());
            y1 = std::max(y1, p.imag());
        }
    double padx = 0.35 * (x1 - x0), pady = 0.35 * (y1 - y0);
    double clear = 0.25 * cs.margin;

    auto clear_of_paths = [&](cplx z) {
        if (cs.loop_all.distance(z) < clear) return false;
        for (const auto& ch : cs.loops_m)
            for (const auto& p : ch.paths)
                if (p.distance(z) < clear) return false;
        for (const auto& ch : cs.loops_c)
            for (const auto& p : ch.paths)
                if (p.distance(z) < clear) return false;
        for (const auto& arcs : {cs.main_arcs, cs.comp_arcs})
            for (const auto& a : arcs)
                for (const auto& p : a.pieces)
                    if (p.distance(z) < clear) return false;
        return true;
    };

    const int nx = 37, ny = 31;
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            cplx z(x0 - padx + (x1 - x0 + 2 * padx) * (ix + 0.5) / nx,
                   y0 - pady + (y1 - y0 + 2 * pady) * (iy + 0.5) / ny);
            if (!clear_of_paths(z)) continue;
            LocationFlags fl;
            try {
                fl = cs.point_location(z);
            } catch (const std::exception&) {
                continue;
            }
            bool in_m = false, in_c = false;
            for (bool b : fl.inside_m) in_m |= b;
            for (bool b : fl.inside_c) in_c |= b;
            auto push = [&](std::vector<cplx>& v) {
                if (static_cast<int>(v.size()) < per_class) v.push_back(z);
            };
            if (!fl.inside_all) push(out.outside);
            else if (in_m) push(out.in_m);
            else if (in_c) push(out.in_c);
            else push(out.standard);
        }
    }
    return out;
}

} // namespace

VerifyReport run_verification(const RunConfig& cfg, int jobs) {
    VerifyReport rep;
    ScatteringData sd = make_scattering(cfg);
    BranchpointSet guess = make_branchpoints(cfg);
    NewtonOptions nopts = make_newton_options(cfg);

    rep.newton = newton_solve(guess, sd, cfg.x, cfg.t, nopts);
    {
        CheckResult c;
        c.name = "modulation_solve";
        c.value = rep.newton.residual_history.empty() ? 0.0 : rep.newton.residual_history.back();
        c.threshold = nopts.tol;
        c.passed = rep.newton.converged;
        c.detail = rep.newton.stop_reason;
        rep.checks.push_back(c);
    }
    if (!rep.newton.converged) {
        rep.all_passed = false;
        return rep;
    }

    RHPSolution sol = solve_constants(rep.newton.final_alphas, sd, cfg.x, cfg.t, nopts.rhp);
    double cmax = 0;
    for (cplx c : rep.newton.c_values) cmax = std::max(cmax, std::abs(c));
    const bool degenerate = cmax < 1e-12 * (1.0 + std::abs(sol.D));
    ClassPoints pts = collect_class_points(*sol.cs, 8);

    std::vector<std::function<CheckResult()>> tasks;

    tasks.push_back([&]() {
        CheckResult c;
        c.name = "moment_system_residual";
        c.value = sol.linear_residual;
        c.threshold = 1e-9;
        c.passed = c.value < c.threshold;
        return c;
    });

    tasks.push_back([&]() {
        CheckResult c;
        c.name = "constants_real";
        c.threshold = 1e-8;
        if (!sd.schwarz_symmetric()) {
            c.skipped = true;
            c.detail = "f0 not Schwarz-symmetric";
            return c;
        }
        c.value = sol.max_im_constant;
        c.passed = c.value < c.threshold;
        return c;
    });

    tasks.push_back([&]() {
        CheckResult c;
        c.name = "jump_conditions";
        c.threshold = 1e-6;
        JumpReport jr = jump_check(sol, 3);
        c.value = jr.max_violation;
        c.passed = c.value < c.threshold;
        return c;
    });

    tasks.push_back([&]() {
        CheckResult c;
        c.name = "determinant_identity";
        c.threshold = 1e-8;
        double worst = 0;
        auto probe = [&](const std::vector<cplx>& zs) {
            for (cplx z : zs) {
                cplx h = eval_h(sol, z);
                cplx g = eval_g(sol, z);
                cplx ref = 2.0 * g - sol.f(z);
                worst = std::max(worst, std::abs(h - ref) / std::max(1.0, std::abs(ref)));
            }
        };
        probe(pts.outside);
        probe(pts.standard);
        probe(pts.in_m);
        probe(pts.in_c);
        c.value = worst;
        c.passed = worst < c.threshold;
        c.detail = std::to_string(pts.outside.size() + pts.standard.size() + pts.in_m.size() +
                                  pts.in_c.size()) + " points";
        return c;
    });

    tasks.push_back([&]() {
        CheckResult c;
        c.name = "g_analytic_at_infinity";
        c.threshold = 1e-6;
        double worst = 0;
        for (cplx u : {cplx(1, 0.4), cplx(-0.6, 1)}) {
            cplx uu = u / std::abs(u);
            // growth coefficients from the interpolation of g at 1e3..1e5
            linalg::Mat V(3, 3);
            std::vector<cplx> rhs(3);
            for (int i = 0; i < 3; ++i) {
                cplx z = std::pow(10.0, 3 + i) * sol.bps.scale() * uu;
                V(i, 0) = 1.0;
                V(i, 1) = z;
                V(i, 2) = z * z;
                rhs[i] = eval_g(sol, z);
            }
            if (!linalg::solve(V, rhs)) continue;
            worst = std::max({worst, std::abs(rhs[1]), std::abs(rhs[2])});
        }
        c.value = worst;
        c.passed = worst < c.threshold;
        return c;
    });

    tasks.push_back([&]() {
        CheckResult c;
        c.name = "lemma_derKa";
        c.threshold = 1e-5;
        if (pts.standard.empty()) {
            c.skipped = true;
            c.detail = "no standard-region probe point";
            return c;
        }
        cplx z = pts.standard.front();
        double worst = 0;
        bool trivial = true;
        for (int j = 0; j <= 2 * sol.N(); ++j) {
            LemmaReport lr = lemma_derKa_check(sol, j, z);
            if (std::abs(lr.formula) > 1e-12) {
                trivial = false;
                worst = std::max(worst, lr.rel_deviation);
            }
        }
        if (trivial) {
            c.skipped = true;
            c.detail = "derivative identically zero (trivial f)";
            return c;
        }
        c.value = worst;
        c.passed = worst < c.threshold;
        return c;
    });

    tasks.push_back([&]() {
        CheckResult c;
        c.name = "theorem_dhda";
        c.threshold = 1e-5;
        std::vector<cplx> zs = pts.standard;
        if (static_cast<int>(zs.size()) > 5) zs.resize(5);
        if (zs.empty()) {
            c.skipped = true;
            c.detail = "no standard-region probe point";
            return c;
        }
        double worst = 0;
        for (int j = 0; j <= 2 * sol.N(); ++j)
            worst = std::max(worst, theorem_dhda_check(sol, j, zs).max_abs_dh);
        c.value = worst;
        c.passed = worst < c.threshold;
        return c;
    });

    tasks.push_back([&]() {
        CheckResult c;
        c.name = "local_exponent";
        c.threshold = 0.05;
        if (degenerate) {
            c.skipped = true;
            c.detail = "degenerate (all c_j ~ 0)";
            return c;
        }
        double worst = 0;
        for (int j = 0; j <= 2 * sol.N(); ++j)
            worst = std::max(worst, std::abs(local_exponent(sol, j) - 1.5));
        c.value = worst;
        c.passed = worst < c.threshold;
        return c;
    });

    tasks.push_back([&]() {
        CheckResult c;
        c.name = "cj_cross_formula";
        c.threshold = 1e-7;
        if (degenerate) {
            c.skipped = true;
            c.detail = "degenerate (all c_j ~ 0)";
            return c;
        }
        double worst = 0;
        for (int j = 0; j <= 2 * sol.N(); ++j) {
            cplx c2 = eval_cj(sol, j);
            cplx c1 = eval_cj_fprime(sol, j);
            worst = std::max(worst, std::abs(c1 - c2) / std::abs(c2));
        }
        c.value = worst;
        c.passed = worst < c.threshold;
        return c;
    });

    tasks.push_back([&]() {
        CheckResult c;
        c.name = "segment_reduction";
        c.threshold = 1e-8;
        if (sol.N() != 1) {
            c.skipped = true;
            c.detail = "defined for N = 1";
            return c;
        }
        cplx zm = 0.5 * (sol.bps.point(2) + sol.bps.point(4));
        cplx zc = 0.5 * (sol.bps.point(0) + sol.bps.point(2));
        SegmentReductionReport sr = segment_reduction_check(*sol.ws, zm, zc);
        double rel_m = sr.discrepancy_m / std::max(1.0, std::abs(sr.loop_m_value));
        double rel_c = sr.discrepancy_c / std::max(1.0, std::abs(sr.loop_c_value));
        c.value = std::max(rel_m, rel_c);
        c.passed = c.value < c.threshold;
        return c;
    });

    tasks.push_back([&]() {
        CheckResult c;
        c.name = "constants_wronskian";
        c.threshold = 1e-7;
        if (sol.N() != 1) {
            c.skipped = true;
            c.detail = "closed forms stated for N = 1";
            return c;
        }
        ConstantsRates cr = constants_rates(sol);
        cplx lhs = constants_wronskian(cr);
        cplx rhs = -8.0 * PI * PI / sol.D;
        c.value = std::abs(lhs - rhs) / std::abs(rhs);
        c.passed = c.value < c.threshold;
        return c;
    });

    tasks.push_back([&]() {
        CheckResult c;
        c.name = "velocity_identity";
        c.threshold = 1e-9;
        if (degenerate) {
            c.skipped = true;
            c.detail = "degenerate (all c_j ~ 0)";
            return c;
        }
        AlphaRates ar = alpha_rates(sol);
        c.value = ar.velocity_identity;
        c.passed = c.value < c.threshold;
        return c;
    });

    tasks.push_back([&]() {
        CheckResult c;
        c.name = "velocity_f_independence";
        c.threshold = 1e-10;
        ScatteringData zero = ScatteringData::parse_f0("0");
        RHPSolution alt = solve_constants(sol.cs, zero, cfg.x, cfg.t, nopts.rhp);
        double worst = 0;
        for (int j = 0; j <= 2 * sol.N(); ++j) {
            cplx a = sol.bps.upper[j];
            cplx v1 = dK_dt(sol, a) / dK_dx(sol, a);
            cplx v2 = dK_dt(alt, a) / dK_dx(alt, a);
            worst = std::max(worst, std::abs(v1 - v2) / std::max(1.0, std::abs(v1)));
        }
        c.value = worst;
        c.passed = worst < c.threshold;
        return c;
    });

    std::vector<CheckResult> results(tasks.size());
    if (jobs <= 1) {
        for (std::size_t i = 0; i < tasks.size(); ++i) {
            try {
                results[i] = tasks[i]();
            } catch (const std::exception& e) {
                results[i].name = "task_" + std::to_string(i);
                results[i].passed = false;
                results[i].detail = std::string("exception: ") + e.what();
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= tasks.size()) return;
                try {
                    results[i] = tasks[i]();
                } catch (const std::exception& e) {
                    results[i].name = "task_" + std::to_string(i);
                    results[i].passed = false;
                    results[i].detail = std::string("exception: ") + e.what();
                }
            }
        };
        std::vector<std::thread> pool;
        for (int w = 0; w < std::min<int>(jobs, static_cast<int>(tasks.size())); ++w)
            pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (auto& r : results) rep.checks.push_back(std::move(r));

    rep.all_passed = true;
    for (const auto& c : rep.checks)
        if (!c.passed && !c.skipped) rep.all_passed = false;
    return rep;
}

nlohmann::json verify_report_json(const VerifyReport& rep, const RunConfig& cfg) {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["all_passed"] = rep.all_passed;
    j["checks"] = nlohmann::json::array();
    for (const auto& c : rep.checks) {
        j["checks"].push_back({{"name", c.name},
                               {"passed", c.passed},
                               {"skipped", c.skipped},
                               {"value", c.value},
                               {"threshold", c.threshold},
                               {"detail", c.detail}});
    }
    j["newton"] = newton_report_json(rep.newton, cfg);
    return j;
}

} // namespace rhmod
