#include "rhmod/modulation.hpp"

#include <algorithm>
#include <cmath>

#include "rhmod/linalg.hpp"

namespace rhmod {

cplx eval_cj(const RHPSolution& sol, int j) {
    cplx a = sol.bps.upper[j];
    Chain all = sol.ws->loop_all_chain();
    cplx v = sol.ws->f_cauchy2(all, sol.sd, sol.x, sol.t, a);
    for (int i = 0; i < sol.N(); ++i) {
        v += sol.W[i] * sol.ws->cauchy2(sol.cs->loops_m[i], a);
        v += sol.Omega[i] * sol.ws->cauchy2(sol.cs->loops_c[i], a);
    }
    return v / (2.0 * PI * cplx(0, 1));
}

cplx eval_cj_fprime(const RHPSolution& sol, int j) {
    cplx a = sol.bps.upper[j];
    Chain all = sol.ws->loop_all_chain();
    return sol.ws->fprime_cauchy(all, sol.sd, sol.x, sol.t, a) / (3.0 * PI * cplx(0, 1));
}

std::vector<cplx> jacobian_diagonal(const RHPSolution& sol, const std::vector<cplx>& cj) {
    std::vector<cplx> out;
    out.reserve(cj.size());
    for (cplx c : cj) out.push_back(1.5 * c * sol.D);
    return out;
}

NewtonReport newton_solve(const BranchpointSet& guess, const ScatteringData& sd, double x,
                          double t, const NewtonOptions& opts) {
    NewtonReport rep;
    BranchpointSet bps = guess;
    double scale = bps.scale();

    auto residual_of = [&](const BranchpointSet& b, RHPSolution& sol_out) {
        sol_out = solve_constants(b, sd, x, t, opts.rhp);
        return modulation_residual(sol_out);
    };
    auto max_abs = [](const std::vector<cplx>& v) {
        double m = 0;
        for (cplx c : v) m = std::max(m, std::abs(c));
        return m;
    };
    auto admissible = [&](const BranchpointSet& b) {
        for (cplx a : b.upper)
            if (!(a.imag() > opts.min_im_factor * scale)) return false;
        return b.min_gap() > opts.collision_factor * scale;
    };

    RHPSolution sol;
    std::vector<cplx> K;
    try {
        K = residual_of(bps, sol);
    } catch (const std::exception& e) {
        rep.stop_reason = std::string("initial configuration rejected: ") + e.what();
        rep.final_alphas = bps;
        return rep;
    }
    double res = max_abs(K);
    rep.residual_history.push_back(res);

    for (int it = 0; it < opts.max_iter; ++it) {
        std::vector<cplx> cj(bps.upper.size());
        try {
            for (int j = 0; j <= 2 * bps.N; ++j) cj[j] = eval_cj(sol, j);
        } catch (const std::exception& e) {
            rep.stop_reason = std::string("Jacobian quadrature failed: ") + e.what();
            break;
        }

        rep.residuals = K;
        rep.c_values = cj;
        rep.D = sol.D;
        rep.moment_cond = sol.moment_cond;

        if (res <= opts.tol) {
            rep.converged = true;
            rep.stop_reason = "converged";
            break;
        }

        double min_jac = 1e300;
        for (cplx c : cj) min_jac = std::min(min_jac, std::abs(1.5 * c * sol.D));
        if (min_jac < 1e-14) {
            rep.stop_reason = "singular Jacobian (c_j D collapse; fold or degenerate data)";
            break;
        }

        std::vector<cplx> step(bps.upper.size());
        for (std::size_t j = 0; j < step.size(); ++j) step[j] = -K[j] / (1.5 * cj[j] * sol.D);

        double lam = 1.0;
        bool accepted = false;
        for (int h = 0; h <= opts.max_halvings; ++h, lam *= 0.5) {
            BranchpointSet trial = bps;
            for (std::size_t j = 0; j < step.size(); ++j) trial.upper[j] += lam * step[j];
            if (!admissible(trial)) continue;
            RHPSolution tsol;
            std::vector<cplx> tK;
            try {
                tK = residual_of(trial, tsol);
            } catch (const std::exception&) {
                continue;
            }
            double tres = max_abs(tK);
            if (tres < res || tres <= opts.tol) {
                bps = trial;
                sol = std::move(tsol);
                K = std::move(tK);
                res = tres;
                accepted = true;
                break;
            }
        }
        rep.iterations = it + 1;
        if (!accepted) {
            rep.stop_reason = "no admissible descent step (branchpoints leaving the domain?)";
            break;
        }
        rep.residual_history.push_back(res);
        if (res <= opts.tol) {
            rep.converged = true;
            rep.stop_reason = "converged";
            std::vector<cplx> cjf(bps.upper.size());
            for (int j = 0; j <= 2 * bps.N; ++j) cjf[j] = eval_cj(sol, j);
            rep.residuals = K;
            rep.c_values = cjf;
            rep.D = sol.D;
            rep.moment_cond = sol.moment_cond;
            break;
        }
    }
    if (!rep.converged && rep.stop_reason.empty())
        rep.stop_reason = "iteration budget exhausted";
    rep.final_alphas = bps;
    return rep;
}

cplx dD_dalpha(const RHPSolution& sol, cplx a) {
    const int N = sol.N();
    if (N == 0) return 0.0;
    // d m_k / d a = (1/2) * loop integral of zeta^k / ((zeta - a) R)
    std::vector<std::vector<cplx>> dm_m(N, std::vector<cplx>(2 * N)), dm_c(N, std::vector<cplx>(2 * N));
    for (int i = 0; i < N; ++i)
        for (int k = 0; k < 2 * N; ++k) {
            auto kern = [&](cplx z, cplx R) {
                cplx zk = 1.0;
                for (int p = 0; p < k; ++p) zk *= z;
                return 0.5 * zk / ((z - a) * R);
            };
            dm_m[i][k] = sol.ws->chain_integral(sol.cs->loops_m[i], kern).value;
            dm_c[i][k] = sol.ws->chain_integral(sol.cs->loops_c[i], kern).value;
        }
    // product rule over the 2N columns of the loops-by-powers determinant
    cplx total = 0;
    for (int col = 0; col < 2 * N; ++col) {
        linalg::Mat M(2 * N, 2 * N);
        for (int i = 0; i < N; ++i)
            for (int k = 0; k < 2 * N; ++k) {
                M(i, k) = (k == col) ? dm_m[i][k] : sol.mom_m[i][k];
                M(N + i, k) = (k == col) ? dm_c[i][k] : sol.mom_c[i][k];
            }
        total += linalg::det(M);
    }
    return total;
}

LemmaReport lemma_derKa_check(const RHPSolution& sol, int j, cplx z, double step) {
    LemmaReport rep;
    double h = step * sol.bps.scale();

    BranchpointSet bp = sol.bps, bm = sol.bps;
    bp.upper[j] += h;
    bm.upper[j] -= h;
    RHPSolution sp = solve_constants(bp, sol.sd, sol.x, sol.t, sol.opts);
    RHPSolution sm = solve_constants(bm, sol.sd, sol.x, sol.t, sol.opts);
    rep.fd = (eval_K(sp, z) - eval_K(sm, z)) / (2.0 * h);

    cplx hz = sol.R(z) * eval_K(sol, z) / sol.D;   // standard-region h
    cplx a = sol.bps.upper[j];
    cplx f1 = hz / sol.R(z) * (sol.D / (2.0 * (z - a)) + dD_dalpha(sol, a));
    cplx ac = std::conj(a);
    cplx f2 = hz / sol.R(z) * (sol.D / (2.0 * (z - ac)) + dD_dalpha(sol, ac));
    rep.formula = f1 + f2;
    rep.rel_deviation = std::abs(rep.fd - rep.formula) / std::max(1e-300, std::abs(rep.formula));
    return rep;
}

TheoremReport theorem_dhda_check(const RHPSolution& sol, int j, const std::vector<cplx>& zs,
                                 double step) {
    TheoremReport rep;
    double h = step * sol.bps.scale();
    BranchpointSet bp = sol.bps, bm = sol.bps;
    bp.upper[j] += h;
    bm.upper[j] -= h;
    RHPSolution sp = solve_constants(bp, sol.sd, sol.x, sol.t, sol.opts);
    RHPSolution sm = solve_constants(bm, sol.sd, sol.x, sol.t, sol.opts);
    for (cplx z : zs) {
        double v = std::abs((eval_h(sp, z) - eval_h(sm, z)) / (2.0 * h));
        rep.abs_dh.push_back(v);
        rep.max_abs_dh = std::max(rep.max_abs_dh, v);
    }
    return rep;
}

double local_exponent(const RHPSolution& sol, int j, cplx direction, double delta_min,
                      double delta_max, int n) {
    cplx a = sol.bps.upper[j];
    cplx u = direction;
    if (u == cplx(0.0)) {
        u = a - sol.bps.centroid();
        if (std::abs(u) < 1e-12) u = cplx(0, 1);
    }
    u /= std::abs(u);

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int k = 0; k < n; ++k) {
        double d = delta_min * std::pow(delta_max / delta_min, k / double(n - 1));
        cplx z = a + d * u;
        cplx dev = eval_h(sol, z) - local_constant(sol, j, z);
        double lx = std::log(d), ly = std::log(std::abs(dev));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace rhmod
