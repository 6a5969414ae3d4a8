#include "rhmod/rhp.hpp"

#include <cmath>

#include "rhmod/linalg.hpp"

namespace rhmod {

RHPSolution solve_constants(std::shared_ptr<const ContourSystem> cs, const ScatteringData& sd,
                            double x, double t, const RhpOptions& opts) {
    RHPSolution sol;
    sol.bps = cs->bps;
    sol.sd = sd;
    sol.x = x;
    sol.t = t;
    sol.cs = cs;
    sol.ws = std::make_shared<ContourWorkspace>(*cs, opts.quad);
    sol.opts = opts;

    const int N = sol.N();
    sol.mom_m.assign(N, std::vector<cplx>(std::max(2 * N, 0)));
    sol.mom_c.assign(N, std::vector<cplx>(std::max(2 * N, 0)));
    sol.F.assign(std::max(2 * N, 0), cplx{});

    if (N == 0) {
        sol.D = 1.0;
        return sol;
    }

    for (int i = 0; i < N; ++i)
        for (int k = 0; k < 2 * N; ++k) {
            sol.mom_m[i][k] = sol.ws->moment(cs->loops_m[i], k);
            sol.mom_c[i][k] = sol.ws->moment(cs->loops_c[i], k);
        }
    Chain all = sol.ws->loop_all_chain();
    for (int k = 0; k < 2 * N; ++k) sol.F[k] = sol.ws->f_moment(all, sd, x, t, k);

    // equations k = 0..2N-1 in unknowns (W_1..W_N, Omega_1..Omega_N)
    linalg::Mat M(2 * N, 2 * N);
    std::vector<cplx> rhs(2 * N);
    for (int k = 0; k < 2 * N; ++k) {
        for (int i = 0; i < N; ++i) {
            M(k, i) = sol.mom_m[i][k];
            M(k, N + i) = sol.mom_c[i][k];
        }
        rhs[k] = -sol.F[k];
    }
    sol.D = linalg::det(M);   // the loops-by-powers matrix is the transpose; same determinant
    sol.moment_cond = linalg::cond1(M);
    if (!(sol.moment_cond < 1e12))
        throw NumericsError("moment system is numerically singular (degenerate branchpoints?)");

    std::vector<cplx> u = rhs;
    if (!linalg::solve(M, u)) throw NumericsError("moment system solve failed");

    double rhs_scale = 0, res_scale = 0;
    for (int k = 0; k < 2 * N; ++k) {
        cplx r = -rhs[k];
        for (int i = 0; i < N; ++i) r += M(k, i) * u[i] + M(k, N + i) * u[N + i];
        res_scale = std::max(res_scale, std::abs(r));
        rhs_scale = std::max(rhs_scale, std::abs(rhs[k]));
    }
    sol.linear_residual = res_scale / (1.0 + rhs_scale);

    sol.W.assign(u.begin(), u.begin() + N);
    sol.Omega.assign(u.begin() + N, u.end());
    if (sd.schwarz_symmetric()) {
        for (cplx w : sol.W) sol.max_im_constant = std::max(sol.max_im_constant, std::abs(w.imag()));
        for (cplx o : sol.Omega) sol.max_im_constant = std::max(sol.max_im_constant, std::abs(o.imag()));
    }
    double dscale = 0;
    for (int k = 0; k < 2 * N; ++k)
        for (int j = 0; j < 2 * N; ++j) dscale = std::max(dscale, std::abs(M(k, j)));
    if (!(std::abs(sol.D) > 1e-12 * std::max(1.0, dscale)))
        throw NumericsError("moment determinant D vanished (degenerate configuration)");
    return sol;
}

RHPSolution solve_constants(const BranchpointSet& bps, const ScatteringData& sd, double x,
                            double t, const RhpOptions& opts) {
    auto cs = std::make_shared<ContourSystem>(build_contours(bps, opts.geometry, &sd));
    return solve_constants(std::move(cs), sd, x, t, opts);
}

cplx eval_D(const RHPSolution& sol) { return sol.D; }

cplx eval_K(const RHPSolution& sol, cplx z) {
    const int N = sol.N();
    Chain all = sol.ws->loop_all_chain();
    if (N == 0)
        return sol.ws->f_cauchy(all, sol.sd, sol.x, sol.t, z) / (2.0 * PI * cplx(0, 1));

    const int n = 2 * N + 1;
    linalg::Mat K(n, n);
    for (int i = 0; i < N; ++i) {
        for (int k = 0; k < 2 * N; ++k) {
            K(i, k) = sol.mom_m[i][k];
            K(N + i, k) = sol.mom_c[i][k];
        }
        K(i, 2 * N) = sol.ws->cauchy(sol.cs->loops_m[i], z);
        K(N + i, 2 * N) = sol.ws->cauchy(sol.cs->loops_c[i], z);
    }
    for (int k = 0; k < 2 * N; ++k) K(2 * N, k) = sol.F[k];
    K(2 * N, 2 * N) = sol.ws->f_cauchy(all, sol.sd, sol.x, sol.t, z);
    return linalg::det(K) / (2.0 * PI * cplx(0, 1));
}

namespace {
// bracket of the loop representation: f-kernel over the outer loop plus the
// constant-weighted kernels over the inner loops
cplx bracket(const RHPSolution& sol, cplx z) {
    Chain all = sol.ws->loop_all_chain();
    cplx B = sol.ws->f_cauchy(all, sol.sd, sol.x, sol.t, z);
    for (int i = 0; i < sol.N(); ++i) {
        B += sol.W[i] * sol.ws->cauchy(sol.cs->loops_m[i], z);
        B += sol.Omega[i] * sol.ws->cauchy(sol.cs->loops_c[i], z);
    }
    return B;
}
} // namespace

cplx eval_g(const RHPSolution& sol, cplx z, const LocationFlags& fl) {
    cplx g = sol.R(z) / (4.0 * PI * cplx(0, 1)) * bracket(sol, z);
    if (fl.inside_all) g += 0.5 * sol.f(z);
    for (int i = 0; i < sol.N(); ++i) {
        if (fl.inside_m[i]) g += 0.5 * sol.W[i];
        if (fl.inside_c[i]) g += 0.5 * static_cast<double>(fl.comp_side[i]) * sol.Omega[i];
    }
    return g;
}

cplx eval_g(const RHPSolution& sol, cplx z) { return eval_g(sol, z, sol.cs->point_location(z)); }

cplx eval_h(const RHPSolution& sol, cplx z, const LocationFlags& fl) {
    cplx h = sol.R(z) * eval_K(sol, z) / sol.D;
    if (!fl.inside_all) h -= sol.f(z);
    for (int i = 0; i < sol.N(); ++i) {
        if (fl.inside_m[i]) h += sol.W[i];
        if (fl.inside_c[i]) h += static_cast<double>(fl.comp_side[i]) * sol.Omega[i];
    }
    return h;
}

cplx eval_h(const RHPSolution& sol, cplx z) { return eval_h(sol, z, sol.cs->point_location(z)); }

std::vector<cplx> modulation_residual(const RHPSolution& sol) {
    std::vector<cplx> res;
    res.reserve(sol.N() * 2 + 1);
    double delta = sol.opts.residual_offset;
    for (int j = 0; j <= 2 * sol.N(); ++j) {
        cplx a = sol.bps.upper[j];
        cplx z = a;
        if (delta > 0) {
            cplx u = a - sol.bps.centroid();
            u = std::abs(u) > 0 ? u / std::abs(u) : cplx(0, 1);
            z = a + delta * sol.bps.scale() * u;
        }
        res.push_back(eval_K(sol, z));
    }
    return res;
}

cplx local_constant(const RHPSolution& sol, int j, cplx probe) {
    const int i = 2 * j;   // paper index of the upper branchpoint
    cplx c = 0;
    if (i > 0) {
        int k = (i % 4 == 2) ? (i + 2) / 4 : i / 4;
        if (k >= 1 && k <= sol.N()) c += sol.W[k - 1];
    }
    int kc = 0;
    if (i % 4 == 2) kc = (i + 2) / 4;
    else if (i % 4 == 0) kc = i / 4 + 1;
    if (kc >= 1 && kc <= sol.N())
        c += static_cast<double>(sol.cs->comp_arc_side(kc - 1, probe)) * sol.Omega[kc - 1];
    return c;
}

JumpReport jump_check(const RHPSolution& sol, int samples_per_arc) {
    JumpReport rep;
    double delta = 1e-6 * sol.bps.scale();

    auto richardson_g = [&](cplx p, cplx nv) {
        cplx g1 = eval_g(sol, p + delta * nv);
        cplx g2 = eval_g(sol, p + 0.5 * delta * nv);
        return 2.0 * g2 - g1;
    };
    auto sample_params = [&](int count) {
        std::vector<double> ts;
        for (int k = 0; k < count; ++k)
            ts.push_back(0.25 + 0.5 * (k + 0.5) / count);
        return ts;
    };

    for (int k = 0; k < static_cast<int>(sol.cs->main_arcs.size()); ++k) {
        cplx Wk = (k == 0) ? cplx(0.0) : sol.W[k - 1];
        double worst = 0;
        for (const auto& piece : sol.cs->main_arcs[k].pieces) {
            for (double tg : sample_params(samples_per_arc)) {
                double s = tg * static_cast<double>(piece.segs.size());
                int si = std::min(static_cast<int>(s), static_cast<int>(piece.segs.size()) - 1);
                const Segment& seg = piece.segs[si];
                double tl = s - si;
                cplx p = seg.point(tl);
                cplx d = seg.velocity(tl);
                cplx nv = cplx(0, 1) * d / std::abs(d);
                cplx gp = richardson_g(p, nv), gm = richardson_g(p, -nv);
                worst = std::max(worst, std::abs(gp + gm - sol.f(p) - Wk));
            }
        }
        rep.main_violation.push_back(worst);
        rep.max_violation = std::max(rep.max_violation, worst);
    }
    for (int k = 0; k < static_cast<int>(sol.cs->comp_arcs.size()); ++k) {
        double worst = 0;
        for (const auto& piece : sol.cs->comp_arcs[k].pieces) {
            for (double tg : sample_params(samples_per_arc)) {
                double s = tg * static_cast<double>(piece.segs.size());
                int si = std::min(static_cast<int>(s), static_cast<int>(piece.segs.size()) - 1);
                const Segment& seg = piece.segs[si];
                double tl = s - si;
                cplx p = seg.point(tl);
                cplx d = seg.velocity(tl);
                cplx nv = cplx(0, 1) * d / std::abs(d);
                cplx gp = richardson_g(p, nv), gm = richardson_g(p, -nv);
                worst = std::max(worst, std::abs(gp - gm - sol.Omega[k]));
            }
        }
        rep.comp_violation.push_back(worst);
        rep.max_violation = std::max(rep.max_violation, worst);
    }
    return rep;
}

} // namespace rhmod
