#include "rhmod/evolution.hpp"

#include <algorithm>
#include <cmath>

#include "rhmod/linalg.hpp"

namespace rhmod {

namespace {
cplx sum_alpha(const BranchpointSet& bps) {
    cplx s = 0;
    for (cplx a : bps.all_points()) s += a;
    return s;
}

// cofactor of the f-row and moment column `col` in the bordered K matrix
// (the Cauchy column stands in for the deleted moment column)
cplx f_row_cofactor(const RHPSolution& sol, cplx z, int col) {
    const int N = sol.N();
    linalg::Mat M(2 * N, 2 * N);
    for (int i = 0; i < N; ++i) {
        int jc = 0;
        for (int k = 0; k < 2 * N; ++k) {
            if (k == col) continue;
            M(i, jc) = sol.mom_m[i][k];
            M(N + i, jc) = sol.mom_c[i][k];
            ++jc;
        }
        M(i, 2 * N - 1) = sol.ws->cauchy(sol.cs->loops_m[i], z);
        M(N + i, 2 * N - 1) = sol.ws->cauchy(sol.cs->loops_c[i], z);
    }
    cplx minor = linalg::det(M);
    // cofactor sign (-1)^(row+col) with row = 2N
    return (col % 2 == 0) ? minor : -minor;
}
} // namespace

cplx dK_dx(const RHPSolution& sol, cplx z) {
    const int N = sol.N();
    if (N == 0) return 1.0;
    return f_row_cofactor(sol, z, 2 * N - 1);
}

cplx dK_dt(const RHPSolution& sol, cplx z) {
    const int N = sol.N();
    if (N == 0) return sum_alpha(sol.bps) + 2.0 * z;
    return 2.0 * f_row_cofactor(sol, z, 2 * N - 2) + sum_alpha(sol.bps) * dK_dx(sol, z);
}

cplx dK_dt_combined(const RHPSolution& sol, cplx z) {
    const int N = sol.N();
    if (N != 1) throw DomainError("combined-column form implemented for N = 1");
    cplx s1 = 0.5 * sum_alpha(sol.bps);
    auto kern = [s1](cplx zeta, cplx R) { return (zeta - s1) / R; };
    cplx m1m = sol.ws->chain_integral(sol.cs->loops_m[0], kern).value;
    cplx m1c = sol.ws->chain_integral(sol.cs->loops_c[0], kern).value;
    cplx Cm = sol.ws->cauchy(sol.cs->loops_m[0], z);
    cplx Cc = sol.ws->cauchy(sol.cs->loops_c[0], z);
    return 2.0 * (m1m * Cc - Cm * m1c);
}

std::vector<cplx> velocities(const RHPSolution& sol) {
    std::vector<cplx> v;
    for (int j = 0; j <= 2 * sol.N(); ++j) {
        cplx a = sol.bps.upper[j];
        cplx den = dK_dx(sol, a);
        if (std::abs(den) < 1e-14)
            throw NumericsError("characteristic degeneracy: dK/dx vanished at a branchpoint");
        v.push_back(dK_dt(sol, a) / den);
    }
    return v;
}

AlphaRates alpha_rates(const RHPSolution& sol) {
    std::vector<cplx> cj(sol.bps.upper.size());
    for (int j = 0; j <= 2 * sol.N(); ++j) cj[j] = eval_cj(sol, j);
    return alpha_rates(sol, cj);
}

AlphaRates alpha_rates(const RHPSolution& sol, const std::vector<cplx>& cj) {
    AlphaRates out;
    double scale = 0;
    for (int j = 0; j <= 2 * sol.N(); ++j) {
        cplx jac = 1.5 * cj[j] * sol.D;
        if (std::abs(jac) < 1e-14)
            throw NumericsError("degenerate rate: (3/2) c_j D vanished (f too trivial or fold point)");
        cplx a = sol.bps.upper[j];
        cplx kx = dK_dx(sol, a), kt = dK_dt(sol, a);
        out.dx.push_back(-kx / jac);
        out.dt.push_back(-kt / jac);
        out.v.push_back(kt / kx);
        scale = std::max(scale, std::abs(out.dt.back()));
    }
    for (std::size_t j = 0; j < out.dx.size(); ++j)
        out.velocity_identity = std::max(out.velocity_identity,
                                         std::abs(out.dt[j] - out.v[j] * out.dx[j]) / std::max(1.0, scale));
    return out;
}

ConstantsRates constants_rates(const RHPSolution& sol) {
    ConstantsRates cr;
    const int N = sol.N();
    if (N == 0) return cr;
    const cplx I(0, 1);
    if (N == 1) {
        cplx s1 = 0.5 * sum_alpha(sol.bps);
        auto kern = [s1](cplx zeta, cplx R) { return (zeta - s1) / R; };
        cplx m1ms = sol.ws->chain_integral(sol.cs->loops_m[0], kern).value;
        cplx m1cs = sol.ws->chain_integral(sol.cs->loops_c[0], kern).value;
        cr.W_x = {2.0 * PI * I * sol.mom_c[0][0] / sol.D};
        cr.Omega_x = {-2.0 * PI * I * sol.mom_m[0][0] / sol.D};
        cr.W_t = {-4.0 * PI * I * m1cs / sol.D};
        cr.Omega_t = {4.0 * PI * I * m1ms / sol.D};
        return cr;
    }
    // no closed form is written out for N >= 2; differentiate the
    // constant solve directly
    cr.finite_difference_fallback = true;
    double hx = 1e-4 * std::max(1.0, std::abs(sol.x));
    double ht = 1e-4 * std::max(1.0, std::abs(sol.t));
    RHPSolution sxp = solve_constants(sol.cs, sol.sd, sol.x + hx, sol.t, sol.opts);
    RHPSolution sxm = solve_constants(sol.cs, sol.sd, sol.x - hx, sol.t, sol.opts);
    RHPSolution stp = solve_constants(sol.cs, sol.sd, sol.x, sol.t + ht, sol.opts);
    RHPSolution stm = solve_constants(sol.cs, sol.sd, sol.x, sol.t - ht, sol.opts);
    for (int i = 0; i < N; ++i) {
        cr.W_x.push_back((sxp.W[i] - sxm.W[i]) / (2 * hx));
        cr.Omega_x.push_back((sxp.Omega[i] - sxm.Omega[i]) / (2 * hx));
        cr.W_t.push_back((stp.W[i] - stm.W[i]) / (2 * ht));
        cr.Omega_t.push_back((stp.Omega[i] - stm.Omega[i]) / (2 * ht));
    }
    return cr;
}

cplx constants_wronskian(const ConstantsRates& cr) {
    if (cr.W_x.empty()) throw DomainError("no constants at N = 0");
    return cr.Omega_x[0] * cr.W_t[0] - cr.Omega_t[0] * cr.W_x[0];
}

// --------------------------------------------------------------------- evolve

namespace {
struct RateEval {
    std::vector<cplx> rate;
    double absD = 0, min_abs_c = 0;
};

RateEval eval_rates(const BranchpointSet& bps, const ScatteringData& sd, double x, double t,
                    char axis, const RhpOptions& ropts) {
    RHPSolution sol = solve_constants(bps, sd, x, t, ropts);
    std::vector<cplx> cj(bps.upper.size());
    double minc = 1e300;
    for (int j = 0; j <= 2 * bps.N; ++j) {
        cj[j] = eval_cj(sol, j);
        minc = std::min(minc, std::abs(cj[j]));
    }
    AlphaRates ar = alpha_rates(sol, cj);
    RateEval ev;
    ev.rate = (axis == 'x') ? ar.dx : ar.dt;
    ev.absD = std::abs(sol.D);
    ev.min_abs_c = minc;
    return ev;
}

BranchpointSet advanced(const BranchpointSet& b, const std::vector<cplx>& k, double h) {
    BranchpointSet out = b;
    for (std::size_t j = 0; j < out.upper.size(); ++j) out.upper[j] += h * k[j];
    return out;
}
} // namespace

Trajectory evolve(const BranchpointSet& initial, const ScatteringData& sd, double x0, double t0,
                  const SweepSpec& sweep, const EvolveOptions& opts) {
    Trajectory traj;
    BranchpointSet bps = initial;
    double s = sweep.from;
    double dir = (sweep.to >= sweep.from) ? 1.0 : -1.0;
    double step = std::abs(sweep.step);

    auto param_xt = [&](double sv) {
        double x = (sweep.axis == 'x') ? sv : x0;
        double t = (sweep.axis == 't') ? sv : t0;
        return std::pair<double, double>{x, t};
    };

    auto project_and_record = [&](double sv) -> bool {
        auto [x, t] = param_xt(sv);
        NewtonReport rep = newton_solve(bps, sd, x, t, opts.newton);
        if (!rep.converged) {
            traj.truncated = true;
            traj.stop_reason = "re-projection failed: " + rep.stop_reason;
            return false;
        }
        bps = rep.final_alphas;
        TrajectoryPoint pt;
        pt.x = x;
        pt.t = t;
        pt.bps = bps;
        pt.residual = rep.residual_history.empty() ? 0.0 : rep.residual_history.back();
        pt.absD = std::abs(rep.D);
        double minc = 1e300;
        for (cplx c : rep.c_values) minc = std::min(minc, std::abs(c));
        pt.min_abs_c = minc;
        RHPSolution sol = solve_constants(bps, sd, x, t, opts.newton.rhp);
        pt.W = sol.W;
        pt.Omega = sol.Omega;
        traj.points.push_back(std::move(pt));
        return true;
    };

    if (!project_and_record(s)) return traj;

    while (dir * (sweep.to - s) > 1e-14) {
        double h = std::min(step, std::abs(sweep.to - s)) * dir;
        bool advanced_ok = false;
        while (true) {
            try {
                auto [x1, t1] = param_xt(s);
                auto [x2, t2] = param_xt(s + h / 2);
                auto [x3, t3] = param_xt(s + h);
                RateEval k1 = eval_rates(bps, sd, x1, t1, sweep.axis, opts.newton.rhp);
                RateEval k2 = eval_rates(advanced(bps, k1.rate, h / 2), sd, x2, t2, sweep.axis, opts.newton.rhp);
                RateEval k3 = eval_rates(advanced(bps, k2.rate, h / 2), sd, x2, t2, sweep.axis, opts.newton.rhp);
                RateEval k4 = eval_rates(advanced(bps, k3.rate, h), sd, x3, t3, sweep.axis, opts.newton.rhp);
                BranchpointSet next = bps;
                for (std::size_t j = 0; j < next.upper.size(); ++j)
                    next.upper[j] += h / 6.0 * (k1.rate[j] + 2.0 * k2.rate[j] + 2.0 * k3.rate[j] + k4.rate[j]);
                next.validate();
                bps = next;
                advanced_ok = true;
                break;
            } catch (const std::exception& e) {
                if (std::abs(h) / 2 < opts.min_step) {
                    traj.truncated = true;
                    traj.stop_reason = std::string("degeneracy during step: ") + e.what();
                    return traj;
                }
                h /= 2;
            }
        }
        if (!advanced_ok) break;
        s += h;
        if (!project_and_record(s)) return traj;
    }
    return traj;
}

} // namespace rhmod
