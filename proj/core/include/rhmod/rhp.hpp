#pragma once

#include <memory>
#include <vector>

#include "rhmod/quadrature.hpp"

namespace rhmod {

struct RhpOptions {
    QuadratureOptions quad;
    GeometryOptions geometry;
    double residual_offset = 0.0;   // |delta| for branchpoint residual probes; 0 = evaluate at the point
};

// Solved scalar RHP: the constants W_j, Omega_j from the moment system, the
// moment determinant D and the cached loop moments everything downstream
// reuses. Immutable after solve_constants.
struct RHPSolution {
    BranchpointSet bps;
    ScatteringData sd;
    double x = 0, t = 0;
    std::shared_ptr<const ContourSystem> cs;
    std::shared_ptr<const ContourWorkspace> ws;
    RhpOptions opts;

    std::vector<cplx> W;       // W_1..W_N (W_0 == 0 identically)
    std::vector<cplx> Omega;   // Omega_1..Omega_N
    cplx D = 1.0;
    double moment_cond = 1.0;
    double linear_residual = 0.0;    // residual of the moment solve
    double max_im_constant = 0.0;    // symmetry diagnostic: max |Im W|, |Im Omega|

    std::vector<std::vector<cplx>> mom_m, mom_c;   // [i][k], k = 0..2N-1
    std::vector<cplx> F;                           // f-moments, k = 0..2N-1

    int N() const { return bps.N; }
    cplx f(cplx z) const { return sd.eval_f(z, x, t); }
    cplx fprime(cplx z) const { return sd.eval_f_prime(z, x, t); }
    cplx R(cplx z) const { return ws->radical()(z); }
};

// Builds contours, computes the loop moments and solves the 2N x 2N moment
// system. Throws NumericsError when the system is near singular (cond > 1e12).
RHPSolution solve_constants(const BranchpointSet& bps, const ScatteringData& sd, double x,
                            double t, const RhpOptions& opts = {});

// As above but reusing an existing contour system (must match bps).
RHPSolution solve_constants(std::shared_ptr<const ContourSystem> cs, const ScatteringData& sd,
                            double x, double t, const RhpOptions& opts = {});

cplx eval_D(const RHPSolution& sol);

// The (2N+1)x(2N+1) determinant of the moment matrix bordered by the Cauchy
// column at z, divided by 2 pi i. For N = 0 this degenerates to the single
// f-weighted Cauchy integral over the outer loop.
cplx eval_K(const RHPSolution& sol, cplx z);

// g and h evaluators, location-aware. Off the standard region the residue
// corrections (f/2, W_i/2, +-Omega_i/2 for g; -f, W_i, +-Omega_i for h)
// are applied from the winding flags.
cplx eval_g(const RHPSolution& sol, cplx z);
cplx eval_g(const RHPSolution& sol, cplx z, const LocationFlags& flags);
cplx eval_h(const RHPSolution& sol, cplx z);
cplx eval_h(const RHPSolution& sol, cplx z, const LocationFlags& flags);

// The modulation residuals K(a_2j), j = 0..2N. The built loops place each
// branchpoint inside exactly its adjacent loops, so the evaluation is a
// plain K evaluation (optionally offset by opts.residual_offset).
std::vector<cplx> modulation_residual(const RHPSolution& sol);

// W_k (0 for the axis-crossing arc) and Omega_k adjacent to upper
// branchpoint a_{2j}; the Omega sign is resolved per probe point.
cplx local_constant(const RHPSolution& sol, int j, cplx probe);

struct JumpReport {
    std::vector<double> main_violation;   // per main arc: max |g_+ + g_- - f - W_k|
    std::vector<double> comp_violation;   // per comp arc: max |g_+ - g_- - Omega_k|
    double max_violation = 0;
};
JumpReport jump_check(const RHPSolution& sol, int samples_per_arc = 3);

} // namespace rhmod
