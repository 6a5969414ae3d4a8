#pragma once

#include "rhmod/modulation.hpp"

namespace rhmod {

// Partial derivatives of K in the external parameters. Built from the cached
// loop moments plus the Cauchy column at z; f drops out entirely.
cplx dK_dx(const RHPSolution& sol, cplx z);
cplx dK_dt(const RHPSolution& sol, cplx z);

// The combined-column form of dK/dt (the (zeta - s1)-weighted moments,
// quadratured independently); equals dK_dt identically.
cplx dK_dt_combined(const RHPSolution& sol, cplx z);

// Characteristic velocities v_j = dK_dt(a_2j)/dK_dx(a_2j); depend only on
// the branchpoints.
std::vector<cplx> velocities(const RHPSolution& sol);

struct AlphaRates {
    std::vector<cplx> dx, dt;       // (a_2j)_x and (a_2j)_t
    std::vector<cplx> v;            // velocities
    double velocity_identity = 0;   // max |(a_j)_t - v_j (a_j)_x|
};
AlphaRates alpha_rates(const RHPSolution& sol);
AlphaRates alpha_rates(const RHPSolution& sol, const std::vector<cplx>& cj);

struct ConstantsRates {
    std::vector<cplx> W_x, Omega_x, W_t, Omega_t;
    bool finite_difference_fallback = false;   // N >= 2 path
};
// Total derivatives of the constants along the solution manifold; closed
// forms for N = 1, finite differences (with a flag) otherwise.
ConstantsRates constants_rates(const RHPSolution& sol);

// Wronskian combination Omega_x W_t - Omega_t W_x; equals -8 pi^2 / D.
cplx constants_wronskian(const ConstantsRates& cr);

struct SweepSpec {
    char axis = 'x';    // 'x' or 't'
    double from = 0, to = 0, step = 1e-2;
};

struct TrajectoryPoint {
    double x = 0, t = 0;
    BranchpointSet bps;
    std::vector<cplx> W, Omega;
    double residual = 0;      // max |K(a_2j)| after re-projection
    double absD = 0;
    double min_abs_c = 0;
};

struct Trajectory {
    std::vector<TrajectoryPoint> points;
    bool truncated = false;
    std::string stop_reason;
};

struct EvolveOptions {
    NewtonOptions newton;
    double min_step = 1e-5;    // RK4 step floor under halving
};

// Classical RK4 on the branchpoint rates with Newton re-projection after
// each accepted step. Stops and marks the trajectory truncated at
// degeneracies (D or c_j collapse, collisions, loss of the upper half-plane).
Trajectory evolve(const BranchpointSet& initial, const ScatteringData& sd, double x0, double t0,
                  const SweepSpec& sweep, const EvolveOptions& opts = {});

} // namespace rhmod
