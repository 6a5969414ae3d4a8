#pragma once

#include <string>

#include "rhmod/rhp.hpp"

namespace rhmod {

// Leading local coefficient of h at upper branchpoint a_{2j}:
// h(z) = W +- Omega + c_j (z - a_{2j}) R(z) + O((z-a)^{5/2}).
// Evaluated from the second-order-pole kernels of the loop representation;
// equals K'(a_{2j})/D, so it is well defined at any configuration.
cplx eval_cj(const RHPSolution& sol, int j);

// The f'-weighted single-integral form. Agrees with eval_cj on the solution
// manifold; away from it (and for entire f0) the two differ -- see tests.
cplx eval_cj_fprime(const RHPSolution& sol, int j);

// Newton Jacobian diagonal (3/2) c_j D; off-diagonal entries vanish
// identically when each branchpoint (and its conjugate) is treated as an
// independent variable.
std::vector<cplx> jacobian_diagonal(const RHPSolution& sol, const std::vector<cplx>& cj);

struct NewtonOptions {
    double tol = 1e-10;        // absolute threshold on max |K(a_2j)|
    int max_iter = 25;
    int max_halvings = 8;
    double min_im_factor = 1e-4;      // lower-half guard: Im a > factor * scale
    double collision_factor = 1e-5;   // min pairwise gap guard, relative to scale
    RhpOptions rhp;
};

struct NewtonReport {
    int iterations = 0;
    std::vector<double> residual_history;
    BranchpointSet final_alphas;
    std::vector<cplx> residuals;
    std::vector<cplx> c_values;
    cplx D = 0;
    double moment_cond = 0;
    bool converged = false;
    std::string stop_reason;
};

NewtonReport newton_solve(const BranchpointSet& guess, const ScatteringData& sd, double x,
                          double t, const NewtonOptions& opts = {});

// dK(z)/da_j compared against (h/R)[D/(2(z-a)) + dD/da]. The finite
// difference moves the stored upper point, which drags its Schwarz
// conjugate along; the formula side therefore sums the contributions of
// a_{2j} and conj(a_{2j}) (both are roots at a converged solution).
struct LemmaReport {
    cplx fd{}, formula{};
    double rel_deviation = 0;
};
LemmaReport lemma_derKa_check(const RHPSolution& sol, int j, cplx z, double step = 1e-6);

// dD/da at an arbitrary point a (the differentiated moment integrals).
cplx dD_dalpha(const RHPSolution& sol, cplx a);

struct TheoremReport {
    std::vector<double> abs_dh;   // |dh(z_k)/da_j| per test point
    double max_abs_dh = 0;
};
TheoremReport theorem_dhda_check(const RHPSolution& sol, int j, const std::vector<cplx>& zs,
                                 double step = 1e-6);

// Fitted slope of log|h - (W +- Omega)| against log|z - a_{2j}| along the
// ray a + delta u; 3/2 at a converged solution, 1/2 otherwise.
double local_exponent(const RHPSolution& sol, int j, cplx direction = 0,
                      double delta_min = 1e-5, double delta_max = 1e-2, int n = 7);

} // namespace rhmod
