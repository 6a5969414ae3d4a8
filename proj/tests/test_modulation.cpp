#include <doctest.h>

#include "oracles.hpp"
#include "rhmod/modulation.hpp"

using namespace rhmod;

namespace {
RhpOptions fixture_opts() {
    RhpOptions o;
    o.geometry.margin = 0.12;
    return o;
}

NewtonOptions fixture_newton() {
    NewtonOptions n;
    n.rhp = fixture_opts();
    return n;
}

RHPSolution converged_fixture() {
    NewtonReport rep = newton_solve(oracles::fixture_alphas(), oracles::fixture_scattering(),
                                    oracles::kFixtureX, oracles::kFixtureT, fixture_newton());
    REQUIRE(rep.converged);
    return solve_constants(rep.final_alphas, oracles::fixture_scattering(), oracles::kFixtureX,
                           oracles::kFixtureT, fixture_opts());
}
} // namespace

TEST_CASE("c_j vanishes for trivial data and matches golden values at the fixture") {
    auto zero = ScatteringData::parse_f0("0");
    RHPSolution sz = solve_constants(oracles::fixture_alphas(), zero, 0, 0, fixture_opts());
    for (int j = 0; j < 3; ++j) CHECK(std::abs(eval_cj(sz, j)) < 1e-11);

    RHPSolution s = converged_fixture();
    for (int j = 0; j < 3; ++j)
        CHECK(std::abs(eval_cj(s, j) - oracles::kGoldC[j]) < 2e-6);
}

TEST_CASE("the two c_j formulas agree at a converged solution") {
    RHPSolution s = converged_fixture();
    for (int j = 0; j < 3; ++j) {
        cplx c2 = eval_cj(s, j);
        cplx c1 = eval_cj_fprime(s, j);
        CHECK(std::abs(c1 - c2) < 1e-7 * std::abs(c2));
    }
}

TEST_CASE("the f'-loop formula degenerates to zero for entire scattering data") {
    // decay of f'/((z-a) R) kills the outer-loop integral for any polynomial
    // f0 of degree <= 2N+1; the second-order-pole route stays meaningful
    auto cubic = ScatteringData::parse_f0(oracles::kCubicF0);
    RHPSolution s = solve_constants(oracles::fixture_alphas(), cubic, 0.3, 0.1, fixture_opts());
    for (int j = 0; j < 3; ++j) {
        CHECK(std::abs(eval_cj_fprime(s, j)) < 1e-10);
        CHECK(std::abs(eval_cj(s, j)) > 1e-3);
    }
}

TEST_CASE("c_j matches the local expansion fit of h") {
    RHPSolution s = converged_fixture();
    for (int j : {0, 2}) {
        cplx a = s.bps.upper[j];
        cplx u = a - s.bps.centroid();
        u /= std::abs(u);
        auto q = [&](double d) {
            cplx z = a + d * u;
            return (eval_h(s, z) - local_constant(s, j, z)) / ((z - a) * s.R(z));
        };
        cplx q1 = q(1e-3), q2 = q(1e-4);
        cplx fit = (1e-3 * q2 - 1e-4 * q1) / (1e-3 - 1e-4);
        CHECK(std::abs(fit - eval_cj(s, j)) < 1e-4 * std::abs(fit));
    }
}

TEST_CASE("diagonal Jacobian matches finite differences; off-diagonal vanishes") {
    RHPSolution s = converged_fixture();
    std::vector<cplx> cj(3);
    for (int j = 0; j < 3; ++j) cj[j] = eval_cj(s, j);
    auto diag = jacobian_diagonal(s, cj);

    double h = 1e-6;
    double diag_scale = 0;
    for (cplx d : diag) diag_scale = std::max(diag_scale, std::abs(d));
    for (int j = 0; j < 3; ++j) {
        for (int l = 0; l < 3; ++l) {
            BranchpointSet bp = s.bps, bm = s.bps;
            bp.upper[j] += h;
            bm.upper[j] -= h;
            RHPSolution sp = solve_constants(bp, s.sd, s.x, s.t, s.opts);
            RHPSolution sm = solve_constants(bm, s.sd, s.x, s.t, s.opts);
            cplx fd = (eval_K(sp, sp.bps.upper[l]) - eval_K(sm, sm.bps.upper[l])) / (2 * h);
            if (l == j) {
                CHECK(std::abs(fd - diag[j]) < 1e-5 * std::abs(diag[j]));
            } else {
                CHECK(std::abs(fd) < 1e-6 * diag_scale);
            }
        }
    }
}

TEST_CASE("newton: fixed point, reconvergence basin and quadratic tail") {
    NewtonReport base = newton_solve(oracles::fixture_alphas(), oracles::fixture_scattering(),
                                     oracles::kFixtureX, oracles::kFixtureT, fixture_newton());
    REQUIRE(base.converged);
    CHECK(base.iterations <= 2);   // the calibrated alphas are already a root

    // restart at the converged point: 0 or 1 iterations
    NewtonReport again = newton_solve(base.final_alphas, oracles::fixture_scattering(),
                                      oracles::kFixtureX, oracles::kFixtureT, fixture_newton());
    CHECK(again.converged);
    CHECK(again.iterations <= 1);

    // perturb by 1e-3 and reconverge to the same point
    BranchpointSet pert = base.final_alphas;
    const cplx dirs[3] = {cplx(0.6, -0.8), cplx(-0.9, 0.44), cplx(0.28, 0.96)};
    for (int j = 0; j < 3; ++j) pert.upper[j] += 1e-3 * dirs[j];
    NewtonReport rec = newton_solve(pert, oracles::fixture_scattering(), oracles::kFixtureX,
                                    oracles::kFixtureT, fixture_newton());
    REQUIRE(rec.converged);
    CHECK(rec.iterations <= 6);
    double dist = 0;
    for (int j = 0; j < 3; ++j)
        dist = std::max(dist, std::abs(rec.final_alphas.upper[j] - base.final_alphas.upper[j]));
    CHECK(dist < 1e-10);

    // quadratic tail: the last contraction is much stronger than linear
    const auto& rh = rec.residual_history;
    REQUIRE(rh.size() >= 3);
    double rprev = rh[rh.size() - 2], rlast = rh.back();
    CHECK(rlast < std::pow(rprev, 1.5));
}

TEST_CASE("genus-0 newton agrees with the analytic root") {
    // For N = 0, f0 = z^2 + Bz with x = t = 0 the residue calculus gives
    // K(a) = -(a + Re a + B), so the root is a = 1 + 2i for B = -2-2i.
    auto sd = ScatteringData::parse_f0("z^2 - (2+2i)*z");
    sd.set_schwarz(false);
    BranchpointSet guess(0, {cplx(1.2, 1.7)});
    NewtonOptions n = fixture_newton();
    n.rhp.geometry.margin = 0.3;
    NewtonReport rep = newton_solve(guess, sd, 0, 0, n);
    REQUIRE(rep.converged);
    CHECK(std::abs(rep.final_alphas.upper[0] - cplx(1, 2)) < 1e-8);

    // independent residual check by dense tracking-trapezoid on the outer loop
    RHPSolution sol = solve_constants(rep.final_alphas, sd, 0, 0, n.rhp);
    Chain all;
    all.paths.push_back(sol.cs->loop_all);
    cplx a0 = rep.final_alphas.upper[0];
    cplx Kor = oracles::trapezoid_chain_R(sol.bps, all, 1 << 15,
                                          [&](cplx w, cplx R) {
                                              return sd.eval_f(w, 0, 0) / ((w - a0) * R);
                                          }) /
               (2.0 * PI * cplx(0, 1));
    CHECK(std::abs(Kor) < 2e-8);
}

TEST_CASE("newton reports degeneracy for f = 0 rates and non-convergence honestly") {
    // f = 0: residuals vanish identically, so newton converges trivially
    auto zero = ScatteringData::parse_f0("0");
    NewtonReport rep = newton_solve(oracles::fixture_alphas(), zero, 0, 0, fixture_newton());
    CHECK(rep.converged);
    CHECK(rep.iterations == 0);

    // plain cubic: no root exists (the residual cannot be driven to zero)
    auto cubic = ScatteringData::parse_f0(oracles::kCubicF0);
    NewtonOptions n = fixture_newton();
    n.max_iter = 12;
    NewtonReport bad = newton_solve(oracles::fixture_alphas(), cubic, 0.3, 0.1, n);
    CHECK(!bad.converged);
}

TEST_CASE("lemma derKa: formula against finite differences, hypothesis matters") {
    RHPSolution s = converged_fixture();
    for (cplx z : {cplx(0.5, 1.13), cplx(1.9, -1.12)}) {
        for (int j = 0; j < 3; ++j) {
            LemmaReport rep = lemma_derKa_check(s, j, z);
            CHECK(rep.rel_deviation < 1e-5);
        }
    }
    // f = 0: both sides vanish
    auto zero = ScatteringData::parse_f0("0");
    RHPSolution sz = solve_constants(oracles::fixture_alphas(), zero, 0, 0, fixture_opts());
    LemmaReport triv = lemma_derKa_check(sz, 0, cplx(0.5, 1.13));
    CHECK(std::abs(triv.fd) < 1e-9);
    CHECK(std::abs(triv.formula) < 1e-9);

    // negative control: at a non-root the identity fails by O(1)
    auto cubic = ScatteringData::parse_f0(oracles::kCubicF0);
    RHPSolution snc = solve_constants(oracles::fixture_alphas(), cubic, 0.3, 0.1, fixture_opts());
    LemmaReport off = lemma_derKa_check(snc, 1, cplx(0.5, 1.13));
    CHECK(off.rel_deviation > 0.05);
}

TEST_CASE("theorem dhda: derivative vanishes at the root, not away from it") {
    RHPSolution s = converged_fixture();
    std::vector<cplx> zs = {cplx(0.5, 1.13), cplx(2.6, 0.4), cplx(-0.35, -0.6), cplx(1.4, 1.2),
                            cplx(3.1, -1.4)};
    for (int j = 0; j < 3; ++j) {
        TheoremReport rep = theorem_dhda_check(s, j, zs);
        CHECK(rep.max_abs_dh < 1e-5);
    }
    BranchpointSet detuned = s.bps;
    detuned.upper[1] += cplx(0.02, -0.015);
    RHPSolution sd2 = solve_constants(detuned, s.sd, s.x, s.t, s.opts);
    TheoremReport bad = theorem_dhda_check(sd2, 1, zs);
    CHECK(bad.max_abs_dh > 1e-3);
}

TEST_CASE("local exponent: 3/2 at the root, 1/2 detuned") {
    RHPSolution s = converged_fixture();
    for (int j = 0; j < 3; ++j) {
        double slope = local_exponent(s, j);
        CHECK(std::abs(slope - 1.5) < 0.05);
    }
    BranchpointSet detuned = s.bps;
    detuned.upper[0] += cplx(0.03, 0.01);
    detuned.upper[2] -= cplx(0.02, 0.01);
    RHPSolution sd2 = solve_constants(detuned, s.sd, s.x, s.t, s.opts);
    for (int j : {0, 2}) {
        double slope = local_exponent(sd2, j);
        CHECK(std::abs(slope - 0.5) < 0.05);
    }
}

TEST_CASE("conjugation symmetry of the converged configuration") {
    RHPSolution s = converged_fixture();
    auto res = modulation_residual(s);
    for (int j = 0; j < 3; ++j) {
        cplx kc = eval_K(s, std::conj(s.bps.upper[j]));
        CHECK(std::abs(kc - std::conj(res[j])) < 1e-9);
    }
}
