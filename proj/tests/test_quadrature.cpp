#include <doctest.h>

#include "oracles.hpp"
#include "rhmod/quadrature.hpp"

using namespace rhmod;

namespace {
Path circle(cplx center, double radius, bool ccw = true) {
    Path p;
    p.closed = true;
    if (ccw) {
        p.segs.push_back(Segment::arc(center, radius, 0, PI));
        p.segs.push_back(Segment::arc(center, radius, PI, 2 * PI));
    } else {
        p.segs.push_back(Segment::arc(center, radius, 2 * PI, PI));
        p.segs.push_back(Segment::arc(center, radius, PI, 0));
    }
    return p;
}

ContourSystem fixture_contours(double margin = 0.12) {
    GeometryOptions g;
    g.margin = margin;
    return build_contours(oracles::fixture_alphas(), g);
}
} // namespace

TEST_CASE("residue, entire function and antiderivative sanity") {
    cplx z0(0.3, 0.2);
    auto res = integrate_path([&](cplx z) { return 1.0 / (z - z0); }, circle(z0, 1.0));
    CHECK(std::abs(res.value - cplx(0, 2 * PI)) < 1e-12);
    CHECK(res.abs_error_estimate >= 0);
    CHECK(res.evaluations > 0);

    auto zero = integrate_path([](cplx z) { return z * z; }, circle(cplx(0.5, -1), 2.0));
    CHECK(std::abs(zero.value) < 1e-12);

    Path segp;
    segp.segs.push_back(Segment::line(0.0, 1.0));
    auto ex = integrate_path([](cplx z) { return std::exp(z); }, segp);
    CHECK(std::abs(ex.value - (std::exp(1.0) - 1.0)) < 1e-12);
}

TEST_CASE("orientation reversal negates integrals") {
    Path c = circle(cplx(0, 0.4), 1.3);
    auto f = [](cplx z) { return std::exp(z) / (z - cplx(0, 0.4)); };
    auto a = integrate_path(f, c);
    auto b = integrate_path(f, c.reversed());
    CHECK(std::abs(a.value + b.value) < 1e-11);
}

TEST_CASE("big-circle moments: decay and residue at infinity") {
    ContourSystem cs = fixture_contours();
    Radical R(cs);
    Path big = circle(cplx(1, 0), 100.0);   // contains all cuts
    CHECK(std::abs(loop_moment(R, big, 0).value) < 1e-10);
    CHECK(std::abs(loop_moment(R, big, 1).value) < 1e-10);
    CHECK(std::abs(loop_moment(R, big, 2).value - cplx(0, 2 * PI)) < 1e-9);
}

TEST_CASE("cauchy kernel: interior analyticity and residue bookkeeping") {
    ContourSystem cs = fixture_contours();
    Radical R(cs);
    // closed path with all cuts outside and z outside: zero
    Path small = circle(cplx(5, 3), 0.8);
    CHECK(std::abs(loop_cauchy(R, small, cplx(9, 4)).value) < 1e-10);
    // residue relation: same kernel point, contours with z enclosed vs not;
    // the difference is the ccw residue 2 pi i / R(z)
    cplx zk(3.8, 0.0);
    Path big = circle(cplx(1, 0), 100.0);      // cuts and z inside
    Path tight = circle(cplx(1, 0), 2.3);      // cuts inside, z outside
    cplx I_in = loop_cauchy(R, big, zk).value;
    cplx I_out = loop_cauchy(R, tight, zk).value;
    CHECK(std::abs((I_in - I_out) - cplx(0, 2 * PI) / R(zk)) < 1e-9);
}

TEST_CASE("homotopy invariance of loop moments across margins") {
    GeometryOptions g1, g2;
    g1.margin = 0.10;
    g2.margin = 0.16;
    ContourSystem c1 = build_contours(oracles::fixture_alphas(), g1);
    ContourSystem c2 = build_contours(oracles::fixture_alphas(), g2);
    ContourWorkspace w1(c1), w2(c2);
    for (int k = 0; k < 2; ++k) {
        cplx a = w1.moment(c1.loops_m[0], k), b = w2.moment(c2.loops_m[0], k);
        CHECK(std::abs(a - b) < 1e-10 * (1 + std::abs(a)));
        cplx ac = w1.moment(c1.loops_c[0], k), bc = w2.moment(c2.loops_c[0], k);
        CHECK(std::abs(ac - bc) < 1e-10 * (1 + std::abs(ac)));
    }
    auto sd = oracles::fixture_scattering();
    cplx f1 = w1.f_moment(w1.loop_all_chain(), sd, 0.3, 0.1, 1);
    cplx f2 = w2.f_moment(w2.loop_all_chain(), sd, 0.3, 0.1, 1);
    CHECK(std::abs(f1 - f2) < 1e-9 * (1 + std::abs(f1)));
}

TEST_CASE("loop integrals agree with the dense-trapezoid oracle") {
    ContourSystem cs = fixture_contours();
    ContourWorkspace ws(cs);

    // m-loop moments against per-factor-tracking trapezoid
    for (int k = 0; k < 2; ++k) {
        cplx lib = ws.moment(cs.loops_m[0], k);
        cplx ref = oracles::trapezoid_chain_R(cs.bps, cs.loops_m[0], 1 << 15,
                                              [k](cplx z, cplx R) {
                                                  cplx zk = 1.0;
                                                  for (int i = 0; i < k; ++i) zk *= z;
                                                  return zk / R;
                                              });
        CHECK(std::abs(lib - ref) < 5e-9 * (1 + std::abs(lib)));
    }
    // oval moments (sheet-tracked chain)
    cplx libc0 = ws.moment(cs.loops_c[0], 0);
    cplx refc0 = oracles::trapezoid_chain_R(cs.bps, cs.loops_c[0], 1 << 15,
                                            [](cplx, cplx R) { return 1.0 / R; });
    CHECK(std::abs(libc0 - refc0) < 5e-9 * (1 + std::abs(libc0)));

    // f-weighted Cauchy kernel over the outer loop, cubic data
    auto sd = ScatteringData::parse_f0(oracles::kCubicF0);
    cplx z0(0.5, 2.5);   // outside the outer loop
    cplx libc = ws.f_cauchy(ws.loop_all_chain(), sd, 0.3, 0.1, z0);
    cplx refc = oracles::trapezoid_chain_R(cs.bps, ws.loop_all_chain(), 1 << 16,
                                           [&](cplx z, cplx R) {
                                               return sd.eval_f(z, 0.3, 0.1) / ((z - z0) * R);
                                           });
    CHECK(std::abs(libc - refc) < 1e-8 * (1 + std::abs(libc)));
}

TEST_CASE("f-weighted moments: zero and constant scattering data") {
    ContourSystem cs = fixture_contours();
    ContourWorkspace ws(cs);
    auto zero = ScatteringData::parse_f0("0");
    CHECK(std::abs(ws.f_moment(ws.loop_all_chain(), zero, 0, 0, 0)) == 0.0);
    auto cst = ScatteringData::parse_f0("2.5");
    // f == c: the big-loop moments of zeta^k/R vanish for k <= 2N-1
    CHECK(std::abs(ws.f_moment(ws.loop_all_chain(), cst, 0, 0, 0)) < 1e-10);
    CHECK(std::abs(ws.f_moment(ws.loop_all_chain(), cst, 0, 0, 1)) < 1e-10);
}

TEST_CASE("kernel distance guard") {
    ContourSystem cs = fixture_contours();
    ContourWorkspace ws(cs);
    cplx on_path = cs.loops_m[0].paths[0].segs[0].point(0.4);
    CHECK_THROWS_AS(ws.cauchy(cs.loops_m[0], on_path), DomainError);
}

TEST_CASE("segment reduction identities at N=1") {
    ContourSystem cs = fixture_contours();
    ContourWorkspace ws(cs);
    cplx zm = 0.5 * (cs.bps.point(2) + cs.bps.point(4));   // center of the main arc
    cplx zc = 0.5 * (cs.bps.point(0) + cs.bps.point(2));   // center of the comp arc
    auto rep = segment_reduction_check(ws, zm, zc);
    CHECK(rep.discrepancy_m < 1e-8 * (1 + std::abs(rep.loop_m_value)));
    CHECK(rep.discrepancy_c < 1e-8 * (1 + std::abs(rep.loop_c_value)));

    // also valid for z strictly inside the loop but off the arc
    cplx zin = zm + 0.04 * cplx(0, 1);
    auto rep2 = segment_reduction_check(ws, zin, zc);
    CHECK(rep2.discrepancy_m < 1e-8 * (1 + std::abs(rep2.loop_m_value)));
}
