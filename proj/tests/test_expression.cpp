#include <doctest.h>

#include "oracles.hpp"
#include "rhmod/scattering.hpp"

using namespace rhmod;
using oracles::central_diff;

TEST_CASE("parser evaluates polynomials and literals") {
    auto sd = ScatteringData::parse_f0("z^3");
    CHECK(std::abs(sd.eval_f0(2.0) - cplx(8.0)) < 1e-15);

    auto zero = ScatteringData::parse_f0("0");
    CHECK(zero.eval_f0(cplx(3, 4)) == cplx(0.0));

    auto lit = ScatteringData::parse_f0("(0+2i) + 1.5i*z");
    CHECK(std::abs(lit.eval_f0(cplx(2, 0)) - cplx(0, 5)) < 1e-15);

    auto pw = ScatteringData::parse_f0("2^z");
    CHECK(std::abs(pw.eval_f0(3.0) - cplx(8.0)) < 1e-12);
}

TEST_CASE("parse errors carry positions") {
    CHECK_THROWS_AS(Expr::parse("z +* 2"), ParseError);
    CHECK_THROWS_AS(Expr::parse("foo(z)"), ParseError);
    CHECK_THROWS_AS(Expr::parse("(z"), ParseError);
    try {
        Expr::parse("z + qq");
    } catch (const ParseError& e) {
        CHECK(e.pos == 4);
    }
}

TEST_CASE("round trip: serialize and re-parse evaluates identically") {
    const char* exprs[] = {"z^3 - 2*z + (1+2i)", "exp(z)*log(z - (0+2i))/sqrt(z+4)",
                           "-z^2 + 3/(z^2 + 4)^2", oracles::kFixtureF0};
    for (const char* text : exprs) {
        Expr e = Expr::parse(text);
        Expr e2 = Expr::parse(e.to_string());
        for (cplx z : {cplx(0.3, 0.7), cplx(-1.2, 2.1), cplx(2.5, -0.4)}) {
            cplx a = e.eval(z), b = e2.eval(z);
            CHECK(std::abs(a - b) <= 1e-14 * (1 + std::abs(a)));
        }
    }
}

TEST_CASE("declared singularity is rejected at evaluation") {
    auto sd = ScatteringData::parse_f0("log(z - (0+2i))");
    Singularity s;
    s.kind = Singularity::Kind::Point;
    s.at = cplx(0, 2);
    sd.set_singularities({s});
    CHECK_THROWS_AS(sd.eval_f0(cplx(0, 2)), DomainError);
    CHECK_NOTHROW(sd.eval_f0(cplx(1, 1)));
}

TEST_CASE("f assembles f0 - xz - 2tz^2") {
    auto sd = ScatteringData::parse_f0("0");
    cplx z(1, 1);
    CHECK(std::abs(sd.eval_f(z, 2.0, 0.5) - cplx(-2, -4)) < 1e-14);
    auto cube = ScatteringData::parse_f0("z^3");
    CHECK(std::abs(cube.eval_f(1.0, 0, 0) - cplx(1.0)) < 1e-15);
    // reference arithmetic at a generic point
    cplx w(1, 0.5);
    cplx expect = w * w * w - w - 2.0 * w * w;
    CHECK(std::abs(cube.eval_f(w, 1, 1) - expect) < 1e-14);
}

TEST_CASE("linearity of f in x") {
    auto sd = oracles::fixture_scattering();
    cplx z(0.7, 1.3);
    cplx d = sd.eval_f(z, 1.5 + 0.25, 0.2) - sd.eval_f(z, 1.5, 0.2);
    CHECK(std::abs(d - (-0.25 * z)) < 1e-13);
}

TEST_CASE("symbolic derivative matches finite differences") {
    auto sd = oracles::fixture_scattering();
    // d/dz of the power rule case
    auto cube = ScatteringData::parse_f0("z^3");
    CHECK(std::abs(cube.eval_f_prime(2.0, 0, 0) - cplx(12.0)) < 1e-13);
    auto zero = ScatteringData::parse_f0("0");
    cplx z(0.4, 0.9);
    CHECK(std::abs(zero.eval_f_prime(z, 3, 1) - (-3.0 - 4.0 * z)) < 1e-14);

    unsigned long long state = 12345;
    auto next = [&]() {
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        return static_cast<double>(state >> 11) / 9007199254740992.0;
    };
    int checked = 0;
    for (int k = 0; k < 200 && checked < 100; ++k) {
        cplx zr(4 * next() - 2, 4 * next() - 2);
        if (sd.distance_to_singularities(zr) < 0.2) continue;
        cplx fd = central_diff([&](double h) { return sd.eval_f(zr + h, 0.3, 0.1); }, 1e-6);
        cplx an = sd.eval_f_prime(zr, 0.3, 0.1);
        CHECK(std::abs(fd - an) <= 1e-7 * (1 + std::abs(an)));
        ++checked;
    }
    CHECK(checked >= 50);
}

TEST_CASE("schwarz symmetry sampling") {
    auto sd = oracles::fixture_scattering();
    CHECK(sd.schwarz_deviation(3.0) < 1e-12);
    auto asym = ScatteringData::parse_f0("(0+1i)*z^2");
    CHECK(asym.schwarz_deviation(2.0) > 1e-3);
}
