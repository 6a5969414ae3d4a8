#include <doctest.h>

#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "rhmod/config.hpp"
#include "rhmod/verify.hpp"

using namespace rhmod;
using nlohmann::json;

namespace {
json fixture_json() {
    json j;
    j["f0"] = oracles::kFixtureF0;
    j["genus_param"] = 1;
    j["initial_alphas"] = {{0.0, 1.0}, {1.0, 0.8}, {2.0, 0.6}};
    j["x"] = oracles::kFixtureX;
    j["t"] = oracles::kFixtureT;
    j["geometry"] = {{"margin", 0.12}};
    j["singularities"] = json::array();
    for (const auto& s : oracles::fixture_singularities()) {
        if (s.kind == Singularity::Kind::Point)
            j["singularities"].push_back({{"point", {s.at.real(), s.at.imag()}}});
        else
            j["singularities"].push_back(
                {{"ray", {{"origin", {s.at.real(), s.at.imag()}}, {"dir", {s.dir.real(), s.dir.imag()}}}}});
    }
    return j;
}
} // namespace

TEST_CASE("config parses and echoes reproducibly") {
    RunConfig cfg = parse_config(fixture_json());
    CHECK(cfg.genus_param == 1);
    CHECK(cfg.initial_alphas.size() == 3);
    CHECK(cfg.margin == doctest::Approx(0.12));
    RunConfig cfg2 = parse_config(config_to_json(cfg));
    CHECK(cfg2.f0_text == cfg.f0_text);
    CHECK(cfg2.initial_alphas == cfg.initial_alphas);
    CHECK(cfg2.quad.tol == cfg.quad.tol);
    CHECK(cfg2.singularities.size() == cfg.singularities.size());
}

TEST_CASE("config rejects malformed input with specific messages") {
    json j = fixture_json();
    j.erase("initial_alphas");
    CHECK_THROWS_AS(parse_config(j), DomainError);

    json j2 = fixture_json();
    j2["initial_alphas"] = {{0.0, 1.0}};
    CHECK_THROWS_WITH_AS(parse_config(j2), doctest::Contains("2N+1"), DomainError);

    json j3 = fixture_json();
    j3["sweep"] = {{"axis", "y"}, {"from", 0.0}, {"to", 1.0}};
    CHECK_THROWS_AS(parse_config(j3), DomainError);

    // malformed expression surfaces with a position
    json j4 = fixture_json();
    j4["f0"] = "z^^3";
    RunConfig cfg = parse_config(j4);
    CHECK_THROWS_AS(make_scattering(cfg), ParseError);
}

TEST_CASE("fmt17 round-trips doubles exactly") {
    for (double v : {0.1, -3.14159265358979312, 1e-300, 8.575507117392851}) {
        double back = std::stod(fmt17(v));
        CHECK(back == v);
    }
}

TEST_CASE("report serializers carry the schema version and the config echo") {
    RunConfig cfg = parse_config(fixture_json());
    NewtonReport rep;
    rep.converged = true;
    rep.final_alphas = oracles::fixture_alphas();
    json j = newton_report_json(rep, cfg);
    CHECK(j["schema_version"] == kSchemaVersion);
    CHECK(j["config"]["f0"] == cfg.f0_text);
    RunConfig round = parse_config(j["config"]);
    CHECK(round.initial_alphas == cfg.initial_alphas);

    Trajectory traj;
    TrajectoryPoint pt;
    pt.x = 0.3;
    pt.t = 0.1;
    pt.bps = oracles::fixture_alphas();
    pt.W = {cplx(1.5, 0)};
    pt.Omega = {cplx(-0.25, 0)};
    traj.points.push_back(pt);
    std::string csv = trajectory_csv(traj);
    CHECK(csv.find("x,t,re_alpha0,im_alpha0,re_alpha2,im_alpha2,re_alpha4,im_alpha4,W1,Omega1,"
                   "residual,absD") == 0);
    CHECK(csv.find("0.29999999999999999") != std::string::npos);
}

TEST_CASE("verification battery passes on the converged fixture") {
    RunConfig cfg = parse_config(fixture_json());
    VerifyReport rep = run_verification(cfg, 2);
    for (const auto& c : rep.checks) {
        INFO(c.name, " value=", c.value, " threshold=", c.threshold, " detail=", c.detail);
        CHECK((c.passed || c.skipped));
    }
    CHECK(rep.all_passed);
}

TEST_CASE("verification skips degenerate checks for trivial data, exit-success") {
    json j = fixture_json();
    j["f0"] = "0";
    j["singularities"] = json::array();
    j["x"] = 0.0;
    j["t"] = 0.0;
    RunConfig cfg = parse_config(j);
    VerifyReport rep = run_verification(cfg, 1);
    CHECK(rep.all_passed);
    bool some_skipped = false;
    for (const auto& c : rep.checks) some_skipped |= c.skipped;
    CHECK(some_skipped);
}

TEST_CASE("verification flags a detuned configuration") {
    json j = fixture_json();
    j["initial_alphas"] = {{0.0, 1.02}, {1.0, 0.81}, {2.01, 0.6}};
    j["newton"] = {{"tol", 1e-10}, {"max_iter", 0}};   // forbid re-convergence
    RunConfig cfg = parse_config(j);
    VerifyReport rep = run_verification(cfg, 1);
    CHECK(!rep.all_passed);
}
