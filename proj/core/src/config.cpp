#include "rhmod/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace rhmod {

using nlohmann::json;

namespace {

cplx parse_cplx(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw DomainError(where + ": expected [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

json cplx_json(cplx z) { return json::array({z.real(), z.imag()}); }

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw DomainError(std::string("config key '") + key + "': wrong type");
    }
}

} // namespace

RunConfig parse_config(const json& j) {
    RunConfig cfg;
    if (!j.is_object()) throw DomainError("config root must be an object");

    cfg.f0_text = get_or<std::string>(j, "f0", "0");
    cfg.schwarz_symmetric = get_or<bool>(j, "schwarz_symmetric", true);
    cfg.genus_param = get_or<int>(j, "genus_param", -1);
    if (cfg.genus_param < 0) throw DomainError("config: genus_param (N >= 0) is required");

    if (!j.contains("initial_alphas") || !j.at("initial_alphas").is_array())
        throw DomainError("config: initial_alphas (array of [re,im]) is required");
    int idx = 0;
    for (const auto& a : j.at("initial_alphas"))
        cfg.initial_alphas.push_back(parse_cplx(a, "initial_alphas[" + std::to_string(idx++) + "]"));
    if (static_cast<int>(cfg.initial_alphas.size()) != 2 * cfg.genus_param + 1)
        throw DomainError("config: initial_alphas must list 2N+1 upper-half-plane points");

    if (j.contains("singularities")) {
        int si = 0;
        for (const auto& s : j.at("singularities")) {
            std::string where = "singularities[" + std::to_string(si++) + "]";
            Singularity sing;
            if (s.is_array()) {
                sing.kind = Singularity::Kind::Point;
                sing.at = parse_cplx(s, where);
            } else if (s.is_object() && s.contains("point")) {
                sing.kind = Singularity::Kind::Point;
                sing.at = parse_cplx(s.at("point"), where + ".point");
            } else if (s.is_object() && s.contains("ray")) {
                sing.kind = Singularity::Kind::Ray;
                sing.at = parse_cplx(s.at("ray").at("origin"), where + ".ray.origin");
                sing.dir = parse_cplx(s.at("ray").at("dir"), where + ".ray.dir");
                double n = std::abs(sing.dir);
                if (n == 0) throw DomainError(where + ": ray direction must be nonzero");
                sing.dir /= n;
            } else {
                throw DomainError(where + ": expected [re,im], {point:...} or {ray:{origin,dir}}");
            }
            cfg.singularities.push_back(sing);
        }
    }

    cfg.x = get_or<double>(j, "x", 0.0);
    cfg.t = get_or<double>(j, "t", 0.0);

    if (j.contains("sweep")) {
        const auto& s = j.at("sweep");
        SweepSpec sw;
        std::string axis = get_or<std::string>(s, "axis", "x");
        if (axis != "x" && axis != "t") throw DomainError("config: sweep.axis must be \"x\" or \"t\"");
        sw.axis = axis[0];
        if (!s.contains("from") || !s.contains("to"))
            throw DomainError("config: sweep requires from/to");
        sw.from = s.at("from").get<double>();
        sw.to = s.at("to").get<double>();
        sw.step = get_or<double>(s, "step", 1e-2);
        if (!(sw.step > 0)) throw DomainError("config: sweep.step must be positive");
        cfg.sweep = sw;
    }

    if (j.contains("geometry")) {
        const auto& g = j.at("geometry");
        if (g.contains("margin") && g.at("margin").is_number())
            cfg.margin = g.at("margin").get<double>();
        if (g.contains("custom_arcs")) {
            const auto& ca = g.at("custom_arcs");
            auto read_polys = [&](const char* key) -> std::optional<std::vector<std::vector<cplx>>> {
                if (!ca.contains(key)) return std::nullopt;
                std::vector<std::vector<cplx>> polys;
                for (const auto& poly : ca.at(key)) {
                    std::vector<cplx> pts;
                    for (const auto& p : poly) pts.push_back(parse_cplx(p, std::string("custom_arcs.") + key));
                    polys.push_back(std::move(pts));
                }
                return polys;
            };
            cfg.custom_main = read_polys("main");
            cfg.custom_comp = read_polys("comp");
        }
    }

    if (j.contains("quad")) {
        cfg.quad.tol = get_or<double>(j.at("quad"), "tol", cfg.quad.tol);
        cfg.quad.max_evals = get_or<long>(j.at("quad"), "max_evals", cfg.quad.max_evals);
    }
    if (j.contains("newton")) {
        cfg.newton_tol = get_or<double>(j.at("newton"), "tol", cfg.newton_tol);
        cfg.newton_max_iter = get_or<int>(j.at("newton"), "max_iter", cfg.newton_max_iter);
        cfg.residual_offset = get_or<double>(j.at("newton"), "residual_offset", 0.0);
    }
    if (j.contains("sample_grid")) {
        const auto& g = j.at("sample_grid");
        GridSpec gs;
        auto axis = [&](const char* key, double& lo, double& hi, int& n) {
            if (!g.contains(key) || !g.at(key).is_array() || g.at(key).size() != 3)
                throw DomainError(std::string("config: sample_grid.") + key + " must be [min, max, n]");
            lo = g.at(key)[0].get<double>();
            hi = g.at(key)[1].get<double>();
            n = g.at(key)[2].get<int>();
            if (n < 1) throw DomainError("config: sample_grid counts must be >= 1");
        };
        axis("re", gs.re_min, gs.re_max, gs.re_n);
        axis("im", gs.im_min, gs.im_max, gs.im_n);
        cfg.grid = gs;
    }
    if (j.contains("output")) {
        cfg.output.format = get_or<std::string>(j.at("output"), "format", "json");
        cfg.output.path = get_or<std::string>(j.at("output"), "path", "");
        if (cfg.output.format != "json" && cfg.output.format != "csv")
            throw DomainError("config: output.format must be json or csv");
    }
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open config file: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw DomainError(std::string("config parse error: ") + e.what());
    }
    return parse_config(j);
}

json config_to_json(const RunConfig& cfg) {
    json j;
    j["f0"] = cfg.f0_text;
    j["schwarz_symmetric"] = cfg.schwarz_symmetric;
    j["genus_param"] = cfg.genus_param;
    j["initial_alphas"] = json::array();
    for (cplx a : cfg.initial_alphas) j["initial_alphas"].push_back(cplx_json(a));
    j["singularities"] = json::array();
    for (const auto& s : cfg.singularities) {
        if (s.kind == Singularity::Kind::Point)
            j["singularities"].push_back(json{{"point", cplx_json(s.at)}});
        else
            j["singularities"].push_back(json{{"ray", {{"origin", cplx_json(s.at)}, {"dir", cplx_json(s.dir)}}}});
    }
    j["x"] = cfg.x;
    j["t"] = cfg.t;
    if (cfg.sweep) {
        j["sweep"] = {{"axis", std::string(1, cfg.sweep->axis)},
                      {"from", cfg.sweep->from},
                      {"to", cfg.sweep->to},
                      {"step", cfg.sweep->step}};
    }
    j["geometry"]["margin"] = cfg.margin > 0 ? json(cfg.margin) : json("auto");
    j["quad"] = {{"tol", cfg.quad.tol}, {"max_evals", cfg.quad.max_evals}};
    j["newton"] = {{"tol", cfg.newton_tol}, {"max_iter", cfg.newton_max_iter}};
    if (cfg.grid) {
        j["sample_grid"] = {{"re", {cfg.grid->re_min, cfg.grid->re_max, cfg.grid->re_n}},
                            {"im", {cfg.grid->im_min, cfg.grid->im_max, cfg.grid->im_n}}};
    }
    j["output"] = {{"format", cfg.output.format}, {"path", cfg.output.path}};
    return j;
}

ScatteringData make_scattering(const RunConfig& cfg) {
    ScatteringData sd = ScatteringData::parse_f0(cfg.f0_text);
    sd.set_singularities(cfg.singularities);
    sd.set_schwarz(cfg.schwarz_symmetric);
    return sd;
}

BranchpointSet make_branchpoints(const RunConfig& cfg) {
    return BranchpointSet(cfg.genus_param, cfg.initial_alphas);
}

GeometryOptions make_geometry_options(const RunConfig& cfg) {
    GeometryOptions g;
    g.margin = cfg.margin;
    g.custom_main = cfg.custom_main;
    g.custom_comp = cfg.custom_comp;
    return g;
}

RhpOptions make_rhp_options(const RunConfig& cfg) {
    RhpOptions o;
    o.quad = cfg.quad;
    o.geometry = make_geometry_options(cfg);
    o.residual_offset = cfg.residual_offset;
    return o;
}

NewtonOptions make_newton_options(const RunConfig& cfg) {
    NewtonOptions o;
    o.tol = cfg.newton_tol;
    o.max_iter = cfg.newton_max_iter;
    o.rhp = make_rhp_options(cfg);
    return o;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json newton_report_json(const NewtonReport& rep, const RunConfig& cfg) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["converged"] = rep.converged;
    j["iterations"] = rep.iterations;
    j["stop_reason"] = rep.stop_reason;
    j["residual_history"] = rep.residual_history;
    j["final_alphas"] = json::array();
    for (cplx a : rep.final_alphas.upper) j["final_alphas"].push_back(cplx_json(a));
    j["residuals"] = json::array();
    for (cplx r : rep.residuals) j["residuals"].push_back(cplx_json(r));
    j["c_values"] = json::array();
    for (cplx c : rep.c_values) j["c_values"].push_back(cplx_json(c));
    j["D"] = cplx_json(rep.D);
    j["moment_cond"] = rep.moment_cond;
    j["config"] = config_to_json(cfg);
    return j;
}

std::string trajectory_csv(const Trajectory& traj) {
    std::ostringstream os;
    if (traj.points.empty()) return "";
    const auto& first = traj.points.front();
    const int nup = static_cast<int>(first.bps.upper.size());
    const int N = first.bps.N;
    os << "x,t";
    for (int j = 0; j < nup; ++j) os << ",re_alpha" << 2 * j << ",im_alpha" << 2 * j;
    for (int i = 1; i <= N; ++i) os << ",W" << i;
    for (int i = 1; i <= N; ++i) os << ",Omega" << i;
    os << ",residual,absD\n";
    for (const auto& p : traj.points) {
        os << fmt17(p.x) << "," << fmt17(p.t);
        for (cplx a : p.bps.upper) os << "," << fmt17(a.real()) << "," << fmt17(a.imag());
        for (cplx w : p.W) os << "," << fmt17(w.real());
        for (cplx o : p.Omega) os << "," << fmt17(o.real());
        os << "," << fmt17(p.residual) << "," << fmt17(p.absD) << "\n";
    }
    if (traj.truncated) os << "# truncated: " << traj.stop_reason << "\n";
    return os.str();
}

json trajectory_json(const Trajectory& traj, const RunConfig& cfg) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["truncated"] = traj.truncated;
    j["stop_reason"] = traj.stop_reason;
    j["points"] = json::array();
    for (const auto& p : traj.points) {
        json pt;
        pt["x"] = p.x;
        pt["t"] = p.t;
        pt["alphas"] = json::array();
        for (cplx a : p.bps.upper) pt["alphas"].push_back(cplx_json(a));
        pt["W"] = json::array();
        for (cplx w : p.W) pt["W"].push_back(cplx_json(w));
        pt["Omega"] = json::array();
        for (cplx o : p.Omega) pt["Omega"].push_back(cplx_json(o));
        pt["residual"] = p.residual;
        pt["absD"] = p.absD;
        pt["min_abs_c"] = p.min_abs_c;
        j["points"].push_back(std::move(pt));
    }
    j["config"] = config_to_json(cfg);
    return j;
}

} // namespace rhmod
