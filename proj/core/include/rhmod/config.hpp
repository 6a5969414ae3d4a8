#pragma once

#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "rhmod/evolution.hpp"

namespace rhmod {

struct GridSpec {
    double re_min = -1, re_max = 1;
    int re_n = 10;
    double im_min = -1, im_max = 1;
    int im_n = 10;
};

struct OutputSpec {
    std::string format = "json";   // "json" or "csv" where applicable
    std::string path;              // empty: stdout
};

struct RunConfig {
    std::string f0_text = "0";
    std::vector<Singularity> singularities;
    bool schwarz_symmetric = true;
    int genus_param = 0;
    std::vector<cplx> initial_alphas;
    double x = 0, t = 0;
    std::optional<SweepSpec> sweep;
    double margin = -1;   // <= 0: auto (0.15 * min pairwise distance)
    std::optional<std::vector<std::vector<cplx>>> custom_main, custom_comp;
    QuadratureOptions quad;
    double newton_tol = 1e-10;
    int newton_max_iter = 25;
    double residual_offset = 0.0;
    std::optional<GridSpec> grid;
    OutputSpec output;
};

RunConfig load_config_file(const std::string& path);
RunConfig parse_config(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& cfg);

ScatteringData make_scattering(const RunConfig& cfg);
BranchpointSet make_branchpoints(const RunConfig& cfg);
GeometryOptions make_geometry_options(const RunConfig& cfg);
RhpOptions make_rhp_options(const RunConfig& cfg);
NewtonOptions make_newton_options(const RunConfig& cfg);

// deterministic 17-significant-digit formatting used by every data file
std::string fmt17(double v);

nlohmann::json newton_report_json(const NewtonReport& rep, const RunConfig& cfg);
std::string trajectory_csv(const Trajectory& traj);
nlohmann::json trajectory_json(const Trajectory& traj, const RunConfig& cfg);

inline constexpr int kSchemaVersion = 1;

} // namespace rhmod
