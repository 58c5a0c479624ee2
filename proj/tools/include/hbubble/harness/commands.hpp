#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hbubble/curvature_field.hpp"
#include "hbubble/harness/acceptance.hpp"
#include "hbubble/harness/config.hpp"
#include "hbubble/harness/json_report.hpp"
#include "hbubble/surface_map.hpp"

namespace hbubble::harness {

enum ExitCode : int { kOk = 0, kConfigError = 2, kNotConverged = 3, kAcceptanceFailed = 4 };

// A report is
//   { command, config_hash, config, results, artifacts, metadata }
// where everything except `metadata` (timings, version) is a pure function of
// the config.
struct RunReport {
    Json json;
    int exit_code = kOk;

    const Json& results() const { return json.at("results"); }
};

// Surface shorthand, see config.hpp. Curvature-dependent constructions use
// the field's H_inf, its constant value, or H(0), in that order.
SurfaceMap build_surface(const std::string& spec, const CurvatureField& f, const ExperimentConfig& cfg);

// Progress lines for long commands; the default writes nothing.
using Progress = std::function<void(const std::string&)>;

RunReport cmd_evaluate(const ExperimentConfig& cfg);
RunReport cmd_mp_level(const ExperimentConfig& cfg);
RunReport cmd_solve_alpha(const ExperimentConfig& cfg, const Progress& progress = {});
RunReport cmd_continue(const ExperimentConfig& cfg, const Progress& progress = {});
RunReport cmd_blowup(const ExperimentConfig& cfg);
RunReport cmd_validate(const AcceptanceOptions& opts, const Progress& progress = {});
RunReport cmd_export(const ExperimentConfig& cfg);

// Writes <dir>/<name>.json and returns the path.
std::string write_report(const RunReport& report, const std::string& dir, const std::string& name);

}  // namespace hbubble::harness
