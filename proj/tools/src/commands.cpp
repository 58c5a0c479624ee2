#include "hbubble/harness/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hbubble/alpha_solver.hpp"
#include "hbubble/blowup.hpp"
#include "hbubble/functionals.hpp"
#include "hbubble/io.hpp"
#include "hbubble/mountain_pass.hpp"
#include "hbubble/util.hpp"

#ifndef HBUBBLE_VERSION
#define HBUBBLE_VERSION "unknown"
#endif

namespace hbubble::harness {

namespace fs = std::filesystem;

namespace {

class Clock {
public:
    void stage(const std::string& name) {
        close();
        name_ = name;
        t0_ = std::chrono::steady_clock::now();
    }
    Json finish() {
        close();
        return times_;
    }

private:
    void close() {
        if (name_.empty()) return;
        times_[name_] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
        name_.clear();
    }
    std::string name_;
    std::chrono::steady_clock::time_point t0_;
    Json times_ = Json::object();
};

Json config_json(const ExperimentConfig& cfg) {
    Json j = Json::object();
    for (const auto& kv : parse_key_values(cfg.echo())) j[kv.key] = kv.value;
    return j;
}

RunReport start(const std::string& command, const ExperimentConfig& cfg) {
    RunReport r;
    r.json = Json{{"command", command},
                  {"config_hash", hex64(cfg.hash())},
                  {"config", config_json(cfg)},
                  {"results", Json::object()},
                  {"artifacts", Json::array()},
                  {"metadata", Json::object()}};
    return r;
}

void finish(RunReport& r, Clock& clock) {
    r.json["metadata"] = Json{{"version", HBUBBLE_VERSION}, {"wall_clock_s", clock.finish()}};
}

double curvature_scale(const CurvatureField& f) {
    if (auto h = f.h_inf(); h && *h != 0.0) return *h;
    if (auto c = f.constant_value(); c && *c != 0.0) return *c;
    const double h0 = f.value(Vec3{});
    if (h0 == 0.0) throw ConfigError("field vanishes at the origin and has no H_inf; give sphere-bubble:<h0>");
    return h0;
}

double spec_value(const std::string& spec, std::size_t colon) {
    try {
        return parse_double(spec.substr(colon + 1), 0);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("surface '" + spec + "': " + e.what());
    }
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
}

std::string artifact(RunReport& r, const ExperimentConfig& cfg, const std::string& name) {
    ensure_dir(cfg.output_dir);
    const std::string path = (fs::path(cfg.output_dir) / name).string();
    r.json["artifacts"].push_back(name);
    return path;
}

SolverOptions solver_options(const ExperimentConfig& cfg) {
    SolverOptions o;
    o.tol = cfg.tol;
    o.max_iter = cfg.max_iter;
    o.newton = cfg.newton;
    o.seed = cfg.seed;
    o.perturbation = cfg.perturbation;
    return o;
}

Json state_report(const AlphaSolveState& s, const CurvatureField& f) {
    Json j = to_json(s);
    if (s.converged) {
        j["h1_bounds"] = to_json(verify_h1_bounds(s, f));
        if (f.h_inf() && f.r0()) j["linfty"] = to_json(verify_linfty_bound(s, f));
    }
    return j;
}

void blowup_stage(RunReport& r, const ExperimentConfig& cfg, const CurvatureField& f,
                  const std::vector<AlphaSolveState>& states, const std::vector<std::string>& checkpoints) {
    BlowUpTrace trace = build_trace(states, f, cfg.window_radius, cfg.window_nodes);
    for (std::size_t i = 0; i < trace.records.size() && i < checkpoints.size(); ++i)
        trace.records[i].checkpoint = checkpoints[i];
    Json& res = r.json["results"];
    res["blowup"] = summary(trace);
    if (trace.lambda) {
        res["limit"] = to_json(limit_diagnostics(trace.records.back().window.v, f, trace.lambda->estimate));
        res["semicontinuity"] = to_json(semicontinuity_check(trace, f));
    }
    std::ofstream os(artifact(r, cfg, "trace.jsonl"), std::ios::binary);
    for (const auto& rec : trace.records) os << dump_line(to_json(rec));
    if (!os) throw IoError("cannot write trace");
}

}  // namespace

SurfaceMap build_surface(const std::string& spec, const CurvatureField& f, const ExperimentConfig& cfg) {
    const std::size_t colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    auto bubble = [&](double h0) { return make_sphere_bubble(h0, cfg.sphere.n1, cfg.sphere.n2); };
    if (kind == "sphere-bubble")
        return bubble(colon == std::string::npos ? curvature_scale(f) : spec_value(spec, colon));
    if (colon == std::string::npos) throw ConfigError("surface '" + spec + "' needs a parameter");
    if (kind == "checkpoint") return read_checkpoint(spec.substr(colon + 1)).map;
    const double v = spec_value(spec, colon);
    if (kind == "cone") return make_cone_map(v, cfg.disk.n1, cfg.disk.n2);
    if (kind == "truncation") return truncate_bubble(bubble(curvature_scale(f)), v, cfg.disk.n2);
    if (kind == "translated") {
        const double h0 = curvature_scale(f);
        return truncate_bubble(translate_sphere(bubble(h0), v), 0.2, cfg.disk.n2);
    }
    throw ConfigError("unknown surface '" + spec + "'");
}

RunReport cmd_evaluate(const ExperimentConfig& cfg) {
    RunReport r = start("evaluate", cfg);
    Clock clock;
    clock.stage("build");
    const CurvatureField f = parse_field_spec(cfg.field);
    const SurfaceMap u = build_surface(cfg.surface, f, cfg);
    clock.stage("evaluate");
    const EnergyBreakdown e = cfg.alpha ? alpha_energy(u, f, *cfg.alpha) : energy(u, f);
    Json& res = r.json["results"];
    res["field"] = f.describe();
    res["surface"] = cfg.surface;
    res["grid"] = Json{{"chart", to_string(u.grid->kind())}, {"dims", u.grid->dims()}};
    res["energy"] = to_json(e);
    if (e.D_alpha) res["checks"]["D_alpha_ge_D"] = *e.D_alpha >= e.D;
    if (u.grid->kind() == ChartKind::Disk) {
        double boundary = 0.0;
        for (std::size_t k = 0; k < u.size(); ++k)
            if (u.grid->node(k).fixed) boundary = std::max(boundary, std::sqrt(norm2(u.values[k])));
        res["checks"]["boundary_max"] = boundary;
        res["checks"]["boundary_zero"] = boundary == 0.0;
    }
    res["isoperimetric_ratio"] = number(isoperimetric_ratio(u, f));
    finish(r, clock);
    return r;
}

RunReport cmd_mp_level(const ExperimentConfig& cfg) {
    RunReport r = start("mp-level", cfg);
    Clock clock;
    clock.stage("family");
    const CurvatureField f = parse_field_spec(cfg.field);
    FamilyOptions fo;
    fo.n_theta = cfg.family_n_theta;
    const auto family = parse_family(cfg.family, f, fo);
    if (family.empty()) throw ConfigError("the candidate family is empty");
    clock.stage("estimate");
    const MountainPassEstimate est = estimate_cH(f, family, cfg.alpha);
    Json& res = r.json["results"];
    res["estimate"] = to_json(est);
    res["bounds"] = to_json(bounds_report(f, est));
    if (!cfg.mp_lambdas.empty()) {
        clock.stage("lambda_sweep");
        res["lambda_sweep"] = to_json(lambda_monotonicity_check(f, family, cfg.mp_lambdas));
    }
    if (!cfg.mp_truncation_radii.empty()) {
        clock.stage("truncation");
        res["truncation"] = to_json(truncation_semicontinuity_check(f, family, cfg.mp_truncation_radii));
    }
    finish(r, clock);
    return r;
}

RunReport cmd_solve_alpha(const ExperimentConfig& cfg, const Progress& progress) {
    RunReport r = start("solve-alpha", cfg);
    Clock clock;
    clock.stage("build");
    const CurvatureField f = parse_field_spec(cfg.field);
    const SurfaceMap init = build_surface(cfg.init, f, cfg);
    const double alpha = cfg.alpha.value_or(cfg.schedule.front());
    clock.stage("solve");
    SolverOptions so = solver_options(cfg);
    if (progress)
        so.trace = [&](const IterationRecord& rec) {
            if (rec.iteration % 50 == 0 || std::string(rec.phase) == "newton")
                progress("iter " + std::to_string(rec.iteration) + " " + rec.phase + " E " + format_short(rec.energy) +
                         " |g| " + format_short(rec.grad_norm));
        };
    const AlphaSolveState s = solve_alpha(f, alpha, init, so);
    Json& res = r.json["results"];
    res["field"] = f.describe();
    res["state"] = state_report(s, f);
    if (s.converged) {
        res["local_minimum"] = to_json(local_minimum_check(s.u, f, alpha));
        write_checkpoint(artifact(r, cfg, "state.ckpt"), s.u, alpha, f.hash());
        write_csv(artifact(r, cfg, "state.csv"), s.u);
    }
    r.exit_code = s.converged ? kOk : kNotConverged;
    finish(r, clock);
    return r;
}

RunReport cmd_continue(const ExperimentConfig& cfg, const Progress& progress) {
    RunReport r = start("continue", cfg);
    Clock clock;
    clock.stage("build");
    const CurvatureField f = parse_field_spec(cfg.field);
    const SurfaceMap init = build_surface(cfg.init, f, cfg);
    clock.stage("continuation");
    SolverOptions so = solver_options(cfg);
    std::vector<AlphaSolveState> states;
    SurfaceMap current = init;
    // The chain is run here rather than through continuation() so progress
    // can be reported per exponent; the sequence of solves is the same.
    for (double alpha : cfg.schedule) {
        AlphaSolveState s = solve_alpha(f, alpha, current, so);
        if (progress)
            progress("alpha " + format_short(alpha) + ": " + to_string(s.status) + " after " +
                     std::to_string(s.iterations) + " iterations, E " + format_short(s.energy));
        const bool ok = s.converged;
        if (ok) current = s.u;
        states.push_back(std::move(s));
        if (!ok) break;
    }
    Json& res = r.json["results"];
    res["field"] = f.describe();
    res["states"] = Json::array();
    for (const auto& s : states) res["states"].push_back(state_report(s, f));

    std::vector<AlphaSolveState> good;
    std::vector<std::string> checkpoints;
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (!states[i].converged) continue;
        good.push_back(states[i]);
        if (cfg.checkpoints) {
            const std::string name = "state_" + std::to_string(i) + ".ckpt";
            write_checkpoint(artifact(r, cfg, name), states[i].u, states[i].alpha, f.hash());
            checkpoints.push_back(name);
        }
    }
    if (good.size() >= 3) {
        clock.stage("blowup");
        blowup_stage(r, cfg, f, good, checkpoints);
    } else {
        res["blowup"] = nullptr;
        res["blowup_note"] = "fewer than three converged states; lambda not tracked";
    }
    r.exit_code = good.size() == states.size() ? kOk : kNotConverged;
    finish(r, clock);
    return r;
}

RunReport cmd_blowup(const ExperimentConfig& cfg) {
    RunReport r = start("blowup", cfg);
    Clock clock;
    clock.stage("load");
    const CurvatureField f = parse_field_spec(cfg.field);
    std::vector<AlphaSolveState> states;
    std::vector<std::string> refs;
    if (cfg.synthetic) {
        SyntheticFamilyOptions so;
        so.ks = cfg.synthetic_ks;
        so.h0 = curvature_scale(f);
        states = synthetic_family(f, so);
    } else if (!cfg.blowup_inputs.empty()) {
        for (const std::string& path : cfg.blowup_inputs) {
            const Checkpoint c = read_checkpoint(path);
            if (c.field_hash != f.hash()) throw ConfigError("checkpoint " + path + " was written for another field");
            AlphaSolveState s;
            s.alpha = c.alpha;
            s.u = c.map;
            s.energy = energy_value(s.u, f, s.alpha);
            s.converged = true;
            s.status = SolveStatus::Converged;
            states.push_back(std::move(s));
            refs.push_back(path);
        }
    } else {
        throw ConfigError("blowup needs blowup.synthetic = true or blowup.inputs");
    }
    if (states.size() < 3) throw ConfigError("blowup needs at least three states");
    clock.stage("blowup");
    r.json["results"]["field"] = f.describe();
    blowup_stage(r, cfg, f, states, refs);
    finish(r, clock);
    return r;
}

RunReport cmd_validate(const AcceptanceOptions& opts, const Progress& progress) {
    ExperimentConfig reference = preset("reference");
    RunReport r = start("validate", reference);
    Clock clock;
    clock.stage("criteria");
    std::vector<CriterionResult> results;
    AcceptanceOptions single = opts;
    single.determinism = false;
    for (int id = 1; id < kCriterionCount; ++id) {
        if (!opts.only.empty() && std::find(opts.only.begin(), opts.only.end(), id) == opts.only.end()) continue;
        results.push_back(run_criterion(id, single));
        if (progress) progress(format_line(results.back()));
    }
    const bool want12 =
        opts.determinism &&
        (opts.only.empty() || std::find(opts.only.begin(), opts.only.end(), kCriterionCount) != opts.only.end());
    if (want12) {
        clock.stage("determinism");
        results.push_back(results.empty() ? run_criterion(kCriterionCount, opts) : determinism_check(results, opts));
        if (progress) progress(format_line(results.back()));
    }
    Json table = Json::array();
    Json timings = Json::object();
    bool all = true;
    for (const auto& c : results) {
        Json values = Json::object();
        for (const auto& [k, v] : c.values) values[k] = v;
        table.push_back(Json{{"id", c.id}, {"title", c.title}, {"passed", c.passed}, {"values", std::move(values)}});
        timings[std::to_string(c.id)] = c.seconds;
        all = all && c.passed;
    }
    r.json["results"]["criteria"] = std::move(table);
    r.json["results"]["all_passed"] = all;
    r.json["results"]["coarsen"] = opts.coarsen;
    r.exit_code = all ? kOk : kAcceptanceFailed;
    finish(r, clock);
    r.json["metadata"]["criterion_seconds"] = std::move(timings);
    Json details = Json::object();
    for (const auto& c : results) details[std::to_string(c.id)] = c.detail;
    r.json["metadata"]["details"] = std::move(details);
    return r;
}

RunReport cmd_export(const ExperimentConfig& cfg) {
    RunReport r = start("export", cfg);
    Clock clock;
    clock.stage("export");
    const CurvatureField f = parse_field_spec(cfg.field);
    const SurfaceMap u = build_surface(cfg.surface, f, cfg);
    write_csv(artifact(r, cfg, "surface.csv"), u);
    write_obj(artifact(r, cfg, "surface.obj"), u);
    r.json["results"] = Json{{"surface", cfg.surface},
                             {"chart", to_string(u.grid->kind())},
                             {"dims", u.grid->dims()},
                             {"nodes", u.size()}};
    finish(r, clock);
    return r;
}

std::string write_report(const RunReport& report, const std::string& dir, const std::string& name) {
    ensure_dir(dir);
    const std::string path = (fs::path(dir) / (name + ".json")).string();
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot write " + path);
    os << dump(report.json);
    return path;
}

}  // namespace hbubble::harness
