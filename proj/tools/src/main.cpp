#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "hbubble/curvature_field.hpp"
#include "hbubble/expression.hpp"
#include "hbubble/harness/commands.hpp"
#include "hbubble/io.hpp"
#include "hbubble/surface_map.hpp"

using namespace hbubble;
using namespace hbubble::harness;

namespace {

struct CommonFlags {
    std::string config;
    std::string preset;
    std::string out;
    std::string field;
    std::string surface;
    std::string alpha;
    std::string resolution;
};

void add_common(CLI::App* sub, CommonFlags& f) {
    sub->add_option("--config", f.config, "config file with dotted keys");
    sub->add_option("--preset", f.preset, "start from a named preset");
    sub->add_option("--out", f.out, "output directory");
    sub->add_option("--field", f.field, "curvature field, e.g. const:1, radial:<expr>, expr:<expr>");
    sub->add_option("--surface", f.surface, "surface, e.g. sphere-bubble, cone:0.3, truncation:0.2");
    sub->add_option("--alpha", f.alpha, "regularization exponent in (1, 2)");
    sub->add_option("--resolution", f.resolution, "grid size <n>x<m> for the chart in use");
}

bool disk_surface(const std::string& spec) {
    return spec.rfind("cone:", 0) == 0 || spec.rfind("truncation:", 0) == 0 || spec.rfind("translated:", 0) == 0;
}

// Defaults, then preset, then config file, then flags.
ExperimentConfig resolve(const CommonFlags& f, bool solver_command) {
    ExperimentConfig cfg;
    if (!f.preset.empty()) cfg = preset(f.preset);
    if (!f.config.empty()) cfg = load_config(f.config, std::move(cfg));
    if (!f.field.empty()) cfg.field = f.field;
    if (!f.surface.empty()) {
        if (solver_command)
            cfg.init = f.surface;
        else
            cfg.surface = f.surface;
    }
    if (!f.alpha.empty()) apply(cfg, "alpha", f.alpha);
    if (!f.out.empty()) cfg.output_dir = f.out;
    if (!f.resolution.empty()) {
        const Resolution r = parse_resolution(f.resolution);
        const std::string& spec = solver_command ? cfg.init : cfg.surface;
        if (solver_command || disk_surface(spec))
            cfg.disk = r;
        else
            cfg.sphere = r;
    }
    validate(cfg);
    return cfg;
}

int emit(const RunReport& report, const std::string& dir, const std::string& name, bool quiet) {
    const std::string path = write_report(report, dir, name);
    if (!quiet) std::cout << dump(report.results());
    std::cerr << "report written to " << path << "\n";
    return report.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical laboratory for prescribed mean curvature bubbles"};
    app.require_subcommand(1);
    bool quiet = false;
    app.add_flag("-q,--quiet", quiet, "do not print results to stdout");

    CommonFlags flags;
    auto* evaluate = app.add_subcommand("evaluate", "energies and defects of a surface");
    auto* mp_level = app.add_subcommand("mp-level", "mountain-pass level estimate over a candidate family");
    auto* solve = app.add_subcommand("solve-alpha", "critical point of the regularized functional");
    auto* cont = app.add_subcommand("continue", "continuation in alpha followed by blow-up analysis");
    auto* blowup = app.add_subcommand("blowup", "blow-up analysis of checkpoints or the synthetic family");
    auto* validate_cmd = app.add_subcommand("validate", "run the acceptance suite");
    auto* export_cmd = app.add_subcommand("export", "write a surface as CSV and OBJ");
    for (auto* sub : {evaluate, mp_level, solve, cont, blowup, export_cmd}) add_common(sub, flags);

    std::string family;
    mp_level->add_option("--family", family, "candidate list, e.g. default or truncation:0.2,cone:0.5");
    bool synthetic = false;
    blowup->add_flag("--synthetic", synthetic, "analyse the dilated-bubble family");

    AcceptanceOptions acc;
    std::string validate_out = "out";
    bool no_determinism = false;
    validate_cmd->add_option("--out", validate_out, "output directory");
    validate_cmd->add_option("--coarsen", acc.coarsen, "divide all resolutions (negative control)")
        ->check(CLI::PositiveNumber);
    validate_cmd->add_option("--only", acc.only, "criterion ids to run, e.g. 3,8")->delimiter(',');
    validate_cmd->add_flag("--no-determinism", no_determinism, "skip the rerun of criterion 12");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    auto progress = [](const std::string& line) { std::cerr << line << "\n"; };
    try {
        if (validate_cmd->parsed()) {
            acc.determinism = !no_determinism;
            const RunReport r = cmd_validate(acc, progress);
            write_report(r, validate_out, "validate");
            for (const auto& c : r.results().at("criteria"))
                std::cout << (c.at("passed").get<bool>() ? "[PASS] " : "[FAIL] ") << c.at("id").get<int>() << " "
                          << c.at("title").get<std::string>() << "\n";
            return r.exit_code;
        }
        const bool solver_command = solve->parsed() || cont->parsed();
        ExperimentConfig cfg = resolve(flags, solver_command);
        if (mp_level->parsed()) {
            if (!family.empty()) cfg.family = family;
            return emit(cmd_mp_level(cfg), cfg.output_dir, "mp-level", quiet);
        }
        if (evaluate->parsed()) return emit(cmd_evaluate(cfg), cfg.output_dir, "evaluate", quiet);
        if (solve->parsed()) return emit(cmd_solve_alpha(cfg, progress), cfg.output_dir, "solve-alpha", quiet);
        if (cont->parsed()) return emit(cmd_continue(cfg, progress), cfg.output_dir, "continue", quiet);
        if (blowup->parsed()) {
            if (synthetic) cfg.synthetic = true;
            return emit(cmd_blowup(cfg), cfg.output_dir, "blowup", quiet);
        }
        if (export_cmd->parsed()) return emit(cmd_export(cfg), cfg.output_dir, "export", quiet);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const FieldError& e) {
        std::cerr << "field error: " << e.what() << "\n";
        return kConfigError;
    } catch (const expr::ParseError& e) {
        std::cerr << "expression error: " << e.what() << "\n";
        return kConfigError;
    } catch (const GeometryError& e) {
        std::cerr << "surface error: " << e.what() << "\n";
        return kConfigError;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return kConfigError;
    }
    return kOk;
}
