#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "hbubble/harness/commands.hpp"
#include "hbubble/harness/config.hpp"
#include "hbubble/harness/json_report.hpp"

using namespace hbubble;
using namespace hbubble::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("hbubble_unit_" + name);
    fs::remove_all(p);
    return p;
}

ExperimentConfig small_config(const std::string& name) {
    ExperimentConfig c;
    c.sphere = {16, 32};
    c.disk = {16, 16};
    c.family_n_theta = 16;
    c.output_dir = scratch(name).string();
    return c;
}

int count_lines(const fs::path& p) {
    std::ifstream is(p);
    std::string line;
    int n = 0;
    while (std::getline(is, line)) ++n;
    return n;
}

}  // namespace

TEST_CASE("config text") {
    const ExperimentConfig c = parse_config(
        "# comment\n"
        "field = radial:1 + exp(-r)\n"
        "alpha = 1.25\n"
        "resolution.disk = 32x48\n"
        "continuation.schedule = 1.2, 1.1\n"
        "solver.newton = off\n");
    CHECK(c.field == "radial:1 + exp(-r)");
    CHECK(c.alpha == 1.25);
    CHECK(c.disk.n1 == 32);
    CHECK(c.disk.n2 == 48);
    CHECK(c.schedule == std::vector<double>{1.2, 1.1});
    CHECK_FALSE(c.newton);
    CHECK_NOTHROW(validate(c));

    CHECK_THROWS_AS(parse_config("nonsense.key = 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("solver.newton = maybe\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("alpha = abc\n"), ConfigError);
    CHECK_THROWS_AS(validate(parse_config("alpha = 2.5\n")), ConfigError);
    CHECK_THROWS_AS(validate(parse_config("continuation.schedule = 1.1, 1.2\n")), ConfigError);
    CHECK_THROWS_AS(validate(parse_config("resolution.disk = 15x16\n")), ConfigError);
    CHECK_THROWS_AS(validate(parse_config("surface = checkpoint:/no/such/file.ckpt\n")), ConfigError);
    CHECK_THROWS_AS(load_config("/no/such/config.cfg"), ConfigError);
}

TEST_CASE("a preset line applies first wherever it appears") {
    const ExperimentConfig c = parse_config("alpha = 1.3\npreset = paper-constant-2\n");
    CHECK(c.field == "const:2");
    CHECK(c.alpha == 1.3);
    for (const auto& name : preset_names()) CHECK_NOTHROW(validate(preset(name)));
    CHECK_THROWS_AS(preset("no-such-preset"), ConfigError);
}

TEST_CASE("config hash ignores the output directory") {
    ExperimentConfig a = preset("reference");
    ExperimentConfig b = a;
    b.output_dir = "/somewhere/else";
    CHECK(a.hash() == b.hash());
    b.alpha = 1.5;
    CHECK(a.hash() != b.hash());
    CHECK(parse_config(a.echo()).hash() == a.hash());
}

TEST_CASE("resolution parsing") {
    CHECK(parse_resolution("64x128").n2 == 128);
    CHECK_THROWS_AS(parse_resolution("64"), ConfigError);
    CHECK_THROWS_AS(parse_resolution("0x8"), ConfigError);
    CHECK_THROWS_AS(parse_resolution("ax8"), ConfigError);
}

TEST_CASE("report formatting") {
    Json j;
    j["third"] = 1.0 / 3.0;
    j["bad"] = number(std::numeric_limits<double>::quiet_NaN());
    j["missing"] = number(std::optional<double>{});
    const std::string s = dump(j);
    CHECK(s.find("0.33333333333333331") != std::string::npos);
    CHECK(s.find("\"bad\": null") != std::string::npos);
    CHECK(s.find("\"missing\": null") != std::string::npos);
    CHECK(s.find('\r') == std::string::npos);
    CHECK(dump_line(j).find('\n') == dump_line(j).size() - 1);

    const Json e = to_json(EnergyBreakdown{});
    std::vector<std::string> keys;
    for (const auto& [k, v] : e.items()) keys.push_back(k);
    CHECK(keys == std::vector<std::string>{"D", "V_H", "E_H", "D_alpha", "E_alpha", "grad_sup",
                                           "defect_energy_identity", "defect_conformal", "residual_hsystem"});
}

TEST_CASE("evaluate reports energies and disk checks") {
    ExperimentConfig c = small_config("evaluate");
    const RunReport sphere = cmd_evaluate(c);
    CHECK(sphere.exit_code == kOk);
    CHECK(sphere.results().at("energy").at("D").get<double>() == doctest::Approx(4.0 * std::numbers::pi).epsilon(1e-3));
    for (const char* key : {"command", "config_hash", "config", "results", "artifacts", "metadata"})
        CHECK(sphere.json.contains(key));

    c.surface = "cone:0.3";
    c.alpha = 1.05;
    const RunReport cone = cmd_evaluate(c);
    CHECK(cone.results().at("checks").at("D_alpha_ge_D").get<bool>());
    CHECK(cone.results().at("checks").at("boundary_zero").get<bool>());

    c.surface = "pyramid:3";
    CHECK_THROWS(cmd_evaluate(c));
}

TEST_CASE("mp-level for the constant field 2") {
    ExperimentConfig c = small_config("mp");
    c.field = "const:2";
    c.family = "truncation:0.2";
    const RunReport r = cmd_mp_level(c);
    CHECK(r.exit_code == kOk);
    CHECK(r.results().at("bounds").at("upper_bound_4pi").get<double>() ==
          doctest::Approx(std::numbers::pi / 3.0).epsilon(1e-12));
    c.family = "";
    CHECK_THROWS_AS(cmd_mp_level(c), ConfigError);
}

TEST_CASE("solver commands") {
    ExperimentConfig c = small_config("solve");
    c.alpha = 1.1;
    c.seed = 3;
    c.perturbation = 1e-3;
    const RunReport a = cmd_solve_alpha(c);
    CHECK(a.exit_code == kOk);
    CHECK(fs::exists(fs::path(c.output_dir) / "state.ckpt"));
    CHECK(fs::exists(fs::path(c.output_dir) / "state.csv"));
    const RunReport b = cmd_solve_alpha(c);
    CHECK(dump(a.results()) == dump(b.results()));
    CHECK(a.json.at("config_hash") == b.json.at("config_hash"));

    c.max_iter = 1;
    c.newton = false;
    CHECK(cmd_solve_alpha(c).exit_code == kNotConverged);

    ExperimentConfig one = small_config("continue_one");
    one.schedule = {1.1};
    const RunReport r = cmd_continue(one);
    CHECK(r.exit_code == kOk);
    CHECK(r.results().at("states").size() == 1);
}

TEST_CASE("synthetic blow-up writes a trace") {
    ExperimentConfig c = small_config("blowup");
    c.synthetic = true;
    c.window_nodes = 33;
    const RunReport r = cmd_blowup(c);
    CHECK(r.exit_code == kOk);
    CHECK(count_lines(fs::path(c.output_dir) / "trace.jsonl") == 3);

    ExperimentConfig none = small_config("blowup_none");
    CHECK_THROWS(cmd_blowup(none));
}

TEST_CASE("export writes both formats") {
    ExperimentConfig c = small_config("export");
    const RunReport r = cmd_export(c);
    CHECK(r.exit_code == kOk);
    CHECK(fs::exists(fs::path(c.output_dir) / "surface.csv"));
    CHECK(fs::exists(fs::path(c.output_dir) / "surface.obj"));
    const std::string path = write_report(r, c.output_dir, "export");
    CHECK(fs::exists(path));
}

TEST_CASE("validate runs a chosen criterion") {
    AcceptanceOptions o;
    o.only = {11};
    o.determinism = false;
    const RunReport r = cmd_validate(o);
    CHECK(r.exit_code == kOk);
    CHECK(r.results().at("criteria").size() == 1);
}
