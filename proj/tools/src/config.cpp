#include "hbubble/harness/config.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "hbubble/util.hpp"

namespace hbubble::harness {

namespace {

std::string at_line(int line) { return line > 0 ? "line " + std::to_string(line) + ": " : std::string(); }

double to_double(const std::string& v, int line) {
    try {
        return parse_double(v, line);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

int to_int(const std::string& v, int line) {
    try {
        return static_cast<int>(parse_long(v, line));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

bool to_bool(const std::string& v, int line) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(at_line(line) + "'" + v + "' is not a boolean");
}

std::vector<double> to_list(const std::string& v, int line) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (trim(item).empty()) continue;
        out.push_back(to_double(item, line));
    }
    return out;
}

std::string list_text(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += format17(v[i]);
    }
    return s;
}

std::string res_text(const Resolution& r) { return std::to_string(r.n1) + "x" + std::to_string(r.n2); }

}  // namespace

Resolution parse_resolution(const std::string& text) {
    const std::size_t x = text.find('x');
    if (x == std::string::npos) throw ConfigError("resolution '" + text + "' is not of the form <n>x<m>");
    Resolution r;
    r.n1 = to_int(text.substr(0, x), 0);
    r.n2 = to_int(text.substr(x + 1), 0);
    if (r.n1 <= 0 || r.n2 <= 0) throw ConfigError("resolution '" + text + "' must be positive");
    return r;
}

void apply(ExperimentConfig& cfg, const std::string& key, const std::string& value, int line) {
    if (key == "preset") {
        ExperimentConfig p = preset(value);
        p.output_dir = cfg.output_dir;
        cfg = std::move(p);
    } else if (key == "field") {
        cfg.field = value;
    } else if (key == "surface") {
        cfg.surface = value;
    } else if (key == "alpha") {
        if (value.empty() || value == "none")
            cfg.alpha.reset();
        else
            cfg.alpha = to_double(value, line);
    } else if (key == "resolution.sphere") {
        cfg.sphere = parse_resolution(value);
    } else if (key == "resolution.disk") {
        cfg.disk = parse_resolution(value);
    } else if (key == "family") {
        cfg.family = value;
    } else if (key == "family.n_theta") {
        cfg.family_n_theta = to_int(value, line);
    } else if (key == "mp.lambdas") {
        cfg.mp_lambdas = to_list(value, line);
    } else if (key == "mp.truncation_radii") {
        cfg.mp_truncation_radii = to_list(value, line);
    } else if (key == "solver.init") {
        cfg.init = value;
    } else if (key == "solver.tol") {
        cfg.tol = to_double(value, line);
    } else if (key == "solver.max_iter") {
        cfg.max_iter = to_int(value, line);
    } else if (key == "solver.newton") {
        cfg.newton = to_bool(value, line);
    } else if (key == "solver.seed") {
        if (value.empty() || value == "none")
            cfg.seed.reset();
        else
            cfg.seed = static_cast<std::uint64_t>(to_int(value, line));
    } else if (key == "solver.perturbation") {
        cfg.perturbation = to_double(value, line);
    } else if (key == "continuation.schedule") {
        cfg.schedule = to_list(value, line);
    } else if (key == "blowup.window_radius") {
        cfg.window_radius = to_double(value, line);
    } else if (key == "blowup.window_nodes") {
        cfg.window_nodes = to_int(value, line);
    } else if (key == "blowup.synthetic") {
        cfg.synthetic = to_bool(value, line);
    } else if (key == "blowup.ks") {
        cfg.synthetic_ks = to_list(value, line);
    } else if (key == "blowup.inputs") {
        cfg.blowup_inputs.clear();
        std::stringstream ss(value);
        std::string item;
        while (std::getline(ss, item, ','))
            if (!trim(item).empty()) cfg.blowup_inputs.push_back(trim(item));
    } else if (key == "output.dir") {
        cfg.output_dir = value;
    } else if (key == "output.checkpoints") {
        cfg.checkpoints = to_bool(value, line);
    } else {
        throw ConfigError(at_line(line) + "unknown key '" + key + "'");
    }
}

ExperimentConfig parse_config(const std::string& text, ExperimentConfig cfg) {
    const auto entries = parse_key_values(text);
    // A preset line resets everything, so it is honoured first wherever it appears.
    for (const auto& kv : entries)
        if (kv.key == "preset") apply(cfg, kv.key, kv.value, kv.line);
    for (const auto& kv : entries)
        if (kv.key != "preset") apply(cfg, kv.key, kv.value, kv.line);
    return cfg;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read config file " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    try {
        return parse_config(ss.str(), std::move(base));
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

void validate(const ExperimentConfig& cfg) {
    if (cfg.alpha && !(*cfg.alpha > 1.0 && *cfg.alpha < 2.0)) throw ConfigError("alpha must lie in (1, 2)");
    if (cfg.sphere.n1 < 4 || cfg.sphere.n1 % 2 != 0 || cfg.sphere.n2 < 8)
        throw ConfigError("resolution.sphere needs an even latitude count >= 4 and >= 8 longitudes");
    if (cfg.disk.n1 < 4 || cfg.disk.n1 % 2 != 0 || cfg.disk.n2 < 8)
        throw ConfigError("resolution.disk needs an even ring count >= 4 and >= 8 angles");
    if (cfg.family_n_theta < 8) throw ConfigError("family.n_theta must be at least 8");
    for (double l : cfg.mp_lambdas)
        if (!(l > 0.0 && l <= 1.0)) throw ConfigError("mp.lambdas entries must lie in (0, 1]");
    for (double r : cfg.mp_truncation_radii)
        if (!(r > 0.0)) throw ConfigError("mp.truncation_radii entries must be positive");
    if (!(cfg.tol > 0.0)) throw ConfigError("solver.tol must be positive");
    if (cfg.max_iter < 1) throw ConfigError("solver.max_iter must be positive");
    if (cfg.schedule.empty()) throw ConfigError("continuation.schedule is empty");
    for (std::size_t i = 0; i < cfg.schedule.size(); ++i) {
        if (!(cfg.schedule[i] > 1.0 && cfg.schedule[i] < 2.0))
            throw ConfigError("continuation.schedule entries must lie in (1, 2)");
        if (i > 0 && !(cfg.schedule[i] < cfg.schedule[i - 1]))
            throw ConfigError("continuation.schedule must be strictly decreasing");
    }
    if (!(cfg.window_radius > 0.0)) throw ConfigError("blowup.window_radius must be positive");
    if (cfg.window_nodes < 5 || cfg.window_nodes % 2 == 0) throw ConfigError("blowup.window_nodes must be odd and >= 5");
    if (cfg.synthetic_ks.size() < 3) throw ConfigError("blowup.ks needs at least three factors");
    for (const std::string& path : cfg.blowup_inputs)
        if (!std::filesystem::exists(path)) throw ConfigError("referenced file " + path + " does not exist");
    for (const std::string& s : {cfg.field, cfg.surface, cfg.init}) {
        const std::size_t colon = s.find(':');
        if (colon == std::string::npos) continue;
        const std::string scheme = s.substr(0, colon);
        if (scheme == "file" || scheme == "checkpoint") {
            const std::string path = s.substr(colon + 1);
            if (!std::filesystem::exists(path)) throw ConfigError("referenced file " + path + " does not exist");
        }
    }
}

std::string ExperimentConfig::echo() const {
    std::ostringstream os;
    os << "preset = " << preset << '\n'
       << "field = " << field << '\n'
       << "surface = " << surface << '\n'
       << "alpha = " << (alpha ? format17(*alpha) : std::string("none")) << '\n'
       << "resolution.sphere = " << res_text(sphere) << '\n'
       << "resolution.disk = " << res_text(disk) << '\n'
       << "family = " << family << '\n'
       << "family.n_theta = " << family_n_theta << '\n'
       << "mp.lambdas = " << list_text(mp_lambdas) << '\n'
       << "mp.truncation_radii = " << list_text(mp_truncation_radii) << '\n'
       << "solver.init = " << init << '\n'
       << "solver.tol = " << format17(tol) << '\n'
       << "solver.max_iter = " << max_iter << '\n'
       << "solver.newton = " << (newton ? "true" : "false") << '\n'
       << "solver.seed = " << (seed ? std::to_string(*seed) : std::string("none")) << '\n'
       << "solver.perturbation = " << format17(perturbation) << '\n'
       << "continuation.schedule = " << list_text(schedule) << '\n'
       << "blowup.window_radius = " << format17(window_radius) << '\n'
       << "blowup.window_nodes = " << window_nodes << '\n'
       << "blowup.synthetic = " << (synthetic ? "true" : "false") << '\n'
       << "blowup.ks = " << list_text(synthetic_ks) << '\n'
       << "blowup.inputs = ";
    for (std::size_t i = 0; i < blowup_inputs.size(); ++i) os << (i ? "," : "") << blowup_inputs[i];
    os << '\n'
       << "output.checkpoints = " << (checkpoints ? "true" : "false") << '\n';
    return os.str();
}

// The output directory does not enter the hash: moving a run elsewhere does
// not change its numbers.
std::uint64_t ExperimentConfig::hash() const { return fnv1a64(echo()); }

ExperimentConfig preset(const std::string& name) {
    ExperimentConfig c;
    c.preset = name;
    if (name == "paper-constant-1") {
        c.field = "const:1";
        c.mp_lambdas = {0.25, 0.5, 0.75, 1.0};
    } else if (name == "paper-constant-2") {
        c.field = "const:2";
        c.surface = "sphere-bubble:2";
        c.init = "cone:0.5";
    } else if (name == "far-out-decay") {
        c.field = "radial:1 + exp(-r);h_inf=1";
        c.mp_truncation_radii = {5.0, 10.0};
    } else if (name == "synthetic-blowup") {
        c.field = "const:1";
        c.synthetic = true;
    } else if (name == "reference") {
        c.field = "const:1";
    } else {
        throw ConfigError("unknown preset '" + name + "'");
    }
    return c;
}

std::vector<std::string> preset_names() {
    return {"paper-constant-1", "paper-constant-2", "far-out-decay", "synthetic-blowup", "reference"};
}

}  // namespace hbubble::harness
