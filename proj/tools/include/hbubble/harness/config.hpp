#pragma once

// Experiment configuration.
//
// A config file holds `key = value` lines with dotted keys; `#` starts a
// comment. Recognised keys (defaults in brackets):
//
//   preset                      start from a named preset before applying the rest
//   field                       const:<v> | radial:<expr> | expr:<expr> | file:<path>   [const:1]
//   surface                     sphere-bubble[:h0] | cone:<delta> | truncation:<delta>
//                               | translated:<r> | checkpoint:<path>                   [sphere-bubble]
//   alpha                       optional exponent in (1, 2) for evaluate / solve-alpha
//   resolution.sphere           <lat>x<lon>                                          [128x256]
//   resolution.disk             <rings>x<angles>                                     [64x64]
//   family                      candidate list for mp-level, or `default`            [default]
//   family.n_theta              angular nodes of the family members                  [64]
//   mp.lambdas                  comma list for the lambda sweep (empty: skip)
//   mp.truncation_radii         comma list for the truncation check (empty: skip)
//   solver.init                 initial surface for solve-alpha / continue           [cone:0.5]
//   solver.tol                  [1e-8]     solver.max_iter  [20000]   solver.newton [true]
//   solver.seed                 optional perturbation seed   solver.perturbation [0]
//   continuation.schedule       comma list, strictly decreasing in (1, 2)            [1.1,...,1.00625]
//   blowup.window_radius        [8]        blowup.window_nodes [129]
//   blowup.synthetic            use the dilated-bubble family instead of solving     [false]
//   blowup.ks                   dilation factors of the synthetic family             [4,8,16]
//   blowup.inputs               comma list of checkpoint files for the blowup command
//   output.dir                  directory for reports and artifacts                  [out]
//   output.checkpoints          write one checkpoint per continuation state          [true]

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hbubble::harness {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Resolution {
    int n1 = 0;
    int n2 = 0;
};

Resolution parse_resolution(const std::string& text);

struct ExperimentConfig {
    std::string preset;
    std::string field = "const:1";
    std::string surface = "sphere-bubble";
    std::optional<double> alpha;
    Resolution sphere{128, 256};
    Resolution disk{64, 64};

    std::string family = "default";
    int family_n_theta = 64;
    std::vector<double> mp_lambdas;
    std::vector<double> mp_truncation_radii;

    std::string init = "cone:0.5";
    double tol = 1e-8;
    int max_iter = 20000;
    bool newton = true;
    std::optional<std::uint64_t> seed;
    double perturbation = 0.0;

    std::vector<double> schedule{1.1, 1.05, 1.025, 1.0125, 1.00625};

    double window_radius = 8.0;
    int window_nodes = 129;
    bool synthetic = false;
    std::vector<double> synthetic_ks{4.0, 8.0, 16.0};
    std::vector<std::string> blowup_inputs;

    std::string output_dir = "out";
    bool checkpoints = true;

    // Canonical `key = value` text of every setting, in a fixed order.
    std::string echo() const;
    std::uint64_t hash() const;
};

// Applies one setting; `line` only feeds error messages.
void apply(ExperimentConfig& cfg, const std::string& key, const std::string& value, int line = 0);

// Settings are applied on top of `base`; a `preset` line replaces it first.
ExperimentConfig parse_config(const std::string& text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});

// Throws ConfigError when a setting violates its module's requirements.
void validate(const ExperimentConfig& cfg);

ExperimentConfig preset(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace hbubble::harness
