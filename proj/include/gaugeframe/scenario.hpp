#pragma once

#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "gaugeframe/errors.hpp"
#include "gaugeframe/models/energy_constrained.hpp"
#include "gaugeframe/models/kepler.hpp"
#include "gaugeframe/models/lattice_pft.hpp"
#include "gaugeframe/models/linear_toy.hpp"
#include "gaugeframe/models/model_system.hpp"
#include "gaugeframe/models/relativistic_particle.hpp"

namespace gaugeframe {

using Json = nlohmann::json;

// Clock specification as it appears in a scenario file.
struct ClockSpec {
    std::string kind = "linear";       // linear | polynomial
    double offset = 0.0;               // linear: k(t) = offset + rate t
    double rate = 1.0;
    std::vector<double> coefficients;  // polynomial: ascending powers of t
};

// Override of one model frame, selected by the position label of its
// reference (gauge) slot.
struct FrameSpec {
    std::string reference;
    ClockSpec clock;
};

struct ModelSpec {
    std::string kind;
    Json options = Json::object();  // remaining model fields, kind removed
};

struct RunSpec {
    std::string command;           // reduce | evolve | rrft | orbit | verify
    std::string frame;             // primary frame by name
    std::string frame_b;           // partner frame for rrft
    std::vector<double> times;
    std::vector<double> initial;   // true-sector values (orbit also accepts
                                   // full phase-space coordinates)
    int samples = 11;
    std::string output;            // artifact file name inside the output dir
};

struct NumericsSpec {
    double rtol = 1e-10;
    double atol = 1e-12;
    double fd_step = 0.0;          // 0 selects the scaled default
    std::uint64_t seed = 20260823;
};

struct Scenario {
    ModelSpec model;
    std::vector<FrameSpec> frames;
    RunSpec run;
    NumericsSpec numerics;

    Tolerances tolerances() const {
        Tolerances tol;
        tol.rtol = numerics.rtol;
        tol.atol = numerics.atol;
        tol.fd_step = numerics.fd_step;
        return tol;
    }
};

namespace scenario_detail {

inline const Json& require_field(const Json& block, const std::string& key,
                                 const std::string& where) {
    const auto it = block.find(key);
    if (it == block.end()) {
        throw ConfigError(where + ": missing required field '" + key + "'");
    }
    return *it;
}

inline double as_number(const Json& v, const std::string& where) {
    if (!v.is_number()) {
        throw ConfigError(where + ": expected a number");
    }
    return v.get<double>();
}

inline std::string as_string(const Json& v, const std::string& where) {
    if (!v.is_string()) {
        throw ConfigError(where + ": expected a string");
    }
    return v.get<std::string>();
}

inline std::vector<double> as_number_array(const Json& v, const std::string& where) {
    if (!v.is_array()) {
        throw ConfigError(where + ": expected an array of numbers");
    }
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& e : v) {
        out.push_back(as_number(e, where));
    }
    return out;
}

inline void reject_unknown_keys(const Json& block, const std::set<std::string>& known,
                                const std::string& where) {
    for (const auto& [key, value] : block.items()) {
        (void)value;
        if (known.find(key) == known.end()) {
            throw ConfigError(where + ": unknown field '" + key + "'");
        }
    }
}

inline ClockSpec parse_clock(const Json& block, const std::string& where) {
    if (!block.is_object()) {
        throw ConfigError(where + ": expected an object");
    }
    ClockSpec spec;
    spec.kind = as_string(require_field(block, "kind", where), where + ".kind");
    if (spec.kind == "linear") {
        reject_unknown_keys(block, {"kind", "offset", "rate"}, where);
        if (block.contains("offset")) {
            spec.offset = as_number(block["offset"], where + ".offset");
        }
        if (block.contains("rate")) {
            spec.rate = as_number(block["rate"], where + ".rate");
        }
    } else if (spec.kind == "polynomial") {
        reject_unknown_keys(block, {"kind", "coefficients"}, where);
        spec.coefficients = as_number_array(
            require_field(block, "coefficients", where), where + ".coefficients");
        if (spec.coefficients.empty()) {
            throw ConfigError(where + ".coefficients: must not be empty");
        }
    } else {
        throw ConfigError(where + ".kind: unknown clock kind '" + spec.kind +
                          "' (expected linear or polynomial)");
    }
    return spec;
}

inline GaugeClock make_clock(const ClockSpec& spec) {
    if (spec.kind == "linear") {
        return GaugeClock::linear(spec.offset, spec.rate);
    }
    return GaugeClock::polynomial(spec.coefficients);
}

inline BranchSign parse_branch_sign(const std::string& text, const std::string& where) {
    if (text == "minus") return BranchSign::minus;
    if (text == "plus") return BranchSign::plus;
    if (text == "single") return BranchSign::single;
    throw ConfigError(where + ": unknown branch sign '" + text +
                      "' (expected minus, plus, or single)");
}

}  // namespace scenario_detail

inline Scenario parse_scenario(const Json& root) {
    using namespace scenario_detail;
    if (!root.is_object()) {
        throw ConfigError("scenario: top level must be an object");
    }
    reject_unknown_keys(root, {"model", "frames", "run", "numerics"}, "scenario");

    Scenario s;

    const Json& model = require_field(root, "model", "scenario");
    if (!model.is_object()) {
        throw ConfigError("scenario.model: expected an object");
    }
    s.model.kind = as_string(require_field(model, "kind", "scenario.model"),
                             "scenario.model.kind");
    s.model.options = model;
    s.model.options.erase("kind");

    if (root.contains("frames")) {
        const Json& frames = root["frames"];
        if (!frames.is_array()) {
            throw ConfigError("scenario.frames: expected an array");
        }
        for (std::size_t i = 0; i < frames.size(); ++i) {
            const std::string where = "scenario.frames[" + std::to_string(i) + "]";
            const Json& block = frames[i];
            if (!block.is_object()) {
                throw ConfigError(where + ": expected an object");
            }
            reject_unknown_keys(block, {"reference", "clock"}, where);
            FrameSpec spec;
            spec.reference = as_string(require_field(block, "reference", where),
                                       where + ".reference");
            spec.clock = parse_clock(require_field(block, "clock", where),
                                     where + ".clock");
            s.frames.push_back(std::move(spec));
        }
    }

    const Json& run = require_field(root, "run", "scenario");
    if (!run.is_object()) {
        throw ConfigError("scenario.run: expected an object");
    }
    reject_unknown_keys(run,
                        {"command", "frame", "frame_b", "times", "initial",
                         "samples", "output"},
                        "scenario.run");
    s.run.command = as_string(require_field(run, "command", "scenario.run"),
                              "scenario.run.command");
    static const std::set<std::string> commands = {"reduce", "evolve", "rrft",
                                                   "orbit", "verify"};
    if (commands.find(s.run.command) == commands.end()) {
        throw ConfigError("scenario.run.command: unknown command '" +
                          s.run.command + "'");
    }
    if (run.contains("frame")) {
        s.run.frame = as_string(run["frame"], "scenario.run.frame");
    }
    if (run.contains("frame_b")) {
        s.run.frame_b = as_string(run["frame_b"], "scenario.run.frame_b");
    }
    if (run.contains("times")) {
        s.run.times = as_number_array(run["times"], "scenario.run.times");
    }
    if (run.contains("initial")) {
        s.run.initial = as_number_array(run["initial"], "scenario.run.initial");
    }
    if (run.contains("samples")) {
        const Json& n = run["samples"];
        if (!n.is_number_integer() || n.get<long long>() < 2) {
            throw ConfigError("scenario.run.samples: expected an integer >= 2");
        }
        s.run.samples = n.get<int>();
    }
    if (run.contains("output")) {
        s.run.output = as_string(run["output"], "scenario.run.output");
    }

    if (root.contains("numerics")) {
        const Json& numerics = root["numerics"];
        if (!numerics.is_object()) {
            throw ConfigError("scenario.numerics: expected an object");
        }
        reject_unknown_keys(numerics, {"rtol", "atol", "fd_step", "seed"},
                            "scenario.numerics");
        if (numerics.contains("rtol")) {
            s.numerics.rtol = as_number(numerics["rtol"], "scenario.numerics.rtol");
            if (s.numerics.rtol <= 0.0) {
                throw ConfigError("scenario.numerics.rtol: must be positive");
            }
        }
        if (numerics.contains("atol")) {
            s.numerics.atol = as_number(numerics["atol"], "scenario.numerics.atol");
            if (s.numerics.atol <= 0.0) {
                throw ConfigError("scenario.numerics.atol: must be positive");
            }
        }
        if (numerics.contains("fd_step")) {
            s.numerics.fd_step =
                as_number(numerics["fd_step"], "scenario.numerics.fd_step");
            if (s.numerics.fd_step < 0.0) {
                throw ConfigError("scenario.numerics.fd_step: must be non-negative");
            }
        }
        if (numerics.contains("seed")) {
            const Json& seed = numerics["seed"];
            if (!seed.is_number_integer() || seed.get<long long>() < 0) {
                throw ConfigError(
                    "scenario.numerics.seed: expected a non-negative integer");
            }
            s.numerics.seed = seed.get<std::uint64_t>();
        }
    }

    return s;
}

inline Json serialize_scenario(const Scenario& s) {
    Json model = s.model.options;
    model["kind"] = s.model.kind;

    Json frames = Json::array();
    for (const auto& f : s.frames) {
        Json clock;
        clock["kind"] = f.clock.kind;
        if (f.clock.kind == "linear") {
            clock["offset"] = f.clock.offset;
            clock["rate"] = f.clock.rate;
        } else {
            clock["coefficients"] = f.clock.coefficients;
        }
        frames.push_back(Json{{"reference", f.reference}, {"clock", clock}});
    }

    Json run;
    run["command"] = s.run.command;
    if (!s.run.frame.empty()) run["frame"] = s.run.frame;
    if (!s.run.frame_b.empty()) run["frame_b"] = s.run.frame_b;
    if (!s.run.times.empty()) run["times"] = s.run.times;
    if (!s.run.initial.empty()) run["initial"] = s.run.initial;
    run["samples"] = s.run.samples;
    if (!s.run.output.empty()) run["output"] = s.run.output;

    Json numerics;
    numerics["rtol"] = s.numerics.rtol;
    numerics["atol"] = s.numerics.atol;
    numerics["fd_step"] = s.numerics.fd_step;
    numerics["seed"] = s.numerics.seed;

    Json root;
    root["model"] = model;
    if (!frames.empty()) root["frames"] = frames;
    root["run"] = run;
    root["numerics"] = numerics;
    return root;
}

inline Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open scenario file '" + path + "'");
    }
    Json root;
    try {
        in >> root;
    } catch (const Json::parse_error& e) {
        throw ConfigError("scenario file '" + path + "' is not valid JSON: " +
                          e.what());
    }
    return parse_scenario(root);
}

// ---------------------------------------------------------------------------
// Model construction from a scenario
// ---------------------------------------------------------------------------

namespace scenario_detail {

inline int option_int(const Json& options, const std::string& key, int fallback,
                      const std::string& where) {
    if (!options.contains(key)) return fallback;
    const Json& v = options[key];
    if (!v.is_number_integer()) {
        throw ConfigError(where + "." + key + ": expected an integer");
    }
    return v.get<int>();
}

inline double option_number(const Json& options, const std::string& key,
                            double fallback, const std::string& where) {
    if (!options.contains(key)) return fallback;
    return as_number(options[key], where + "." + key);
}

}  // namespace scenario_detail

inline ModelSystem build_model(const ModelSpec& spec) {
    using namespace scenario_detail;
    const std::string where = "scenario.model";
    const Json& opt = spec.options;

    if (spec.kind == "relativistic_particle") {
        reject_unknown_keys(opt, {"dim", "mass"}, where);
        RelativisticParticleParams params;
        params.dim = option_int(opt, "dim", params.dim, where);
        params.mass = option_number(opt, "mass", params.mass, where);
        return make_relativistic_particle(params);
    }
    if (spec.kind == "kepler") {
        reject_unknown_keys(opt, {"m", "alpha", "energy"}, where);
        KeplerParams params;
        params.m = option_number(opt, "m", params.m, where);
        params.alpha = option_number(opt, "alpha", params.alpha, where);
        params.energy = option_number(opt, "energy", params.energy, where);
        return make_kepler(params);
    }
    if (spec.kind == "linear_toy") {
        reject_unknown_keys(opt, {}, where);
        return make_linear_toy(LinearToyParams{});
    }
    if (spec.kind == "energy_constrained") {
        reject_unknown_keys(opt, {"dim", "energy", "reference", "branch"}, where);
        EnergyConstrainedParams params;
        params.dim = option_int(opt, "dim", params.dim, where);
        params.energy = option_number(opt, "energy", params.energy, where);
        const int reference = option_int(opt, "reference",
                                         static_cast<int>(params.reference), where);
        if (reference < 0) {
            throw ConfigError(where + ".reference: must be non-negative");
        }
        params.reference = static_cast<std::size_t>(reference);
        if (opt.contains("branch")) {
            params.branch = parse_branch_sign(
                as_string(opt["branch"], where + ".branch"), where + ".branch");
        }
        return make_energy_constrained(params);
    }
    if (spec.kind == "lattice_pft") {
        reject_unknown_keys(opt, {"dim", "sites", "spacing", "mu", "guard_band"},
                            where);
        LatticePftParams params;
        params.dim = option_int(opt, "dim", params.dim, where);
        params.sites = option_int(opt, "sites", params.sites, where);
        params.spacing = option_number(opt, "spacing", params.spacing, where);
        params.mu = option_number(opt, "mu", params.mu, where);
        params.guard_band = option_int(opt, "guard_band", params.guard_band, where);
        return make_lattice_pft(params);
    }
    throw ConfigError(where + ".kind: unknown model kind '" + spec.kind + "'");
}

// Apply the scenario's frame overrides to a freshly built model.  A frame is
// selected by the position label of its single reference slot; the replacement
// clock must advance somewhere, since a frame whose reference never moves
// cannot parametrize the orbits it is supposed to slice.
inline void apply_frame_specs(ModelSystem& model, const std::vector<FrameSpec>& specs) {
    using namespace scenario_detail;
    for (const auto& spec : specs) {
        std::shared_ptr<GaugeFrame> match;
        std::string match_name;
        for (const auto& [name, frame] : model.frames) {
            if (frame->n_gauge() != 1) continue;
            if (frame->split->x_label(0) == spec.reference) {
                match = frame;
                match_name = name;
                break;
            }
        }
        if (!match) {
            throw ConfigError("scenario.frames: no frame with reference slot '" +
                              spec.reference + "'");
        }
        auto replaced = std::make_shared<GaugeFrame>(*match);
        replaced->clocks = {make_clock(spec.clock)};
        if (!replaced->has_advancing_clock()) {
            throw ConfigError("scenario.frames: clock for reference slot '" +
                              spec.reference +
                              "' never advances; the frame cannot evolve");
        }
        model.frames[match_name] = replaced;
    }
}

}  // namespace gaugeframe
