#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "gaugeframe/scenario.hpp"
#include "gaugeframe/verify.hpp"

namespace gaugeframe {

enum class LogLevel { quiet = 0, info = 1, debug = 2 };

inline LogLevel log_level_from_env() {
    const char* env = std::getenv("GAUGEFRAME_LOG");
    if (env == nullptr) return LogLevel::info;
    const std::string value = env;
    if (value == "quiet") return LogLevel::quiet;
    if (value == "info") return LogLevel::info;
    if (value == "debug") return LogLevel::debug;
    throw ConfigError("GAUGEFRAME_LOG: unknown level '" + value +
                      "' (expected quiet, info, or debug)");
}

struct RunResult {
    int exit_code = 0;
    std::vector<std::string> artifacts;
    std::optional<VerificationReport> report;
};

namespace runner_detail {

inline void log(LogLevel level, LogLevel at_least, const std::string& message) {
    if (static_cast<int>(level) >= static_cast<int>(at_least)) {
        std::cerr << "gaugeframe: " << message << "\n";
    }
}

// All numeric output uses 17 significant digits so values survive a
// text -> binary round trip bit-exactly.
inline std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

inline void write_csv(const std::string& path,
                      const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot write output file '" + path + "'");
    }
    for (std::size_t i = 0; i < header.size(); ++i) {
        out << (i == 0 ? "" : ",") << header[i];
    }
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << (i == 0 ? "" : ",") << format_value(row[i]);
        }
        out << "\n";
    }
}

inline void write_json(const std::string& path, const Json& value) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot write output file '" + path + "'");
    }
    out << value.dump(2) << "\n";
}

inline std::string artifact_path(const std::string& output_dir,
                                 const std::string& name) {
    namespace fs = std::filesystem;
    fs::create_directories(output_dir);
    return (fs::path(output_dir) / name).string();
}

inline std::shared_ptr<GaugeFrame> resolve_frame(const ModelSystem& model,
                                                 const std::string& name,
                                                 const std::string& where) {
    if (name.empty()) {
        if (model.frames.size() == 1) {
            return model.frames.begin()->second;
        }
        throw ConfigError(where + ": model has " +
                          std::to_string(model.frames.size()) +
                          " frames; name one explicitly");
    }
    const auto it = model.frames.find(name);
    if (it == model.frames.end()) {
        throw ConfigError(where + ": model has no frame named '" + name + "'");
    }
    return it->second;
}

inline Vector true_sector_initial(const GaugeFrame& frame,
                                  const std::vector<double>& initial,
                                  const std::string& where) {
    const std::size_t expect = 2 * frame.split->n_true();
    if (initial.size() != expect) {
        throw ConfigError(where + ": expected " + std::to_string(expect) +
                          " initial values (true positions then momenta), got " +
                          std::to_string(initial.size()));
    }
    Vector qp(static_cast<Eigen::Index>(expect));
    for (std::size_t i = 0; i < expect; ++i) {
        qp[static_cast<Eigen::Index>(i)] = initial[i];
    }
    return qp;
}

inline void require_times(const RunSpec& run, std::size_t count,
                          const std::string& meaning) {
    if (run.times.size() != count) {
        throw ConfigError("scenario.run.times: command '" + run.command +
                          "' expects " + std::to_string(count) + " entries (" +
                          meaning + "), got " + std::to_string(run.times.size()));
    }
}

inline std::vector<std::string> state_header(const GaugeFrame& frame) {
    std::vector<std::string> header = {"t"};
    for (std::size_t a = 0; a < frame.split->n_true(); ++a) {
        header.push_back(frame.split->q_label(a));
    }
    for (std::size_t a = 0; a < frame.split->n_true(); ++a) {
        header.push_back(frame.split->p_label(a));
    }
    return header;
}

}  // namespace runner_detail

// Orbit figure data: the constraint orbit through a point, sampled in the flow
// parameter, plus rows tracing the gauge cut plane and rows flagging the
// orbit/cut intersections.  The marker column distinguishes the three kinds
// (0 = orbit sample, 1 = cut plane, 2 = intersection); the residual column
// reports the drift of the conserved constraint value along the flow.
struct OrbitFigureData {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

inline OrbitFigureData emit_orbit_figure_data(const ModelSystem& model,
                                              const GaugeFrame& frame, double t,
                                              const PhasePoint& z0, double s_min,
                                              double s_max, int n_samples,
                                              const Tolerances& tol = {}) {
    if (frame.n_gauge() != 1) {
        throw ConfigError("orbit figure: requires a frame with one gauge pair");
    }
    if (!(s_max > s_min)) {
        throw ConfigError("orbit figure: flow span must have s_max > s_min");
    }
    if (n_samples < 2) {
        throw ConfigError("orbit figure: need at least 2 samples");
    }

    OrbitFigureData fig;
    fig.header = {"s"};
    for (std::size_t k = 0; k < model.pairs->n_pairs(); ++k) {
        fig.header.push_back(model.pairs->position_labels[k]);
    }
    for (std::size_t k = 0; k < model.pairs->n_pairs(); ++k) {
        fig.header.push_back(model.pairs->momentum_labels[k]);
    }
    fig.header.push_back("residual");
    fig.header.push_back("marker");

    const ScalarField& cbar = frame.constraints.cbar[0];
    const double conserved = cbar.eval(z0);

    auto emit = [&](double s, const PhasePoint& z, double marker) {
        std::vector<double> row;
        row.reserve(static_cast<std::size_t>(z.coords.size()) + 3);
        row.push_back(s);
        for (Eigen::Index i = 0; i < z.coords.size(); ++i) {
            row.push_back(z.coords[i]);
        }
        row.push_back(std::abs(cbar.eval(z) - conserved));
        row.push_back(marker);
        fig.rows.push_back(std::move(row));
    };

    // Orbit samples, chaining the flow from one parameter value to the next.
    std::vector<PhasePoint> samples;
    PhasePoint z = hamiltonian_flow(cbar, z0, 0.0, s_min, tol);
    double s = s_min;
    for (int i = 0; i < n_samples; ++i) {
        const double s_next =
            s_min + (s_max - s_min) * static_cast<double>(i) /
                        static_cast<double>(n_samples - 1);
        z = hamiltonian_flow(cbar, z, s, s_next, tol);
        s = s_next;
        samples.push_back(z);
        emit(s, z, 0.0);
    }

    // Cut plane x = k(t): sweep the first true position over the sampled
    // range, holding every other coordinate at the sample mean.
    const double cut_value = frame.clocks[0].value(t);
    const Eigen::Index x_slot = static_cast<Eigen::Index>(frame.split->x_index(0));
    Vector mean = Vector::Zero(z0.coords.size());
    for (const auto& sample : samples) {
        mean += sample.coords;
    }
    mean /= static_cast<double>(samples.size());
    if (frame.split->n_true() > 0) {
        const Eigen::Index q_slot =
            static_cast<Eigen::Index>(frame.split->q_index(0));
        double lo = samples.front().coords[q_slot], hi = lo;
        for (const auto& sample : samples) {
            lo = std::min(lo, sample.coords[q_slot]);
            hi = std::max(hi, sample.coords[q_slot]);
        }
        const double pad = 0.1 * std::max(hi - lo, 1e-6);
        const int n_cut = 17;
        for (int i = 0; i < n_cut; ++i) {
            Vector coords = mean;
            coords[q_slot] = lo - pad + (hi - lo + 2.0 * pad) *
                                            static_cast<double>(i) /
                                            static_cast<double>(n_cut - 1);
            coords[x_slot] = cut_value;
            PhasePoint plane{coords, model.pairs};
            std::vector<double> row;
            row.push_back(0.0);
            for (Eigen::Index j = 0; j < coords.size(); ++j) {
                row.push_back(coords[j]);
            }
            row.push_back(0.0);
            row.push_back(1.0);
            fig.rows.push_back(std::move(row));
        }
    }

    // Intersection of the orbit with the cut: the gauge position moves
    // linearly in the flow parameter at the pair's bracket weight, so the
    // crossing parameter is known in closed form.
    const double weight =
        model.pairs->weights[static_cast<Eigen::Index>(frame.split->gauge_pair(0))];
    const double s_cross = (cut_value - z0.coords[x_slot]) / weight;
    if (s_cross >= s_min && s_cross <= s_max) {
        const PhasePoint on_cut = hamiltonian_flow(cbar, z0, 0.0, s_cross, tol);
        emit(s_cross, on_cut, 2.0);
    }

    return fig;
}

inline Json report_to_json(const VerificationReport& report) {
    Json checks = Json::array();
    for (const auto& c : report.checks) {
        Json entry;
        entry["name"] = c.name;
        entry["max_error"] = c.max_error;
        entry["tolerance"] = c.tolerance;
        entry["pass"] = c.pass;
        entry["samples"] = c.samples;
        checks.push_back(entry);
    }
    Json root;
    root["model"] = report.model;
    root["checks"] = checks;
    root["overall_pass"] = report.overall_pass();
    return root;
}

inline RunResult run_scenario(const Scenario& scenario,
                              const std::string& output_dir = ".") {
    using namespace runner_detail;
    const LogLevel level = log_level_from_env();
    const Tolerances tol = scenario.tolerances();

    ModelSystem model = build_model(scenario.model);
    apply_frame_specs(model, scenario.frames);
    log(level, LogLevel::debug,
        "model '" + model.kind + "' with " + std::to_string(model.frames.size()) +
            " frames");

    const RunSpec& run = scenario.run;
    RunResult result;

    if (run.command == "evolve" || run.command == "reduce") {
        const auto frame = resolve_frame(model, run.frame, "scenario.run.frame");
        if (!frame->has_advancing_clock()) {
            throw ConfigError("scenario.run: frame '" + run.frame +
                              "' has no advancing clock");
        }
        require_times(run, 2, "start and end time");
        const Vector qp0 =
            true_sector_initial(*frame, run.initial, "scenario.run.initial");
        const std::string name =
            run.output.empty() ? run.command + ".csv" : run.output;
        const std::string path = artifact_path(output_dir, name);

        if (run.command == "evolve") {
            const Trajectory traj = evolve_hamiltonian(
                *frame, qp0, run.times[0], run.times[1], run.samples, tol);
            std::vector<std::vector<double>> rows;
            for (std::size_t i = 0; i < traj.times.size(); ++i) {
                std::vector<double> row = {traj.times[i]};
                for (Eigen::Index j = 0; j < traj.states[i].size(); ++j) {
                    row.push_back(traj.states[i][j]);
                }
                rows.push_back(std::move(row));
            }
            write_csv(path, state_header(*frame), rows);
        } else {
            std::vector<std::vector<double>> rows;
            for (int i = 0; i < run.samples; ++i) {
                const double t =
                    run.times[0] + (run.times[1] - run.times[0]) *
                                       static_cast<double>(i) /
                                       static_cast<double>(run.samples - 1);
                rows.push_back({t, reduced_hamiltonian(*frame, t, qp0)});
            }
            write_csv(path, {"t", "h"}, rows);
        }
        log(level, LogLevel::info, "wrote " + path);
        result.artifacts.push_back(path);
        return result;
    }

    if (run.command == "rrft") {
        const auto frame_a = resolve_frame(model, run.frame, "scenario.run.frame");
        if (run.frame_b.empty()) {
            throw ConfigError("scenario.run.frame_b: required for command 'rrft'");
        }
        const auto frame_b =
            resolve_frame(model, run.frame_b, "scenario.run.frame_b");
        require_times(run, 2, "frame A time and frame B time");
        const Vector qp =
            true_sector_initial(*frame_a, run.initial, "scenario.run.initial");
        FrameMap map{FramePair(frame_a, frame_b), run.times[0], run.times[1]};
        const PullbackResult pb = pullback_hamiltonian(map, qp, run.times[1], tol);

        Json out;
        out["point"] = run.initial;
        std::vector<double> image(static_cast<std::size_t>(pb.image.size()));
        for (Eigen::Index i = 0; i < pb.image.size(); ++i) {
            image[static_cast<std::size_t>(i)] = pb.image[i];
        }
        out["image"] = image;
        out["h_a"] = pb.h_a;
        out["h_b_pullback"] = pb.h_b_pullback;

        const std::string name = run.output.empty() ? "rrft.json" : run.output;
        const std::string path = artifact_path(output_dir, name);
        write_json(path, out);
        log(level, LogLevel::info, "wrote " + path);
        result.artifacts.push_back(path);
        return result;
    }

    if (run.command == "orbit") {
        const auto frame = resolve_frame(model, run.frame, "scenario.run.frame");
        require_times(run, 3, "cut time, flow start, flow end");
        PhasePoint z0{Vector::Zero(static_cast<Eigen::Index>(model.pairs->dim())),
                      model.pairs};
        if (run.initial.size() == model.pairs->dim()) {
            for (std::size_t i = 0; i < run.initial.size(); ++i) {
                z0.coords[static_cast<Eigen::Index>(i)] = run.initial[i];
            }
        } else {
            const Vector qp =
                true_sector_initial(*frame, run.initial, "scenario.run.initial");
            z0 = embed_at_cut(*frame, run.times[0], qp);
        }
        const OrbitFigureData fig =
            emit_orbit_figure_data(model, *frame, run.times[0], z0, run.times[1],
                                   run.times[2], run.samples, tol);
        const std::string name = run.output.empty() ? "orbit.csv" : run.output;
        const std::string path = artifact_path(output_dir, name);
        write_csv(path, fig.header, fig.rows);
        log(level, LogLevel::info, "wrote " + path);
        result.artifacts.push_back(path);
        return result;
    }

    // verify
    log(level, LogLevel::info, "verifying model '" + model.kind + "'");
    const VerificationReport report =
        run_verification(model, scenario.numerics.seed, tol);
    const std::string name = run.output.empty() ? "verification.json" : run.output;
    const std::string path = artifact_path(output_dir, name);
    write_json(path, report_to_json(report));
    for (const auto& check : report.checks) {
        log(level, LogLevel::debug,
            check.name + ": max_error " + format_value(check.max_error) +
                (check.pass ? " <= " : " > ") + format_value(check.tolerance));
    }
    log(level, LogLevel::info,
        std::string("verification ") + (report.overall_pass() ? "passed" : "FAILED") +
            ", wrote " + path);
    result.artifacts.push_back(path);
    result.report = report;
    result.exit_code = report.overall_pass() ? 0 : 1;
    return result;
}

}  // namespace gaugeframe
