#pragma once

#include <memory>
#include <vector>

#include "gaugeframe/models/model_system.hpp"

namespace gaugeframe {

// Minimal exactly-solvable system: two pairs (q; p), (x; y) and the single
// constraint C = p^2/2 - y^2/2.  On the sector p + y = 0 both orderings of
// "which pair is the reference" solve to the same linear constraint, so every
// map in the library has a one-line closed form.  Frames:
//   "direct":  reference x, solved h(q, p) = p,
//   "swapped": reference q, solved h(x, y) = y.
inline ModelSystem make_linear_toy(const LinearToyParams& params) {
    (void)params;
    auto pairs = PairStructure::make({"q", "x"}, {"p", "y"});

    ModelSystem model;
    model.kind = "linear_toy";
    model.pairs = pairs;
    model.params = params;

    // Coordinate slots: [q, x, p, y].
    ScalarField raw;
    raw.label = "quadratic";
    raw.eval = [](const PhasePoint& z) {
        const double p = z.coords[2], y = z.coords[3];
        return 0.5 * p * p - 0.5 * y * y;
    };
    raw.grad = [](const PhasePoint& z) {
        Vector g = Vector::Zero(4);
        g[2] = z.coords[2];
        g[3] = -z.coords[3];
        return g;
    };

    auto add_frame = [&](const std::string& name, std::size_t gauge_pair,
                         Eigen::Index momentum_slot) {
        ScalarField h;
        h.label = "h_" + name;
        h.eval = [momentum_slot](const PhasePoint& z) { return z.coords[momentum_slot]; };
        h.grad = [momentum_slot](const PhasePoint& z) {
            Vector g = Vector::Zero(z.coords.size());
            g[momentum_slot] = 1.0;
            return g;
        };

        auto split = std::make_shared<const CoordinateSplit>(
            pairs, std::vector<std::size_t>{gauge_pair});
        auto frame = std::make_shared<GaugeFrame>();
        frame->name = name;
        frame->split = split;
        frame->clocks = {GaugeClock::linear(0.0, 1.0)};
        frame->constraints.raw = {raw};
        frame->constraints.solved = {h};
        frame->constraints.branch = BranchSigns{{BranchSign::single}};
        frame->constraints.finalize(*split);
        model.frames.emplace(frame->name, frame);
    };

    // Reference x solves for y = -p; reference q solves for p = -y.
    add_frame("direct", 1, 2);
    add_frame("swapped", 0, 3);
    return model;
}

namespace toy_closed {

// Observable completing q to the cut x = k: O_q = q + k - x.
inline double observable_q(double q, double x, double k_value) {
    return q + k_value - x;
}

// Direct -> swapped transformation of the true sector: (q, p) at cut k maps
// to (x, y) = (k + khat - q, -p) at cut khat.
inline Vector rrft_image(const Vector& qp, double k_value, double khat_value) {
    Vector out(2);
    out[0] = k_value + khat_value - qp[0];
    out[1] = -qp[1];
    return out;
}

}  // namespace toy_closed

}  // namespace gaugeframe
