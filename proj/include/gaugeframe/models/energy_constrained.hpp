#pragma once

#include <memory>
#include <string>
#include <vector>

#include "gaugeframe/gauge_system.hpp"
#include "gaugeframe/models/model_system.hpp"

namespace gaugeframe {

// Generic energy-constrained mechanical system on dim kinematical pairs
// (K^A; M_A):  C = 1/2 g^{AB}(K) M_A M_B + U(K) - E.  One pair (params
// .reference) serves as the frame; its momentum is solved from C = 0 by
// Newton iteration on the chosen branch, so the model exercises the numeric
// path that the closed-form models bypass.  The default instance (dim = 2,
// U = 0, E = 1/2, identity metric) solves to h = sqrt(1 - p^2), motion on a
// circle in the true sector.
inline ModelSystem make_energy_constrained(const EnergyConstrainedParams& params) {
    if (params.dim < 1) {
        throw ConfigError("energy_constrained: dim must be at least 1");
    }
    const auto n = static_cast<std::size_t>(params.dim);
    if (params.reference >= n) {
        throw ConfigError("energy_constrained: reference pair " +
                          std::to_string(params.reference) + " out of range for dim " +
                          std::to_string(params.dim));
    }
    std::vector<std::string> position_labels(n), momentum_labels(n);
    for (std::size_t a = 0; a < n; ++a) {
        position_labels[a] = "K" + std::to_string(a);
        momentum_labels[a] = "M" + std::to_string(a);
    }
    auto pairs = PairStructure::make(position_labels, momentum_labels);

    ModelSystem model;
    model.kind = "energy_constrained";
    model.pairs = pairs;
    model.params = params;

    const auto dim = static_cast<Eigen::Index>(n);
    auto positions = [dim](const PhasePoint& z) -> Vector { return z.coords.head(dim); };
    auto momenta = [dim](const PhasePoint& z) -> Vector { return z.coords.tail(dim); };

    ScalarField raw;
    raw.label = "energy_shell";
    raw.eval = [params, positions, momenta](const PhasePoint& z) {
        const Vector K = positions(z);
        const Vector M = momenta(z);
        double kinetic;
        if (params.metric) {
            kinetic = 0.5 * M.dot(params.metric(K) * M);
        } else {
            kinetic = 0.5 * M.squaredNorm();
        }
        const double potential = params.potential ? params.potential(K) : 0.0;
        return kinetic + potential - params.energy;
    };
    // Analytic gradient only for the flat-metric case with a known dU.
    if (!params.metric && (!params.potential || params.potential_grad)) {
        raw.grad = [params, dim, positions, momenta](const PhasePoint& z) {
            Vector g = Vector::Zero(2 * dim);
            g.tail(dim) = momenta(z);
            if (params.potential && params.potential_grad) {
                g.head(dim) = params.potential_grad(positions(z));
            }
            return g;
        };
    }

    auto split = std::make_shared<const CoordinateSplit>(
        pairs, std::vector<std::size_t>{params.reference});

    // Standalone solver input: the raw constraint plus the branch choice.
    auto solver = std::make_shared<ConstraintSystem>();
    solver->raw = {raw};
    solver->branch = BranchSigns{{params.branch}};

    ScalarField h;
    h.label = "h_reference";
    h.eval = [solver, split](const PhasePoint& z) {
        const Vector y = solve_for_momenta(*solver, *split, z);
        return -y[0];
    };

    auto frame = std::make_shared<GaugeFrame>();
    frame->name = "reference";
    frame->split = split;
    frame->clocks = {GaugeClock::linear(0.0, 1.0)};
    frame->constraints.raw = {raw};
    frame->constraints.solved = {h};
    frame->constraints.branch = BranchSigns{{params.branch}};
    frame->constraints.finalize(*split);
    model.frames.emplace(frame->name, frame);

    return model;
}

}  // namespace gaugeframe
