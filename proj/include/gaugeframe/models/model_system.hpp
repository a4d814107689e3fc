#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "gaugeframe/gauge_system.hpp"

namespace gaugeframe {

struct RelativisticParticleParams {
    int dim = 1;        // spatial dimensions; kinematical pairs = dim + 1
    double mass = 1.0;  // rest mass m > 0
};

struct KeplerParams {
    double m = 1.0;      // particle mass
    double alpha = 1.0;  // potential strength, U(r) = -alpha / r
    double energy = 0.5; // scattering energy E >= 0
};

struct LinearToyParams {
    // E(q, p) = p^2 / 2 matched against the identical function of (x, y);
    // no free parameters.
};

struct EnergyConstrainedParams {
    int dim = 2;          // kinematical pairs
    double energy = 0.5;  // constraint level E
    std::function<double(const Vector&)> potential;       // U(K); null means 0
    std::function<Vector(const Vector&)> potential_grad;  // optional
    std::function<Matrix(const Vector&)> metric;          // g^{AB}(K); null = identity
    std::size_t reference = 0;                            // gauge pair index
    BranchSign branch = BranchSign::minus;
};

struct LatticePftParams {
    int dim = 1;         // spatial dimensions D, 1 or 2
    int sites = 64;      // lattice sites per direction
    double spacing = 0.1;
    double mu = 0.0;     // mass parameter of the 1/2 mu^2 phi^2 potential term
    int guard_band = 8;  // boundary sites that must stay (numerically) empty
};

using ModelParams = std::variant<RelativisticParticleParams, KeplerParams,
                                 LinearToyParams, EnergyConstrainedParams,
                                 LatticePftParams>;

// A constrained model: its kinematical pair structure, the gauge frames it
// supports, and the parameters it was built from.
struct ModelSystem {
    std::string kind;
    std::shared_ptr<const PairStructure> pairs;
    std::map<std::string, std::shared_ptr<GaugeFrame>> frames;
    ModelParams params;

    PhasePoint make_point(Vector coords) const {
        return PhasePoint{std::move(coords), pairs};
    }

    std::shared_ptr<const GaugeFrame> frame(const std::string& name) const {
        auto it = frames.find(name);
        if (it == frames.end()) {
            throw ConfigError("model '" + kind + "' has no frame named '" + name + "'");
        }
        return it->second;
    }
};

}  // namespace gaugeframe
