#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "gaugeframe/models/model_system.hpp"

namespace gaugeframe {

// Free relativistic particle in Minkowski space (signature -+...+), mass-shell
// constraint C = eta^{AB} M_A M_B + m^2.  Two frames:
//   "temporal": reference K^0, solved momentum M_0 = -sqrt(m^2 + M_1^2 + e),
//   "spatial":  reference K^1, solved momentum M_1 = -sqrt(M_0^2 - m^2 - e),
// with e the squared transverse momentum sum over a >= 2.  Both branch signs
// are negative: M_0 < 0 and M_1 < 0.
inline ModelSystem make_relativistic_particle(const RelativisticParticleParams& params) {
    if (params.dim < 1) {
        throw ConfigError("relativistic particle: dim must be at least 1");
    }
    if (!(params.mass > 0.0)) {
        throw ConfigError("relativistic particle: mass must be positive");
    }
    const int D = params.dim;
    const double m2 = params.mass * params.mass;
    const std::size_t n_pairs = static_cast<std::size_t>(D) + 1;

    std::vector<std::string> pos, mom;
    for (std::size_t A = 0; A < n_pairs; ++A) {
        pos.push_back("K" + std::to_string(A));
        mom.push_back("M" + std::to_string(A));
    }
    auto pairs = PairStructure::make(std::move(pos), std::move(mom));

    ModelSystem model;
    model.kind = "relativistic_particle";
    model.pairs = pairs;
    model.params = params;

    const Eigen::Index np = static_cast<Eigen::Index>(n_pairs);
    auto momentum_slot = [np](std::size_t A) {
        return np + static_cast<Eigen::Index>(A);
    };

    ScalarField raw;
    raw.label = "mass_shell";
    raw.eval = [n_pairs, np, m2](const PhasePoint& z) {
        double v = m2 - z.coords[np] * z.coords[np];
        for (std::size_t A = 1; A < n_pairs; ++A) {
            const double M = z.coords[np + static_cast<Eigen::Index>(A)];
            v += M * M;
        }
        return v;
    };
    raw.grad = [n_pairs, np](const PhasePoint& z) {
        Vector g = Vector::Zero(static_cast<Eigen::Index>(z.dim()));
        g[np] = -2.0 * z.coords[np];
        for (std::size_t A = 1; A < n_pairs; ++A) {
            g[np + static_cast<Eigen::Index>(A)] = 2.0 * z.coords[np + static_cast<Eigen::Index>(A)];
        }
        return g;
    };

    // Temporal frame: h = sqrt(m^2 + sum_{a>=1} M_a^2), always defined.
    {
        ScalarField h;
        h.label = "h_temporal";
        h.eval = [n_pairs, np, m2](const PhasePoint& z) {
            double v = m2;
            for (std::size_t A = 1; A < n_pairs; ++A) {
                const double M = z.coords[np + static_cast<Eigen::Index>(A)];
                v += M * M;
            }
            return std::sqrt(v);
        };
        h.grad = [n_pairs, np, m2](const PhasePoint& z) {
            double v = m2;
            for (std::size_t A = 1; A < n_pairs; ++A) {
                const double M = z.coords[np + static_cast<Eigen::Index>(A)];
                v += M * M;
            }
            const double root = std::sqrt(v);
            Vector g = Vector::Zero(static_cast<Eigen::Index>(z.dim()));
            for (std::size_t A = 1; A < n_pairs; ++A) {
                g[np + static_cast<Eigen::Index>(A)] = z.coords[np + static_cast<Eigen::Index>(A)] / root;
            }
            return g;
        };

        auto split = std::make_shared<const CoordinateSplit>(pairs, std::vector<std::size_t>{0});
        auto frame = std::make_shared<GaugeFrame>();
        frame->name = "temporal";
        frame->split = split;
        frame->clocks = {GaugeClock::linear(0.0, 1.0)};
        frame->constraints.raw = {raw};
        frame->constraints.solved = {h};
        frame->constraints.branch = BranchSigns{{BranchSign::minus}};
        frame->constraints.finalize(*split);
        model.frames.emplace(frame->name, frame);
    }

    // Spatial frame: hhat = sqrt(M_0^2 - m^2 - e), defined only where
    // |M_0| exceeds the transverse mass sqrt(m^2 + e).
    {
        ScalarField h;
        h.label = "h_spatial";
        auto radicand = [n_pairs, np, m2](const PhasePoint& z) {
            double v = z.coords[np] * z.coords[np] - m2;
            for (std::size_t A = 2; A < n_pairs; ++A) {
                const double M = z.coords[np + static_cast<Eigen::Index>(A)];
                v -= M * M;
            }
            return v;
        };
        h.eval = [radicand, m2](const PhasePoint& z) {
            return guarded_sqrt(radicand(z), m2, 1e-10, "spatial-frame momentum solve");
        };
        h.grad = [radicand, n_pairs, np, m2](const PhasePoint& z) {
            const double root =
                guarded_sqrt(radicand(z), m2, 1e-10, "spatial-frame momentum solve");
            Vector g = Vector::Zero(static_cast<Eigen::Index>(z.dim()));
            g[np] = z.coords[np] / root;
            for (std::size_t A = 2; A < n_pairs; ++A) {
                g[np + static_cast<Eigen::Index>(A)] = -z.coords[np + static_cast<Eigen::Index>(A)] / root;
            }
            return g;
        };

        auto split = std::make_shared<const CoordinateSplit>(pairs, std::vector<std::size_t>{1});
        auto frame = std::make_shared<GaugeFrame>();
        frame->name = "spatial";
        frame->split = split;
        frame->clocks = {GaugeClock::linear(0.0, 1.0)};
        frame->constraints.raw = {raw};
        frame->constraints.solved = {h};
        frame->constraints.branch = BranchSigns{{BranchSign::minus}};
        frame->constraints.finalize(*split);
        model.frames.emplace(frame->name, frame);
    }

    return model;
}

// Closed-form reference maps for the particle, written directly from the
// solved constraint without any flow machinery.
namespace particle_closed {

// sqrt(m^2 + sum_{a>=1} p_a^2) from the spatial momenta only.
inline double energy_root(const RelativisticParticleParams& params,
                          const Vector& p_spatial) {
    return std::sqrt(params.mass * params.mass + p_spatial.squaredNorm());
}

// Temporal-frame observable value of K^a at clock value k: the point moved
// along the orbit until K^0 = k.
inline double observable_q(const RelativisticParticleParams& params,
                           const PhasePoint& z, double k_value, int a) {
    const int D = params.dim;
    const Eigen::Index np = static_cast<Eigen::Index>(D) + 1;
    Vector p(D);
    for (int b = 1; b <= D; ++b) p[b - 1] = z.coords[np + b];
    const double root = energy_root(params, p);
    const double x = z.coords[0];
    return z.coords[a] + (k_value - x) * z.coords[np + a] / root;
}

// Temporal -> spatial frame transformation of true-sector values
// (q^1..q^D, p_1..p_D) with the temporal cut at clock value k and the spatial
// cut at khat.  Output ordering follows the spatial frame's true sector:
// (K^0, K^2, ..., K^D, M_0, M_2, ..., M_D).
inline Vector rrft_image(const RelativisticParticleParams& params, const Vector& qp,
                         double k_value, double khat_value) {
    const int D = params.dim;
    const Vector q = qp.head(D);
    const Vector p = qp.tail(D);
    const double root = energy_root(params, p);
    const double p1 = p[0];
    Vector out(2 * D);
    out[0] = k_value + (khat_value - q[0]) * root / p1;
    for (int a = 2; a <= D; ++a) {
        out[a - 1] = q[a - 1] + (khat_value - q[0]) * p[a - 1] / p1;
    }
    out[D] = -root;
    for (int a = 2; a <= D; ++a) {
        out[D + a - 1] = p[a - 1];
    }
    return out;
}

// Spatial-frame reduced Hamiltonian pulled back through the transformation:
// khat_rate * (-p_1).
inline double pullback(double khat_rate, const Vector& qp, int dim) {
    return -khat_rate * qp[dim];
}

}  // namespace particle_closed

}  // namespace gaugeframe
