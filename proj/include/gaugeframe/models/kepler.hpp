#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "gaugeframe/models/model_system.hpp"

namespace gaugeframe {

// Planar Kepler scattering at fixed energy: pairs (r; p) and (phi; l), raw
// constraint C = (p^2 + l^2 / r^2) / (2m) - alpha / r - E.  The selected
// sector is ingoing and clockwise, p < 0 and l < 0.  Two frames:
//   "angular": reference phi,  solved l = -sqrt([2m(E - U(r)) - p^2] r^2),
//   "radial":  reference r,    solved p = -sqrt(2m(E - U(r)) - l^2 / r^2).
inline ModelSystem make_kepler(const KeplerParams& params) {
    if (!(params.m > 0.0) || !(params.alpha > 0.0)) {
        throw ConfigError("kepler: mass and alpha must be positive");
    }
    if (params.energy < 0.0) {
        throw ConfigError("kepler: energy must be non-negative");
    }
    auto pairs = PairStructure::make({"r", "phi"}, {"p", "l"});
    pairs->position_ranges[0] = {0.0, std::numeric_limits<double>::infinity()};
    pairs->position_ranges[1] = {0.0, 2.0 * M_PI};  // angle slot

    ModelSystem model;
    model.kind = "kepler";
    model.pairs = pairs;
    model.params = params;

    const double m = params.m;
    const double alpha = params.alpha;
    const double E = params.energy;
    // Coordinate slots: [r, phi, p, l].
    constexpr Eigen::Index R = 0, PHI = 1, P = 2, L = 3;

    // 2m(E - U(r)) with U = -alpha / r.
    auto kinetic = [m, alpha, E](double r) { return 2.0 * m * (E + alpha / r); };

    ScalarField raw;
    raw.label = "energy_shell";
    raw.eval = [m, alpha, E](const PhasePoint& z) {
        const double r = z.coords[R], p = z.coords[P], l = z.coords[L];
        return (p * p + l * l / (r * r)) / (2.0 * m) - alpha / r - E;
    };
    raw.grad = [m, alpha](const PhasePoint& z) {
        const double r = z.coords[R], p = z.coords[P], l = z.coords[L];
        Vector g = Vector::Zero(4);
        g[R] = -l * l / (m * r * r * r) + alpha / (r * r);
        g[P] = p / m;
        g[L] = l / (m * r * r);
        return g;
    };

    // Angular frame: reference phi, h(r, p) = sqrt([2m(E - U) - p^2] r^2).
    {
        ScalarField h;
        h.label = "h_angular";
        h.eval = [kinetic](const PhasePoint& z) {
            const double r = z.coords[R], p = z.coords[P];
            const double A = kinetic(r);
            return guarded_sqrt((A - p * p) * r * r, A * r * r, 1e-10,
                                "angular-frame momentum solve");
        };
        h.grad = [kinetic, m, alpha](const PhasePoint& z) {
            const double r = z.coords[R], p = z.coords[P];
            const double A = kinetic(r);
            const double root = guarded_sqrt((A - p * p) * r * r, A * r * r, 1e-10,
                                             "angular-frame momentum solve");
            Vector g = Vector::Zero(4);
            // d/dr[(A(r) - p^2) r^2] = -2 m alpha + 2 r (A - p^2)
            g[R] = (-2.0 * m * alpha + 2.0 * r * (A - p * p)) / (2.0 * root);
            g[P] = -p * r * r / root;
            return g;
        };

        auto split = std::make_shared<const CoordinateSplit>(pairs, std::vector<std::size_t>{1});
        auto frame = std::make_shared<GaugeFrame>();
        frame->name = "angular";
        frame->split = split;
        frame->clocks = {GaugeClock::linear(0.0, 1.0)};
        frame->constraints.raw = {raw};
        frame->constraints.solved = {h};
        frame->constraints.branch = BranchSigns{{BranchSign::minus}};
        frame->constraints.finalize(*split);
        model.frames.emplace(frame->name, frame);
    }

    // Radial frame: reference r, hhat(r, l) = sqrt(2m(E - U) - l^2 / r^2).
    {
        ScalarField h;
        h.label = "h_radial";
        h.eval = [kinetic](const PhasePoint& z) {
            const double r = z.coords[R], l = z.coords[L];
            const double A = kinetic(r);
            return guarded_sqrt(A - l * l / (r * r), A, 1e-10,
                                "radial-frame momentum solve");
        };
        h.grad = [kinetic, m, alpha](const PhasePoint& z) {
            const double r = z.coords[R], l = z.coords[L];
            const double A = kinetic(r);
            const double root = guarded_sqrt(A - l * l / (r * r), A, 1e-10,
                                             "radial-frame momentum solve");
            Vector g = Vector::Zero(4);
            g[R] = (-2.0 * m * alpha / (r * r) + 2.0 * l * l / (r * r * r)) / (2.0 * root);
            g[L] = -l / (r * r * root);
            return g;
        };

        auto split = std::make_shared<const CoordinateSplit>(pairs, std::vector<std::size_t>{0});
        auto frame = std::make_shared<GaugeFrame>();
        frame->name = "radial";
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

// Closed-form orbit geometry and reference maps for the Kepler model,
// expressed through the scales r0 (potential) and r1 (energy) of the negative
// angular momentum branch.
namespace kepler_closed {

// r0 with 2 m U / l^2 = -2 / (r0 r):  r0 = l^2 / (m alpha).
inline double r0_scale(const KeplerParams& k, double l) {
    return l * l / (k.m * k.alpha);
}

// r1 with 2 m E / l^2 = 1 / r1^2 - 1 / r0^2.
inline double r1_scale(const KeplerParams& k, double l) {
    const double r0 = r0_scale(k, l);
    const double inv_sq = 2.0 * k.m * k.energy / (l * l) + 1.0 / (r0 * r0);
    return 1.0 / std::sqrt(inv_sq);
}

// Impact parameter b = r0 / (1 + r1 / r0).
inline double impact_parameter(const KeplerParams& k, double l) {
    const double r0 = r0_scale(k, l);
    const double r1 = r1_scale(k, l);
    return r0 / (1.0 + r1 / r0);
}

// Orbit shape parameter F = r1 (1/r - 1/r0).
inline double shape_parameter(const KeplerParams& k, double r, double l) {
    return r1_scale(k, l) * (1.0 / r - 1.0 / r0_scale(k, l));
}

// Angle observable in the radial frame directly from the orbit equation:
// Phi_hat = phi - arccos(F(r)) + arccos(r1 (1/khat - 1/r0)).
inline double phi_hat(const KeplerParams& k, double r, double phi, double l,
                      double khat_value) {
    const double r0 = r0_scale(k, l);
    const double r1 = r1_scale(k, l);
    const double here = clamped_acos(r1 * (1.0 / r - 1.0 / r0), 1e-9, "phi_hat");
    const double there = clamped_acos(r1 * (1.0 / khat_value - 1.0 / r0), 1e-9, "phi_hat");
    return phi - here + there;
}

// Radius observable in the angular frame (the orbit shape):
// R = r1 / (r1/r + F (cos(phi - k) - 1) + sqrt(1 - F^2) sin(phi - k)).
inline double shape(const KeplerParams& k, double r, double phi, double l,
                    double k_value) {
    const double r1 = r1_scale(k, l);
    const double F = shape_parameter(k, r, l);
    const double delta = phi - k_value;
    const double root = std::sqrt(std::max(1.0 - F * F, 0.0));
    const double denom = r1 / r + F * (std::cos(delta) - 1.0) + root * std::sin(delta);
    return r1 / denom;
}

// Angular -> radial transformation of the true sector (R, P): the image angle
// from the orbit equation and the image momentum L = -h(R, P).
inline Vector rrft_image(const KeplerParams& k, const Vector& qp, double k_value,
                         double khat_value) {
    const double R = qp[0], P = qp[1];
    const double A = 2.0 * k.m * (k.energy + k.alpha / R);
    const double h = std::sqrt((A - P * P) * R * R);
    const double l = -h;
    Vector out(2);
    out[0] = phi_hat(k, R, k_value, l, khat_value);
    out[1] = l;
    return out;
}

// Both reduced Hamiltonians of the transformation at clock rates kdot, khatdot
// and radial cut value khat: the pulled-back radial one and the angular one.
inline std::pair<double, double> reduced_pair(const KeplerParams& k, const Vector& qp,
                                              double kdot, double khatdot,
                                              double khat_value) {
    const double R = qp[0], P = qp[1];
    const double A_here = 2.0 * k.m * (k.energy + k.alpha / R);
    const double h_sq = (A_here - P * P) * R * R;
    const double A_cut = 2.0 * k.m * (k.energy + k.alpha / khat_value);
    const double pulled =
        khatdot * std::sqrt(A_cut - h_sq / (khat_value * khat_value));
    const double direct = kdot * std::sqrt(h_sq);
    return {pulled, direct};
}

}  // namespace kepler_closed

}  // namespace gaugeframe
