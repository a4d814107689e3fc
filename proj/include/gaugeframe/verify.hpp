#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "gaugeframe/models/energy_constrained.hpp"
#include "gaugeframe/models/kepler.hpp"
#include "gaugeframe/models/lattice_pft.hpp"
#include "gaugeframe/models/linear_toy.hpp"
#include "gaugeframe/models/relativistic_particle.hpp"
#include "gaugeframe/relational.hpp"
#include "gaugeframe/rrft.hpp"

namespace gaugeframe {

// One verified property: its worst observed error against the tolerance it
// must meet, and how many sample points contributed.
struct VerificationCheck {
    std::string name;
    double max_error = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    int samples = 0;
};

struct VerificationReport {
    std::string model;
    std::vector<VerificationCheck> checks;

    void add(const std::string& name, double max_error, double tolerance,
             int samples) {
        checks.push_back({name, max_error, tolerance, max_error <= tolerance,
                          samples});
    }
    bool overall_pass() const {
        return std::all_of(checks.begin(), checks.end(),
                           [](const VerificationCheck& c) { return c.pass; });
    }
    const VerificationCheck* find(const std::string& name) const {
        for (const auto& c : checks) {
            if (c.name == name) return &c;
        }
        return nullptr;
    }
};

namespace verify_detail {

// Tight integrator settings for checks that finite-difference across flows,
// where the default integration noise would dominate the difference quotient.
inline Tolerances tight_tolerances() {
    Tolerances tol;
    tol.rtol = 1e-12;
    tol.atol = 1e-14;
    return tol;
}

// True-sector sample for the particle's temporal frame: (q^1..q^D, p_1..p_D)
// with p_1 < 0 so both frame branches admit the point.
inline Vector sample_particle_state(DeterministicRng& rng, int dim) {
    Vector qp(2 * dim);
    for (int a = 0; a < dim; ++a) {
        qp[a] = rng.uniform(-2.0, 2.0);
    }
    qp[dim] = rng.uniform(-2.5, -0.3);
    for (int a = 1; a < dim; ++a) {
        qp[dim + a] = rng.uniform(-1.5, 1.5);
    }
    return qp;
}

// Central difference of a scalar function along a direction.
template <typename Fn>
double directional_derivative(Fn&& fn, const PhasePoint& z, const Vector& v,
                              double eps) {
    PhasePoint plus = z, minus = z;
    plus.coords += eps * v;
    minus.coords -= eps * v;
    return (fn(plus) - fn(minus)) / (2.0 * eps);
}

// Difference between the geometric (single constraint flow) and Hamiltonian
// (reduced ODE) evolution routes over [t0, t1].
inline double route_equivalence_error(const std::shared_ptr<const GaugeFrame>& frame,
                                      const Vector& qp0, double t0, double t1,
                                      const Tolerances& tol = {}) {
    const Vector geometric = evolve_geometric(frame, qp0, t0, t1, tol);
    const Trajectory traj = evolve_hamiltonian(*frame, qp0, t0, t1, 2, tol);
    return (geometric - traj.states.back()).lpNorm<Eigen::Infinity>();
}

inline double spread(const std::vector<double>& values) {
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    return *hi - *lo;
}

}  // namespace verify_detail

// ---------------------------------------------------------------------------
// Relativistic particle
// ---------------------------------------------------------------------------

inline VerificationReport verify_particle(const RelativisticParticleParams& params,
                                          std::uint64_t seed = 20260823,
                                          const Tolerances& tol = {}) {
    using namespace verify_detail;
    const int D = params.dim;
    ModelSystem model = make_relativistic_particle(params);
    const auto temporal = model.frame("temporal");
    const auto spatial = model.frame("spatial");
    DeterministicRng rng(seed);

    VerificationReport report;
    report.model = model.kind;

    // Relational observables of the spatial positions against the closed form.
    {
        const int n = 100;
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            const Vector qp = sample_particle_state(rng, D);
            const double t_embed = rng.uniform(-1.0, 1.0);
            const double t0 = rng.uniform(-1.0, 1.0);
            const PhasePoint z = embed_at_cut(*temporal, t_embed, qp);
            for (int a = 1; a <= D; ++a) {
                RelationalObservable obs{
                    coordinate_field(model.pairs, static_cast<std::size_t>(a),
                                     "K" + std::to_string(a)),
                    temporal};
                const double flowed = evaluate_observable(obs, t0, z, tol);
                const double closed = particle_closed::observable_q(
                    params, z, temporal->clocks[0].value(t0), a);
                worst = std::max(worst, std::abs(flowed - closed));
            }
        }
        report.add("oracle_obs", worst, 1e-8, n);
    }

    // Temporal -> spatial frame transformation against the closed form, its
    // round trip, its symplecticity, and the pulled-back Hamiltonian.
    {
        const int n = 100;
        double worst_map = 0.0, worst_round = 0.0, worst_pull = 0.0;
        double min_h = std::numeric_limits<double>::infinity();
        double min_pull = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            const Vector qp = sample_particle_state(rng, D);
            const double t_a = rng.uniform(-1.0, 1.0);
            const double t_b = rng.uniform(-1.0, 1.0);
            FrameMap map{FramePair(temporal, spatial), t_a, t_b};
            const Vector image = apply_rrft(map, qp, tol);
            const Vector closed = particle_closed::rrft_image(
                params, qp, temporal->clocks[0].value(t_a),
                spatial->clocks[0].value(t_b));
            worst_map = std::max(worst_map,
                                 (image - closed).lpNorm<Eigen::Infinity>());

            const Vector back = apply_rrft(invert_rrft(map), image, tol);
            worst_round = std::max(worst_round,
                                   (back - qp).lpNorm<Eigen::Infinity>());

            const PullbackResult pb = pullback_hamiltonian(map, qp, t_b, tol);
            const double closed_pull =
                particle_closed::pullback(spatial->clocks[0].rate(t_b), qp, D);
            worst_pull = std::max(worst_pull, std::abs(pb.h_b_pullback - closed_pull));
            min_h = std::min(min_h, pb.h_a);
            min_pull = std::min(min_pull, std::abs(pb.h_b_pullback));
        }
        report.add("oracle_rrft", worst_map, 1e-6, n);
        report.add("roundtrip", worst_round, 1e-7, n);
        report.add("pullback", worst_pull, 1e-8, n);
        // h stays at or above the rest mass; the pulled-back generator dips
        // below it, which is the range separation between the two frames.
        report.add("h_lower_bound", std::max(0.0, params.mass - min_h), 1e-9, n);
        report.add("pullback_below_mass", std::max(0.0, min_pull - params.mass),
                   1e-9, n);
    }

    {
        const int n = 10;
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            const Vector qp = sample_particle_state(rng, D);
            FrameMap map{FramePair(temporal, spatial), rng.uniform(-1.0, 1.0),
                         rng.uniform(-1.0, 1.0)};
            // A short difference step keeps the truncation error of the
            // Jacobian well under the tolerance even near shallow momenta.
            worst = std::max(worst,
                             check_symplectic(map, qp, tight_tolerances(), 1e-4));
        }
        report.add("symplectic", worst, 1e-6, n);
    }

    // Observable-map properties: invariance along the constraint direction,
    // the reference field landing on its clock, canonical true-sector
    // brackets, and t-independence of the Dirac bracket.
    {
        const int n = 50;
        const Tolerances tight = tight_tolerances();
        double worst = 0.0;
        RelationalObservable obs{coordinate_field(model.pairs, 1, "K1"), temporal};
        const double t0 = 0.4;
        for (int i = 0; i < n; ++i) {
            const Vector qp = sample_particle_state(rng, D);
            const PhasePoint z = embed_at_cut(*temporal, rng.uniform(-1.0, 1.0), qp);
            Vector v = hamiltonian_rhs(temporal->constraints.cbar[0], z, 0.0);
            v /= v.norm();
            const double d = directional_derivative(
                [&](const PhasePoint& p) {
                    return evaluate_observable(obs, t0, p, tight);
                },
                z, v, 1e-4);
            worst = std::max(worst, std::abs(d));
        }
        report.add("gauge_invariance", worst, 1e-6, n);
    }

    {
        const int n = 100;
        double worst = 0.0;
        RelationalObservable obs{coordinate_field(model.pairs, 0, "K0"), temporal};
        for (int i = 0; i < n; ++i) {
            const Vector qp = sample_particle_state(rng, D);
            const double t_embed = rng.uniform(-1.0, 1.0);
            const double t0 = rng.uniform(-1.0, 1.0);
            const PhasePoint z = embed_at_cut(*temporal, t_embed, qp);
            const double value = evaluate_observable(obs, t0, z, tol);
            worst = std::max(worst, std::abs(value - temporal->clocks[0].value(t0)));
        }
        report.add("observable_reference", worst, 1e-10, n);
    }

    {
        const int n = D == 1 ? 10 : 5;
        const Tolerances tight = tight_tolerances();
        const double t0 = 0.3;
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            const Vector qp = sample_particle_state(rng, D);
            const PhasePoint z = embed_at_cut(*temporal, rng.uniform(-0.5, 0.5), qp);
            for (std::size_t a = 0; a < temporal->split->n_true(); ++a) {
                for (std::size_t b = 0; b < temporal->split->n_true(); ++b) {
                    RelationalObservable oq{
                        coordinate_field(model.pairs, temporal->split->q_index(a),
                                         "q" + std::to_string(a)),
                        temporal};
                    RelationalObservable op{
                        coordinate_field(model.pairs, temporal->split->p_index(b),
                                         "p" + std::to_string(b)),
                        temporal};
                    // Momentum-first ordering matches the bracket sign
                    // convention, where a pair satisfies {p, q} = +1.
                    const double bracket = poisson_bracket(
                        observable_field(op, t0, tight),
                        observable_field(oq, t0, tight), z, 1e-4);
                    const double expected = a == b ? 1.0 : 0.0;
                    worst = std::max(worst, std::abs(bracket - expected));
                }
            }
        }
        report.add("canonical_pair", worst, 1e-6, n);
    }

    {
        const int n = 20;
        double worst = 0.0;
        const ScalarField f = coordinate_field(model.pairs, 1, "K1");
        const ScalarField g = coordinate_field(
            model.pairs, model.pairs->momentum_index(1), "M1");
        for (int i = 0; i < n; ++i) {
            const Vector qp = sample_particle_state(rng, D);
            const PhasePoint z = embed_at_cut(*temporal, rng.uniform(-1.0, 1.0), qp);
            const double d1 = dirac_bracket(f, g, *temporal, 0.3, z);
            const double d2 = dirac_bracket(f, g, *temporal, 1.7, z);
            worst = std::max(worst, std::abs(d1 - d2));
        }
        report.add("dirac_t_independence", worst, 1e-9, n);
    }

    // Fluctuation paradox: the frame's own reference field is mapped to the
    // constant clock value, while the other frame's map of the same
    // kinematical function genuinely varies over phase space.
    {
        const int n = 100;
        std::vector<double> own, other;
        RelationalObservable ref_temporal{coordinate_field(model.pairs, 0, "K0"),
                                          temporal};
        RelationalObservable ref_spatial{coordinate_field(model.pairs, 0, "K0"),
                                         spatial};
        const double t0 = 0.7, that0 = 0.4;
        for (int i = 0; i < n; ++i) {
            const Vector qp = sample_particle_state(rng, D);
            const PhasePoint z = embed_at_cut(*temporal, rng.uniform(-1.0, 1.0), qp);
            own.push_back(evaluate_observable(ref_temporal, t0, z, tol));
            other.push_back(evaluate_observable(ref_spatial, that0, z, tol));
        }
        report.add("paradox_reference_spread", spread(own), 1e-10, n);
        report.add("paradox_alternate_spread",
                   std::max(0.0, 0.1 - spread(other)), 1e-9, n);
    }

    {
        const Vector qp0 = sample_particle_state(rng, D);
        const double err =
            route_equivalence_error(temporal, qp0, 0.0, 1.0, tol);
        report.add("route_equivalence", err, 1e-7, 1);
    }

    return report;
}

// ---------------------------------------------------------------------------
// Kepler scattering
// ---------------------------------------------------------------------------

namespace verify_detail {

// In-domain Kepler sample: (r, p) on the ingoing clockwise branch with the
// angular momentum recovered from the angular frame's solved constraint.
inline void sample_kepler_state(DeterministicRng& rng, const KeplerParams& params,
                                double& r, double& phi, double& p, double& l) {
    l = rng.uniform(-3.0, -1.5);
    r = rng.uniform(3.5, 5.5);
    phi = rng.uniform(1.5, 4.5);
    const double radicand =
        2.0 * params.m * (params.energy + params.alpha / r) - l * l / (r * r);
    p = -std::sqrt(radicand);
}

}  // namespace verify_detail

inline VerificationReport verify_kepler(const KeplerParams& params,
                                        std::uint64_t seed = 20260823,
                                        const Tolerances& tol = {}) {
    using namespace verify_detail;
    ModelSystem model = make_kepler(params);
    const auto angular = model.frame("angular");
    const auto radial = model.frame("radial");
    DeterministicRng rng(seed);

    VerificationReport report;
    report.model = model.kind;

    // Closed-form oracles: the angle observable in the radial frame, the
    // orbit-shape observable in the angular frame, the frame transformation,
    // and the two reduced Hamiltonians.
    {
        const int n = 50;
        double worst_phi = 0.0, worst_shape = 0.0, worst_map = 0.0, worst_h = 0.0;
        const double khat = 4.0;  // radial cut r = khat at t_b = 4
        for (int i = 0; i < n; ++i) {
            double r, phi, p, l;
            sample_kepler_state(rng, params, r, phi, p, l);

            // Angle observable: flow (r, phi, p, l) to the radial cut.
            {
                RelationalObservable obs{coordinate_field(model.pairs, 1, "phi"),
                                         radial};
                Vector coords(4);
                coords << r, phi, p, l;
                const PhasePoint z{coords, model.pairs};
                const double flowed = evaluate_observable(obs, khat, z, tol);
                const double closed =
                    kepler_closed::phi_hat(params, r, phi, l, khat);
                worst_phi = std::max(worst_phi, std::abs(flowed - closed));
            }

            // Shape observable: flow to the angular cut phi = k and read r.
            {
                RelationalObservable obs{coordinate_field(model.pairs, 0, "r"),
                                         angular};
                Vector coords(4);
                coords << r, phi, p, l;
                const PhasePoint z{coords, model.pairs};
                const double k_target = phi + rng.uniform(-0.3, 0.3);
                const double flowed = evaluate_observable(obs, k_target, z, tol);
                const double closed =
                    kepler_closed::shape(params, r, phi, l, k_target);
                worst_shape = std::max(worst_shape, std::abs(flowed - closed));
            }

            // Frame transformation (R, P) -> (Phi_hat, L) and Hamiltonians.
            {
                Vector qp(2);
                qp << r, p;
                FrameMap map{FramePair(angular, radial), phi, khat};
                const Vector image = apply_rrft(map, qp, tol);
                const Vector closed =
                    kepler_closed::rrft_image(params, qp, phi, khat);
                worst_map = std::max(worst_map,
                                     (image - closed).lpNorm<Eigen::Infinity>());

                const PullbackResult pb = pullback_hamiltonian(map, qp, khat, tol);
                const auto [pulled, direct] = kepler_closed::reduced_pair(
                    params, qp, angular->clocks[0].rate(khat),
                    radial->clocks[0].rate(khat), khat);
                worst_h = std::max(worst_h, std::abs(pb.h_a - direct));
                worst_h = std::max(worst_h, std::abs(pb.h_b_pullback - pulled));
            }
        }
        report.add("oracle_phi_hat", worst_phi, 1e-6, n);
        report.add("oracle_shape", worst_shape, 1e-6, n);
        report.add("oracle_rrft", worst_map, 1e-6, n);
        report.add("oracle_hamiltonians", worst_h, 1e-6, n);
    }

    // Frame equivalence: both frames' reduced evolutions of one orbit carry
    // the same conserved pair (g, l), with drift bounded along each.  The arc
    // spans 2 radians of true anomaly and stays on the pre-periapsis branch.
    {
        Tolerances evolve_tol = tol;
        evolve_tol.rtol = std::min(evolve_tol.rtol, 1e-12);
        evolve_tol.atol = std::min(evolve_tol.atol, 1e-14);
        const double l = -1.2;
        const double r0 = kepler_closed::r0_scale(params, l);
        const double r1 = kepler_closed::r1_scale(params, l);
        // Endpoints of the arc in terms of acos F: from just outside periapsis
        // out toward (but short of) the asymptote, spanning 2 radians of phi.
        const double acos_lo = 0.2, acos_hi = 2.2;
        const double phi_lo = 1.0, phi_hi = phi_lo + (acos_hi - acos_lo);
        const double r_lo = 1.0 / (std::cos(acos_lo) / r1 + 1.0 / r0);
        const double r_hi = 1.0 / (std::cos(acos_hi) / r1 + 1.0 / r0);
        const double p_lo = (l / r1) * std::sin(acos_lo);
        const int n_samples = 21;

        auto conserved_g = [&](double r, double phi, double l_value) {
            const double F = kepler_closed::shape_parameter(params, r, l_value);
            return phi - clamped_acos(F, 1e-9, "verify_kepler conserved g");
        };

        // Angular frame: state (r, p), clock phi = t, r growing with phi.
        Vector qp_ang(2);
        qp_ang << r_lo, p_lo;
        const Trajectory ang = evolve_hamiltonian(*angular, qp_ang, phi_lo,
                                                  phi_hi, n_samples, evolve_tol);
        std::vector<double> g_ang, l_ang;
        for (int i = 0; i < n_samples; ++i) {
            const double r = ang.states[i][0];
            const double l_value = -angular->constraints.solved[0].eval(
                embed_at_cut(*angular, ang.times[i], ang.states[i]));
            g_ang.push_back(conserved_g(r, ang.times[i], l_value));
            l_ang.push_back(l_value);
        }

        // Radial frame: state (phi, l), clock r = r_hi - t running back in.
        auto radial_run = std::make_shared<GaugeFrame>(*radial);
        radial_run->clocks = {GaugeClock::linear(r_hi, -1.0)};
        Vector qp_rad(2);
        qp_rad << phi_hi, l;
        const Trajectory rad = evolve_hamiltonian(*radial_run, qp_rad, 0.0,
                                                  r_hi - r_lo, n_samples,
                                                  evolve_tol);
        std::vector<double> g_rad, l_rad;
        for (int i = 0; i < n_samples; ++i) {
            const double r = radial_run->clocks[0].value(rad.times[i]);
            g_rad.push_back(conserved_g(r, rad.states[i][0], rad.states[i][1]));
            l_rad.push_back(rad.states[i][1]);
        }

        const double drift_g = std::max(spread(g_ang), spread(g_rad));
        const double drift_l = std::max(spread(l_ang), spread(l_rad));
        const double cross_g = std::abs(g_ang.front() - g_rad.front());
        const double cross_l = std::abs(l_ang.back() - l_rad.back());
        report.add("frame_equivalence_g", cross_g, 1e-6, n_samples);
        report.add("frame_equivalence_l", cross_l, 1e-6, n_samples);
        report.add("conserved_drift_g", drift_g, 1e-7, n_samples);
        report.add("conserved_drift_l", drift_l, 1e-7, n_samples);
    }

    {
        // This orbit's outgoing asymptote sits near phi = 2.28, so the span
        // stops at 2.0 while r is still finite (about 13.1).
        Vector qp0(2);
        qp0 << 4.8, -0.9;
        const double err = route_equivalence_error(angular, qp0, 1.5, 2.0, tol);
        report.add("route_equivalence", err, 1e-7, 1);
    }

    return report;
}

// ---------------------------------------------------------------------------
// Linear toy
// ---------------------------------------------------------------------------

inline VerificationReport verify_linear_toy(std::uint64_t seed = 20260823,
                                            const Tolerances& tol = {}) {
    using namespace verify_detail;
    ModelSystem model = make_linear_toy(LinearToyParams{});
    const auto direct = model.frame("direct");
    const auto swapped = model.frame("swapped");
    DeterministicRng rng(seed);

    VerificationReport report;
    report.model = model.kind;

    {
        const int n = 50;
        double worst_obs = 0.0, worst_map = 0.0;
        RelationalObservable obs{coordinate_field(model.pairs, 0, "q"), direct};
        for (int i = 0; i < n; ++i) {
            Vector coords(4);
            coords << rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0),
                rng.uniform(-2.0, 2.0), 0.0;
            coords[3] = -coords[2];  // constraint surface y = -p
            const PhasePoint z{coords, model.pairs};
            const double t0 = rng.uniform(-1.0, 1.0);
            const double flowed = evaluate_observable(obs, t0, z, tol);
            const double closed =
                toy_closed::observable_q(coords[0], coords[1], t0);
            worst_obs = std::max(worst_obs, std::abs(flowed - closed));

            Vector qp(2);
            qp << coords[0], coords[2];
            const double t_a = rng.uniform(-1.0, 1.0);
            const double t_b = rng.uniform(-1.0, 1.0);
            FrameMap map{FramePair(direct, swapped), t_a, t_b};
            const Vector image = apply_rrft(map, qp, tol);
            const Vector closed_map = toy_closed::rrft_image(qp, t_a, t_b);
            worst_map = std::max(worst_map,
                                 (image - closed_map).lpNorm<Eigen::Infinity>());
        }
        report.add("oracle_obs", worst_obs, 1e-10, n);
        report.add("oracle_rrft", worst_map, 1e-10, n);
    }

    // With the second clock reparametrized to run backwards, khat(t) = -k(t),
    // the two frames' reduced Hamiltonians agree pointwise.
    {
        const int n = 25;
        auto swapped_neg = std::make_shared<GaugeFrame>(*swapped);
        swapped_neg->clocks = {GaugeClock::linear(0.0, -1.0)};
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            Vector qp(2);
            qp << rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0);
            const double t = rng.uniform(-1.0, 1.0);
            FrameMap map{FramePair(direct, swapped_neg), t, t};
            const PullbackResult pb = pullback_hamiltonian(map, qp, t, tol);
            worst = std::max(worst, std::abs(pb.h_a - pb.h_b_pullback));
        }
        report.add("reduced_reparametrization", worst, 1e-10, n);
    }

    {
        Vector qp0(2);
        qp0 << 0.5, -0.7;
        const double err = route_equivalence_error(direct, qp0, 0.0, 1.0, tol);
        report.add("route_equivalence", err, 1e-7, 1);
    }

    return report;
}

// ---------------------------------------------------------------------------
// Energy-constrained generic system
// ---------------------------------------------------------------------------

inline VerificationReport verify_energy_constrained(
    const EnergyConstrainedParams& params, std::uint64_t seed = 20260823,
    const Tolerances& tol = {}) {
    using namespace verify_detail;
    ModelSystem model = make_energy_constrained(params);
    const auto frame = model.frame("reference");
    DeterministicRng rng(seed);

    VerificationReport report;
    report.model = model.kind;

    // The default instance solves in closed form: h = sqrt(2(E - U) - p^2)
    // for the flat two-pair case, verified against the Newton solution.
    if (!params.metric && !params.potential && params.dim == 2) {
        const int n = 25;
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            Vector coords = Vector::Zero(4);
            coords[0] = rng.uniform(-1.0, 1.0);
            coords[1] = rng.uniform(-1.0, 1.0);
            coords[3] = rng.uniform(-0.9, 0.9);
            const PhasePoint z{coords, model.pairs};
            const double h = frame->constraints.solved[0].eval(z);
            const double closed =
                std::sqrt(2.0 * params.energy - coords[3] * coords[3]);
            worst = std::max(worst, std::abs(h - closed));
        }
        report.add("circle_solved_form", worst, 1e-10, n);
    }

    // The same machinery with the Kepler metric and potential reproduces the
    // Kepler constraint surface.
    {
        const int n = 100;
        const KeplerParams kepler;
        EnergyConstrainedParams spec;
        spec.dim = 2;
        spec.energy = kepler.energy;
        spec.potential = [kepler](const Vector& K) { return -kepler.alpha / K[0]; };
        spec.metric = [kepler](const Vector& K) {
            Matrix g = Matrix::Zero(2, 2);
            g(0, 0) = 1.0 / kepler.m;
            g(1, 1) = 1.0 / (kepler.m * K[0] * K[0]);
            return g;
        };
        spec.reference = 0;
        spec.branch = BranchSign::minus;
        ModelSystem specialized = make_energy_constrained(spec);
        ModelSystem reference = make_kepler(kepler);
        const auto radial = reference.frame("radial");

        DeterministicRng krng(seed ^ 0x9e3779b97f4a7c15ull);
        double worst_residual = 0.0, worst_h = 0.0;
        for (int i = 0; i < n; ++i) {
            double r, phi, p, l;
            sample_kepler_state(krng, kepler, r, phi, p, l);
            Vector coords(4);
            coords << r, phi, p, l;
            const PhasePoint z_kepler{coords, reference.pairs};
            const PhasePoint z_energy{coords, specialized.pairs};
            worst_residual =
                std::max(worst_residual,
                         std::abs(specialized.frame("reference")
                                      ->constraints.raw[0]
                                      .eval(z_energy)));
            const double h_energy =
                specialized.frame("reference")->constraints.solved[0].eval(z_energy);
            const double h_kepler = radial->constraints.solved[0].eval(z_kepler);
            worst_h = std::max(worst_h, std::abs(h_energy - h_kepler));
        }
        report.add("kepler_specialization", worst_residual, 1e-12, n);
        report.add("kepler_solved_match", worst_h, 1e-10, n);
    }

    {
        Vector qp0 = Vector::Zero(2 * (params.dim - 1));
        for (Eigen::Index i = 0; i < qp0.size(); ++i) {
            qp0[i] = 0.3 + 0.1 * static_cast<double>(i);
        }
        const double err = route_equivalence_error(frame, qp0, 0.0, 1.0, tol);
        report.add("route_equivalence", err, 1e-7, 1);
    }

    return report;
}

// ---------------------------------------------------------------------------
// Lattice parametrized field theory
// ---------------------------------------------------------------------------

namespace verify_detail {

struct LatticePacket {
    Vector phi;
    Vector pi;
};

// The reference continuum data used across refinements: offset Gaussians for
// phi and pi, scaled to the physical lattice extent so the truncated supports
// stay well inside the guard band (the offset keeps the boost residual
// integrals nonzero).
inline LatticePacket reference_packet(const LatticeLayout& layout) {
    const double extent = layout.sites * layout.spacing;
    Vector phi_center(layout.dim), pi_center(layout.dim);
    phi_center.setConstant(-extent / 50.0);
    pi_center.setConstant(extent / 50.0);
    LatticePacket packet;
    packet.phi = gaussian_packet(layout, phi_center, extent / 20.0, 1.0, 7.0);
    packet.pi = gaussian_packet(layout, pi_center, extent / 24.0, 0.5, 7.0);
    return packet;
}

inline double convergence_order_deviation(const std::vector<double>& residuals) {
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < residuals.size(); ++i) {
        const double order = std::log2(residuals[i] / residuals[i + 1]);
        worst = std::max(worst, std::abs(order - 2.0));
    }
    return worst;
}

}  // namespace verify_detail

inline VerificationReport verify_lattice_pft(const LatticePftParams& params,
                                             std::uint64_t /*seed*/ = 20260823,
                                             const Tolerances& tol = {}) {
    using namespace verify_detail;
    ModelSystem model = make_lattice_pft(params);
    const LatticeLayout layout = lattice_layout(model);
    const auto S = static_cast<Eigen::Index>(layout.n_sites());

    VerificationReport report;
    report.model = model.kind;

    // Co-normal identities at every site of a deliberately curved embedding.
    {
        auto wiggle = [&](const Vector& z) {
            Vector x(layout.n_embedding());
            if (layout.dim == 1) {
                x << 0.4 * z[0] + 0.3 * std::sin(1.3 * z[0]),
                    1.1 * z[0] + 0.2 * std::cos(0.9 * z[0]);
            } else {
                x << 0.3 * z[0] - 0.2 * z[1] + 0.25 * std::sin(z[0] + 0.4 * z[1]),
                    1.05 * z[0] + 0.15 * std::cos(0.7 * z[1]),
                    0.95 * z[1] + 0.1 * std::sin(1.1 * z[0]);
            }
            return x;
        };
        const PhasePoint z = lattice_point(model, wiggle, Vector::Zero(S),
                                           Vector::Zero(S));
        double worst_tangency = 0.0, worst_norm = 0.0;
        Matrix eta = Matrix::Identity(layout.n_embedding(), layout.n_embedding());
        eta(0, 0) = -1.0;
        for (std::size_t s = 0; s < layout.n_sites(); ++s) {
            const LatticeGeometry geo = lattice_geometry(layout, z.coords, s);
            for (int a = 0; a < layout.dim; ++a) {
                worst_tangency = std::max(
                    worst_tangency, std::abs(geo.normal.dot(geo.deriv.col(a))));
            }
            const double norm_defect =
                geo.normal.dot(eta.inverse() * geo.normal) + geo.det;
            worst_norm = std::max(worst_norm, std::abs(norm_defect));
        }
        report.add("conormal_tangency", worst_tangency, 1e-12,
                   static_cast<int>(layout.n_sites()));
        report.add("conormal_norm", worst_norm, 1e-12,
                   static_cast<int>(layout.n_sites()));
    }

    const PftGenerators gen = pft_generators(model);
    const LatticePacket packet = reference_packet(layout);
    auto rest = [&](const Vector& z) {
        Vector x = Vector::Zero(static_cast<Eigen::Index>(layout.n_embedding()));
        x.tail(layout.dim) = z;
        return x;
    };

    {
        const PhasePoint empty = lattice_point(model, rest, Vector::Zero(S),
                                               Vector::Zero(S));
        const double worst = std::max({std::abs(gen.hamiltonian.eval(empty)),
                                       std::abs(gen.momentum[0].eval(empty)),
                                       std::abs(gen.boost.eval(empty))});
        report.add("generators_zero", worst, 1e-15, 1);
    }

    // Reduced-Hamiltonian covariance: every inertial frame reproduces the
    // flat-slice matter Hamiltonian of its own cut data.
    {
        Vector qp(2 * S);
        qp.head(S) = packet.phi;
        qp.tail(S) = packet.pi;
        const PhasePoint flat = lattice_point(model, rest, packet.phi, packet.pi);
        const double flat_h = gen.hamiltonian.eval(flat);
        const double scale = std::max(1.0, std::abs(flat_h));
        const double t0 = 0.35;
        const double identity_err =
            std::abs(reduced_hamiltonian(*model.frame("identity"), t0, qp) - flat_h);
        const auto boosted =
            pft_inertial_frame(model, pft_boost_matrix(0.3, layout.dim), "boost");
        const double boost_err =
            std::abs(reduced_hamiltonian(*boosted, t0, qp) - flat_h);
        report.add("frame_covariance_identity", identity_err / scale, 1e-12, 1);
        report.add("frame_covariance_boost", boost_err / scale, 1e-12, 1);
    }

    {
        const BoostCheck zero =
            verify_boost_hamiltonian(model, 0.0, packet.phi, packet.pi, tol);
        report.add("boost_zero_exact", zero.absolute, 1e-15, 1);
    }

    // Refinement triple at fixed physical size: the lattice commutators
    // {kappa_B, h} - p and {kappa_B, p} - h, and the flowed boost identity,
    // all converge at second order in the spacing.  The guard band keeps its
    // physical width across the three resolutions.
    if (params.dim == 1 && params.sites % 2 == 0 && params.sites >= 96) {
        std::vector<double> res_h, res_p, res_boost;
        for (const double factor : {2.0, 1.0, 0.5}) {
            LatticePftParams scaled = params;
            scaled.spacing = params.spacing * factor;
            scaled.sites = static_cast<int>(std::lround(params.sites / factor));
            scaled.guard_band = std::max(
                2, static_cast<int>(std::lround(params.guard_band / factor)));
            ModelSystem refined = make_lattice_pft(scaled);
            const LatticeLayout fine = lattice_layout(refined);
            const PftGenerators g = pft_generators(refined);
            const LatticePacket pk = reference_packet(fine);
            auto rest_fine = [&](const Vector& z) {
                Vector x =
                    Vector::Zero(static_cast<Eigen::Index>(fine.n_embedding()));
                x.tail(fine.dim) = z;
                return x;
            };
            const PhasePoint z = lattice_point(refined, rest_fine, pk.phi, pk.pi);
            res_h.push_back(std::abs(poisson_bracket(g.boost, g.hamiltonian, z) -
                                     g.momentum[0].eval(z)));
            res_p.push_back(std::abs(poisson_bracket(g.boost, g.momentum[0], z) -
                                     g.hamiltonian.eval(z)));
            res_boost.push_back(
                verify_boost_hamiltonian(refined, 0.1, pk.phi, pk.pi, tol).absolute);
        }
        report.add("kappa_h_order", convergence_order_deviation(res_h), 0.3, 3);
        report.add("kappa_p_order", convergence_order_deviation(res_p), 0.3, 3);
        report.add("boost_deviation_order", convergence_order_deviation(res_boost),
                   0.3, 3);
    }

    return report;
}

// Dispatch a verification suite from whichever parameter block the model was
// built with.
inline VerificationReport run_verification(const ModelSystem& model,
                                           std::uint64_t seed = 20260823,
                                           const Tolerances& tol = {}) {
    return std::visit(
        [&](const auto& params) -> VerificationReport {
            using T = std::decay_t<decltype(params)>;
            if constexpr (std::is_same_v<T, RelativisticParticleParams>) {
                return verify_particle(params, seed, tol);
            } else if constexpr (std::is_same_v<T, KeplerParams>) {
                return verify_kepler(params, seed, tol);
            } else if constexpr (std::is_same_v<T, LinearToyParams>) {
                return verify_linear_toy(seed, tol);
            } else if constexpr (std::is_same_v<T, EnergyConstrainedParams>) {
                return verify_energy_constrained(params, seed, tol);
            } else {
                return verify_lattice_pft(std::get<LatticePftParams>(model.params),
                                          seed, tol);
            }
        },
        model.params);
}

}  // namespace gaugeframe
