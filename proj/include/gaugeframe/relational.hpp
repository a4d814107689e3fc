#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "gaugeframe/flow_engine.hpp"

namespace gaugeframe {

// Kinematical representative of true-sector values (q..., p...) on the cut at
// time t: reference fields sit at their clock values and reference momenta at
// y_I = -h_I.  The solved forms h_I never depend on any y, so the momenta can
// be filled in one pass.
inline PhasePoint embed_at_cut(const GaugeFrame& frame, double t, const Vector& qp) {
    PhasePoint z{Vector::Zero(static_cast<Eigen::Index>(frame.split->dim())),
                 frame.split->pairs()};
    frame.split->set_true_values(z, qp);
    for (std::size_t i = 0; i < frame.n_gauge(); ++i) {
        z.coords[static_cast<Eigen::Index>(frame.split->x_index(i))] =
            frame.clocks[i].value(t);
    }
    for (std::size_t i = 0; i < frame.n_gauge(); ++i) {
        z.coords[static_cast<Eigen::Index>(frame.split->y_index(i))] =
            -frame.constraints.solved[i].eval(z);
    }
    return z;
}

// A phase-space function paired with the frame whose cuts define its
// relational value.
struct RelationalObservable {
    ScalarField F;
    std::shared_ptr<const GaugeFrame> frame;
};

// Value of the observable map at clock time t: transport z along the frame's
// constraint orbit onto the cut x = k(t) and evaluate F there.
inline double evaluate_observable(const RelationalObservable& obs, double t,
                                  const PhasePoint& z, const Tolerances& tol = {}) {
    const PhasePoint on_cut = flow_to_cut(obs.frame, t, z, tol);
    const double v = obs.F.eval(on_cut);
    require_finite(v, "evaluate_observable");
    return v;
}

// The observable map at fixed t, packaged as a scalar field (gradients via
// finite differences of the transported evaluation).
inline ScalarField observable_field(const RelationalObservable& obs, double t,
                                    const Tolerances& tol = {}) {
    ScalarField f;
    f.label = "O[" + obs.F.label + "]";
    f.eval = [obs, t, tol](const PhasePoint& z) {
        return evaluate_observable(obs, t, z, tol);
    };
    return f;
}

// Reduced Hamiltonian h_s(q, p; t) = sum_I kdot^I(t) h_I(x = k(t); q, p).
inline double reduced_hamiltonian(const GaugeFrame& frame, double t, const Vector& qp) {
    const PhasePoint z = embed_at_cut(frame, t, qp);
    const Vector rates = frame.clock_rates(t);
    double h = 0.0;
    for (std::size_t i = 0; i < frame.n_gauge(); ++i) {
        const double rate = rates[static_cast<Eigen::Index>(i)];
        if (rate != 0.0) h += rate * frame.constraints.solved[i].eval(z);
    }
    require_finite(h, "reduced_hamiltonian");
    return h;
}

// True-sector equations of motion generated by the reduced Hamiltonian:
//   dq^a/dt = + dh_s/dp_a,   dp_a/dt = - dh_s/dq^a,
// assembled from the solved-constraint gradients at the embedded cut point
// (so analytic constraint gradients carry over to the reduced dynamics).
inline Vector reduced_rhs(const GaugeFrame& frame, double t, const Vector& qp,
                          const Tolerances& tol = {}) {
    const PhasePoint z = embed_at_cut(frame, t, qp);
    const Vector rates = frame.clock_rates(t);
    const std::size_t n = frame.n_true();
    Vector rhs = Vector::Zero(static_cast<Eigen::Index>(2 * n));
    for (std::size_t i = 0; i < frame.n_gauge(); ++i) {
        const double rate = rates[static_cast<Eigen::Index>(i)];
        if (rate == 0.0) continue;
        const Vector g = gradient(frame.constraints.solved[i], z, tol.fd_step);
        for (std::size_t a = 0; a < n; ++a) {
            const std::size_t pair = frame.split->true_pair(a);
            const double w =
                frame.split->pairs()->weights[static_cast<Eigen::Index>(pair)];
            rhs[static_cast<Eigen::Index>(a)] +=
                rate * w * g[static_cast<Eigen::Index>(frame.split->p_index(a))];
            rhs[static_cast<Eigen::Index>(n + a)] -=
                rate * w * g[static_cast<Eigen::Index>(frame.split->q_index(a))];
        }
    }
    return rhs;
}

// Sampled true-sector trajectory.
struct Trajectory {
    std::vector<double> times;
    std::vector<Vector> states;  // (q..., p...) per sample
    std::vector<std::string> labels;
};

// Integrate the reduced dynamics from t0 to t1, sampling uniformly
// (n_samples >= 2 includes both endpoints; the integrator restarts at each
// sample time so the reported states sit exactly on the grid).
inline Trajectory evolve_hamiltonian(const GaugeFrame& frame, const Vector& qp0,
                                     double t0, double t1, int n_samples,
                                     const Tolerances& tol = {}) {
    if (n_samples < 2) {
        throw ConfigError("evolve_hamiltonian: need at least two samples");
    }
    Trajectory traj;
    for (std::size_t a = 0; a < frame.n_true(); ++a) traj.labels.push_back(frame.split->q_label(a));
    for (std::size_t a = 0; a < frame.n_true(); ++a) traj.labels.push_back(frame.split->p_label(a));

    auto rhs = [&](double t, const Vector& qp) { return reduced_rhs(frame, t, qp, tol); };
    Vector qp = qp0;
    traj.times.push_back(t0);
    traj.states.push_back(qp);
    for (int j = 1; j < n_samples; ++j) {
        const double ta = t0 + (t1 - t0) * (j - 1) / (n_samples - 1);
        const double tb = t0 + (t1 - t0) * j / (n_samples - 1);
        if (tb != ta) {
            qp = integrate_adaptive(rhs, ta, tb, qp, tol.rtol, tol.atol);
        }
        traj.times.push_back(tb);
        traj.states.push_back(qp);
    }
    return traj;
}

// Geometric route for the same evolution: embed the state at the cut t0, flow
// along the constraint orbit onto the cut t1, and read off the true sector.
inline Vector evolve_geometric(const std::shared_ptr<const GaugeFrame>& frame,
                               const Vector& qp0, double t0, double t1,
                               const Tolerances& tol = {}) {
    if (t0 == t1) return qp0;
    const PhasePoint start = embed_at_cut(*frame, t0, qp0);
    const PhasePoint landed = flow_to_cut(frame, t1, start, tol);
    return frame->split->true_values(landed);
}

}  // namespace gaugeframe
