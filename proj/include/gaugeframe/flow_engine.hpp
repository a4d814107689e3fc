#pragma once

#include <memory>
#include <string>
#include <vector>

#include "gaugeframe/gauge_system.hpp"

namespace gaugeframe {

// Linear combination g^I cbar_I of a frame's solved constraints with frozen
// coefficients.  The coefficients are ordinary numbers along the whole flow;
// they never react to the moving point.
struct FlowGenerator {
    std::shared_ptr<const GaugeFrame> frame;
    Vector coefficients;

    ScalarField field() const {
        const auto fr = frame;
        const Vector g = coefficients;
        ScalarField f;
        f.label = "flow_generator";
        f.eval = [fr, g](const PhasePoint& z) {
            double v = 0.0;
            for (std::size_t i = 0; i < fr->constraints.cbar.size(); ++i) {
                const double gi = g[static_cast<Eigen::Index>(i)];
                if (gi != 0.0) v += gi * fr->constraints.cbar[i].eval(z);
            }
            return v;
        };
        bool analytic = true;
        for (const auto& c : fr->constraints.cbar) {
            analytic = analytic && c.has_analytic_grad();
        }
        if (analytic) {
            f.grad = [fr, g](const PhasePoint& z) {
                Vector sum = Vector::Zero(static_cast<Eigen::Index>(z.dim()));
                for (std::size_t i = 0; i < fr->constraints.cbar.size(); ++i) {
                    const double gi = g[static_cast<Eigen::Index>(i)];
                    if (gi != 0.0) sum += gi * fr->constraints.cbar[i].grad(z);
                }
                return sum;
            };
        }
        return f;
    }
};

// Hamiltonian vector field of `generator` contracted with the pair weights:
//   dposition_k/ds = +weight_k dG/dmomentum_k
//   dmomentum_k/ds = -weight_k dG/dposition_k
inline Vector hamiltonian_rhs(const ScalarField& generator, const PhasePoint& z,
                              double fd_step) {
    const Vector g = gradient(generator, z, fd_step);
    const PairStructure& pairs = *z.pairs;
    Vector rhs(g.size());
    for (std::size_t k = 0; k < pairs.n_pairs(); ++k) {
        const Eigen::Index qi = static_cast<Eigen::Index>(pairs.position_index(k));
        const Eigen::Index pi = static_cast<Eigen::Index>(pairs.momentum_index(k));
        const double w = pairs.weights[static_cast<Eigen::Index>(k)];
        rhs[qi] = w * g[pi];
        rhs[pi] = -w * g[qi];
    }
    return rhs;
}

// Flow of an arbitrary generator field from parameter s0 to s1.
inline PhasePoint hamiltonian_flow(const ScalarField& generator, const PhasePoint& z0,
                                   double s0, double s1, const Tolerances& tol = {}) {
    PhasePoint out = z0;
    if (s0 == s1) return out;
    auto rhs = [&](double, const Vector& y) {
        PhasePoint probe{y, z0.pairs};
        return hamiltonian_rhs(generator, probe, tol.fd_step);
    };
    out.coords = integrate_adaptive(rhs, s0, s1, z0.coords, tol.rtol, tol.atol);
    return out;
}

// Flow of the frozen-coefficient constraint combination for parameter s_final.
inline PhasePoint flow(const FlowGenerator& generator, const PhasePoint& z0,
                       double s_final, const Tolerances& tol = {}) {
    if (generator.coefficients.size() !=
        static_cast<Eigen::Index>(generator.frame->n_gauge())) {
        throw ConfigError("flow: generator coefficient count mismatch");
    }
    if (s_final == 0.0 || generator.coefficients.isZero(0.0)) {
        return z0;
    }
    return hamiltonian_flow(generator.field(), z0, 0.0, s_final, tol);
}

// Transport z0 along the constraint orbit onto the cut x^I = k^I(t).  The
// coefficients g^I = (k^I(t) - x^I(z0)) / weight_I are frozen before the flow,
// which then moves each reference field linearly onto its cut value at s = 1.
inline PhasePoint flow_to_cut(const std::shared_ptr<const GaugeFrame>& frame, double t,
                              const PhasePoint& z0, const Tolerances& tol = {}) {
    const std::size_t m = frame->n_gauge();
    Vector g(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t pair = frame->split->gauge_pair(i);
        const double w = frame->split->pairs()->weights[static_cast<Eigen::Index>(pair)];
        g[static_cast<Eigen::Index>(i)] =
            (frame->clocks[i].value(t) - frame->split->x(z0, i)) / w;
    }
    return flow(FlowGenerator{frame, std::move(g)}, z0, 1.0, tol);
}

// Uniformly sampled orbit of the unit-coefficient generator on the active
// clock index.  On branch or step failures the trace truncates and reports
// the samples gathered so far.
struct OrbitTrace {
    std::vector<double> s;
    std::vector<PhasePoint> points;
    std::vector<double> residuals;  // max_I |cbar_I| at each sample
    bool truncated = false;
    std::string truncation_reason;
    std::size_t active_index = 0;
};

inline OrbitTrace trace_orbit(const std::shared_ptr<const GaugeFrame>& frame,
                              const PhasePoint& z0, double s_begin, double s_end,
                              int n_samples, const Tolerances& tol = {}) {
    if (n_samples < 1) {
        throw ConfigError("trace_orbit: sample count must be positive");
    }
    OrbitTrace trace;
    for (std::size_t i = 0; i < frame->n_gauge(); ++i) {
        if (frame->clocks[i].advances()) {
            trace.active_index = i;
            break;
        }
    }
    Vector g = Vector::Zero(static_cast<Eigen::Index>(frame->n_gauge()));
    g[static_cast<Eigen::Index>(trace.active_index)] = 1.0;
    const FlowGenerator generator{frame, g};

    PhasePoint current = z0;
    double s_current = 0.0;
    for (int j = 0; j < n_samples; ++j) {
        const double s = n_samples == 1
                             ? s_begin
                             : s_begin + (s_end - s_begin) * j / (n_samples - 1);
        try {
            current = flow(generator, current, s - s_current, tol);
            s_current = s;
            trace.s.push_back(s);
            trace.points.push_back(current);
            trace.residuals.push_back(constraint_residual(*frame, current));
        } catch (const NumericError& err) {
            trace.truncated = true;
            trace.truncation_reason = err.what();
            break;
        }
    }
    return trace;
}

}  // namespace gaugeframe
