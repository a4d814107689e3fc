#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "gaugeframe/relational.hpp"

namespace gaugeframe {

// Two gauge frames over the same kinematical pair structure, together with
// the induced index correspondence: pairs that stay true in both frames,
// pairs swapped from true to reference, and pairs swapped the other way.
// The swapped cardinalities must agree for the frames to exchange the same
// number of degrees of freedom.
struct FramePair {
    std::shared_ptr<const GaugeFrame> frame_a;
    std::shared_ptr<const GaugeFrame> frame_b;
    std::vector<std::size_t> shared_true;   // true in both
    std::vector<std::size_t> swapped_a;     // true in A, reference in B
    std::vector<std::size_t> swapped_b;     // reference in A, true in B
    std::vector<std::size_t> shared_gauge;  // reference in both
    double dimension_scale = 1.0;           // slot-copy scale ell

    FramePair(std::shared_ptr<const GaugeFrame> a, std::shared_ptr<const GaugeFrame> b,
              double scale = 1.0)
        : frame_a(std::move(a)), frame_b(std::move(b)), dimension_scale(scale) {
        if (frame_a->split->pairs() != frame_b->split->pairs()) {
            throw ConfigError("FramePair: frames live on different pair structures");
        }
        const std::size_t n = frame_a->split->pairs()->n_pairs();
        std::vector<bool> gauge_a(n, false), gauge_b(n, false);
        for (std::size_t g : frame_a->split->gauge_pairs()) gauge_a[g] = true;
        for (std::size_t g : frame_b->split->gauge_pairs()) gauge_b[g] = true;
        for (std::size_t k = 0; k < n; ++k) {
            if (!gauge_a[k] && !gauge_b[k]) shared_true.push_back(k);
            else if (!gauge_a[k] && gauge_b[k]) swapped_a.push_back(k);
            else if (gauge_a[k] && !gauge_b[k]) swapped_b.push_back(k);
            else shared_gauge.push_back(k);
        }
        if (swapped_a.size() != swapped_b.size()) {
            throw ConfigError("FramePair: " + std::to_string(swapped_a.size()) +
                              " pairs swap out of frame '" + frame_a->name + "' but " +
                              std::to_string(swapped_b.size()) + " swap in from frame '" +
                              frame_b->name + "'");
        }
    }
};

// A frame transformation instance: the pair plus the two cut times.
struct FrameMap {
    FramePair frames;
    double t_a = 0.0;
    double t_b = 0.0;
};

inline FrameMap invert_rrft(const FrameMap& map) {
    FramePair swapped(map.frames.frame_b, map.frames.frame_a,
                      map.frames.dimension_scale);
    return FrameMap{std::move(swapped), map.t_b, map.t_a};
}

namespace detail {

inline void require_branch(const GaugeFrame& frame, const PhasePoint& z, double slack,
                           const char* stage) {
    if (!frame.on_branch(z, slack)) {
        throw SectorMismatch(std::string(stage) + ": point violates branch signs of frame '" +
                             frame.name + "'");
    }
}

}  // namespace detail

// Relational reference frame transformation: embed the frame-A state at the
// cut t_a, transport it along frame B's constraint orbits onto the cut t_b,
// and project to frame B's true sector.
inline Vector apply_rrft(const FrameMap& map, const Vector& qp_a,
                         const Tolerances& tol = {}) {
    const GaugeFrame& a = *map.frames.frame_a;
    const GaugeFrame& b = *map.frames.frame_b;
    const PhasePoint embedded = embed_at_cut(a, map.t_a, qp_a);
    const double slack = 1e-7;
    detail::require_branch(a, embedded, slack, "apply_rrft (source)");
    detail::require_branch(b, embedded, slack, "apply_rrft (target sector)");
    const PhasePoint landed = flow_to_cut(map.frames.frame_b, map.t_b, embedded, tol);
    detail::require_branch(b, landed, slack, "apply_rrft (landing)");
    return b.split->true_values(landed);
}

// Index reference frame transformation: positional slot copy of true-sector
// values, positions divided and momenta multiplied by the dimension scale.
// Target coordinate ranges are enforced.
inline Vector apply_irft(const FramePair& pair, const Vector& qp_a) {
    const CoordinateSplit& sa = *pair.frame_a->split;
    const CoordinateSplit& sb = *pair.frame_b->split;
    if (sa.n_true() != sb.n_true()) {
        throw ConfigError("apply_irft: true-sector dimensions differ");
    }
    const std::size_t n = sa.n_true();
    if (qp_a.size() != static_cast<Eigen::Index>(2 * n)) {
        throw ConfigError("apply_irft: state has wrong length");
    }
    const double ell = pair.dimension_scale;
    Vector qp_b(2 * n);
    for (std::size_t a = 0; a < n; ++a) {
        const bool swapped = sa.true_pair(a) != sb.true_pair(a);
        const double scale = swapped ? ell : 1.0;
        const double q = qp_a[static_cast<Eigen::Index>(a)] / scale;
        const double p = qp_a[static_cast<Eigen::Index>(n + a)] * scale;
        const auto& range = sb.pairs()->position_ranges[sb.true_pair(a)];
        if (!(q > range.first && q < range.second)) {
            throw RangeViolation("apply_irft: value " + std::to_string(q) +
                                 " for slot '" + sb.q_label(a) +
                                 "' falls outside its admissible range");
        }
        qp_b[static_cast<Eigen::Index>(a)] = q;
        qp_b[static_cast<Eigen::Index>(n + a)] = p;
    }
    return qp_b;
}

struct PullbackResult {
    double h_a = 0.0;          // frame-A reduced Hamiltonian at qp_a
    double h_b_pullback = 0.0; // frame-B reduced Hamiltonian at the image
    Vector image;
};

// Both reduced Hamiltonians for the transformation: frame A's at the original
// state and frame B's at the transformed state, with both frames' clocks read
// at t_eval (the map's cut times fix the transformation itself).
inline PullbackResult pullback_hamiltonian(const FrameMap& map, const Vector& qp_a,
                                           double t_eval, const Tolerances& tol = {}) {
    PullbackResult out;
    out.image = apply_rrft(map, qp_a, tol);
    out.h_a = reduced_hamiltonian(*map.frames.frame_a, t_eval, qp_a);
    out.h_b_pullback = reduced_hamiltonian(*map.frames.frame_b, t_eval, out.image);
    return out;
}

// Largest entry of J P J^T - P for the finite-difference Jacobian J of a
// true-sector map, where P is the canonical Poisson matrix of the (q..., p...)
// ordering under {p_a, q^b} = delta_a^b.  Zero for exactly canonical maps.
inline double check_symplectic(const std::function<Vector(const Vector&)>& map_fn,
                               const Vector& qp, double fd_step = 5e-4) {
    const Eigen::Index d = qp.size();
    const Eigen::Index n = d / 2;
    Matrix jac(d, d);
    Vector probe = qp;
    for (Eigen::Index j = 0; j < d; ++j) {
        const double h = fd_step * std::max(1.0, std::abs(qp[j]));
        probe[j] = qp[j] + h;
        const Vector plus = map_fn(probe);
        probe[j] = qp[j] - h;
        const Vector minus = map_fn(probe);
        probe[j] = qp[j];
        jac.col(j) = (plus - minus) / (2.0 * h);
    }
    Matrix omega = Matrix::Zero(d, d);
    for (Eigen::Index a = 0; a < n; ++a) {
        omega(a, n + a) = -1.0;  // {q_a, p_a}
        omega(n + a, a) = 1.0;   // {p_a, q_a}
    }
    const Matrix deviation = jac * omega * jac.transpose() - omega;
    return deviation.cwiseAbs().maxCoeff();
}

inline double check_symplectic(const FrameMap& map, const Vector& qp,
                               const Tolerances& tol = {}, double fd_step = 5e-4) {
    return check_symplectic(
        [&map, &tol](const Vector& v) { return apply_rrft(map, v, tol); }, qp, fd_step);
}

}  // namespace gaugeframe
