#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "gaugeframe/numerics.hpp"

namespace gaugeframe {

// Canonical pair layout shared by every frame of a model.  The coordinate
// vector of a PhasePoint stores all pair positions first and all pair momenta
// second, in pair order; individual frames select which pairs act as true
// degrees of freedom and which as reference (gauge) pairs.
//
// Bracket convention: {momentum, position} = +1 per pair, scaled by the pair
// weight.  Mechanical models use weight 1; lattice models use 1/dz^D so that
// sums over sites approximate continuum functional brackets.
struct PairStructure {
    std::vector<std::string> position_labels;
    std::vector<std::string> momentum_labels;
    Vector weights;  // one entry per pair
    // Admissible open interval per pair position (slot copies between frames
    // check their target against this; flows do not).
    std::vector<std::pair<double, double>> position_ranges;

    std::size_t n_pairs() const { return position_labels.size(); }
    std::size_t dim() const { return 2 * n_pairs(); }
    std::size_t position_index(std::size_t pair) const { return pair; }
    std::size_t momentum_index(std::size_t pair) const { return n_pairs() + pair; }

    static std::shared_ptr<PairStructure> make(
        std::vector<std::string> positions, std::vector<std::string> momenta,
        double weight = 1.0) {
        auto ps = std::make_shared<PairStructure>();
        ps->position_labels = std::move(positions);
        ps->momentum_labels = std::move(momenta);
        ps->weights = Vector::Constant(static_cast<Eigen::Index>(ps->position_labels.size()), weight);
        const double inf = std::numeric_limits<double>::infinity();
        ps->position_ranges.assign(ps->position_labels.size(), {-inf, inf});
        return ps;
    }
};

// A point of the kinematical phase space.  Carries its pair structure so that
// brackets and flows know the pairing and weights without extra arguments.
struct PhasePoint {
    Vector coords;
    std::shared_ptr<const PairStructure> pairs;

    PhasePoint() = default;
    PhasePoint(Vector c, std::shared_ptr<const PairStructure> p)
        : coords(std::move(c)), pairs(std::move(p)) {
        if (coords.size() != static_cast<Eigen::Index>(pairs->dim())) {
            throw ConfigError("PhasePoint: coordinate vector length " +
                              std::to_string(coords.size()) + " does not match layout " +
                              std::to_string(pairs->dim()));
        }
    }

    std::size_t dim() const { return pairs ? pairs->dim() : 0; }
    double position(std::size_t pair) const { return coords[static_cast<Eigen::Index>(pairs->position_index(pair))]; }
    double momentum(std::size_t pair) const { return coords[static_cast<Eigen::Index>(pairs->momentum_index(pair))]; }
    double& position(std::size_t pair) { return coords[static_cast<Eigen::Index>(pairs->position_index(pair))]; }
    double& momentum(std::size_t pair) { return coords[static_cast<Eigen::Index>(pairs->momentum_index(pair))]; }
};

// Frame-dependent designation of pairs as true degrees of freedom (q^a, p_a)
// or reference pairs (x^I, y_I).  Provides the bijection between the slot
// naming (q..., p..., x..., y...) and indices of the stored coordinate vector.
class CoordinateSplit {
public:
    CoordinateSplit(std::shared_ptr<const PairStructure> pairs,
                    std::vector<std::size_t> gauge_pairs)
        : pairs_(std::move(pairs)), gauge_pairs_(std::move(gauge_pairs)) {
        std::vector<bool> is_gauge(pairs_->n_pairs(), false);
        for (std::size_t g : gauge_pairs_) {
            if (g >= pairs_->n_pairs() || is_gauge[g]) {
                throw ConfigError("CoordinateSplit: invalid gauge pair index " +
                                  std::to_string(g));
            }
            is_gauge[g] = true;
        }
        for (std::size_t i = 0; i < pairs_->n_pairs(); ++i) {
            if (!is_gauge[i]) true_pairs_.push_back(i);
        }
    }

    const std::shared_ptr<const PairStructure>& pairs() const { return pairs_; }
    std::size_t n_true() const { return true_pairs_.size(); }
    std::size_t n_gauge() const { return gauge_pairs_.size(); }
    std::size_t dim() const { return pairs_->dim(); }

    std::size_t true_pair(std::size_t a) const { return true_pairs_.at(a); }
    std::size_t gauge_pair(std::size_t i) const { return gauge_pairs_.at(i); }
    const std::vector<std::size_t>& true_pairs() const { return true_pairs_; }
    const std::vector<std::size_t>& gauge_pairs() const { return gauge_pairs_; }

    // Vector-slot bijection for the split ordering (q..., p..., x..., y...).
    std::size_t q_index(std::size_t a) const { return pairs_->position_index(true_pair(a)); }
    std::size_t p_index(std::size_t a) const { return pairs_->momentum_index(true_pair(a)); }
    std::size_t x_index(std::size_t i) const { return pairs_->position_index(gauge_pair(i)); }
    std::size_t y_index(std::size_t i) const { return pairs_->momentum_index(gauge_pair(i)); }

    double q(const PhasePoint& z, std::size_t a) const { return z.coords[static_cast<Eigen::Index>(q_index(a))]; }
    double p(const PhasePoint& z, std::size_t a) const { return z.coords[static_cast<Eigen::Index>(p_index(a))]; }
    double x(const PhasePoint& z, std::size_t i) const { return z.coords[static_cast<Eigen::Index>(x_index(i))]; }
    double y(const PhasePoint& z, std::size_t i) const { return z.coords[static_cast<Eigen::Index>(y_index(i))]; }

    std::string q_label(std::size_t a) const { return pairs_->position_labels[true_pair(a)]; }
    std::string p_label(std::size_t a) const { return pairs_->momentum_labels[true_pair(a)]; }
    std::string x_label(std::size_t i) const { return pairs_->position_labels[gauge_pair(i)]; }
    std::string y_label(std::size_t i) const { return pairs_->momentum_labels[gauge_pair(i)]; }

    // Pack/unpack true-sector values in (q..., p...) order.
    Vector true_values(const PhasePoint& z) const {
        Vector qp(2 * n_true());
        for (std::size_t a = 0; a < n_true(); ++a) {
            qp[static_cast<Eigen::Index>(a)] = q(z, a);
            qp[static_cast<Eigen::Index>(n_true() + a)] = p(z, a);
        }
        return qp;
    }
    void set_true_values(PhasePoint& z, const Vector& qp) const {
        if (qp.size() != static_cast<Eigen::Index>(2 * n_true())) {
            throw ConfigError("CoordinateSplit: true-sector vector has length " +
                              std::to_string(qp.size()) + ", expected " +
                              std::to_string(2 * n_true()));
        }
        for (std::size_t a = 0; a < n_true(); ++a) {
            z.coords[static_cast<Eigen::Index>(q_index(a))] = qp[static_cast<Eigen::Index>(a)];
            z.coords[static_cast<Eigen::Index>(p_index(a))] = qp[static_cast<Eigen::Index>(n_true() + a)];
        }
    }

private:
    std::shared_ptr<const PairStructure> pairs_;
    std::vector<std::size_t> gauge_pairs_;
    std::vector<std::size_t> true_pairs_;
};

// A labelled scalar function on phase space with an optional analytic
// gradient.  When no gradient is supplied, callers fall back to central
// differences with one Richardson extrapolation level.
struct ScalarField {
    std::string label;
    std::function<double(const PhasePoint&)> eval;
    std::function<Vector(const PhasePoint&)> grad;  // optional

    bool has_analytic_grad() const { return static_cast<bool>(grad); }
    double operator()(const PhasePoint& z) const { return eval(z); }
};

inline ScalarField coordinate_field(std::shared_ptr<const PairStructure> pairs,
                                    std::size_t slot, std::string label) {
    const Eigen::Index n = static_cast<Eigen::Index>(pairs->dim());
    const Eigen::Index idx = static_cast<Eigen::Index>(slot);
    return ScalarField{
        std::move(label),
        [idx](const PhasePoint& z) { return z.coords[idx]; },
        [idx, n](const PhasePoint&) {
            Vector g = Vector::Zero(n);
            g[idx] = 1.0;
            return g;
        }};
}

inline ScalarField constant_field(double value, std::string label = "const") {
    return ScalarField{
        std::move(label),
        [value](const PhasePoint&) { return value; },
        [](const PhasePoint& z) { return Vector::Zero(static_cast<Eigen::Index>(z.dim())); }};
}

// Gradient of a scalar field at z.  Analytic gradients are returned unchanged;
// otherwise each component uses a central difference at steps h and h/2
// combined by one Richardson level.  step <= 0 selects the default step
// cbrt(machine epsilon) * max(1, |coordinate|) per component.
inline Vector gradient(const ScalarField& f, const PhasePoint& z, double step = 0.0) {
    if (f.has_analytic_grad()) {
        Vector g = f.grad(z);
        require_finite(g, "gradient (analytic)");
        return g;
    }
    const Eigen::Index n = static_cast<Eigen::Index>(z.dim());
    Vector g(n);
    PhasePoint probe = z;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double h = step > 0.0 ? step : fd_default_step(z.coords[i]);
        const double saved = probe.coords[i];
        auto sample = [&](double offset) {
            probe.coords[i] = saved + offset;
            const double v = f.eval(probe);
            require_finite(v, "gradient (finite difference)");
            return v;
        };
        const double d_h = (sample(h) - sample(-h)) / (2.0 * h);
        const double d_h2 = (sample(h / 2.0) - sample(-h / 2.0)) / h;
        probe.coords[i] = saved;
        g[i] = (4.0 * d_h2 - d_h) / 3.0;
    }
    return g;
}

// Pairwise contraction of two gradients with the symplectic pairing:
// sum over pairs of weight * (df/dmomentum dg/dposition - df/dposition dg/dmomentum),
// realising {momentum, position} = +weight.
inline double bracket_from_grads(const Vector& gf, const Vector& gg,
                                 const PairStructure& pairs) {
    double sum = 0.0;
    const std::size_t n = pairs.n_pairs();
    for (std::size_t k = 0; k < n; ++k) {
        const Eigen::Index qi = static_cast<Eigen::Index>(pairs.position_index(k));
        const Eigen::Index pi = static_cast<Eigen::Index>(pairs.momentum_index(k));
        sum += pairs.weights[static_cast<Eigen::Index>(k)] *
               (gf[pi] * gg[qi] - gf[qi] * gg[pi]);
    }
    return sum;
}

// Poisson bracket {f, g} at z under the convention {momentum, position} = +1
// per unit-weight pair, i.e. qdot = {h, q} = dh/dp along a Hamiltonian flow.
inline double poisson_bracket(const ScalarField& f, const ScalarField& g,
                              const PhasePoint& z, double step = 0.0) {
    const Vector gf = gradient(f, z, step);
    const Vector gg = gradient(g, z, step);
    return bracket_from_grads(gf, gg, *z.pairs);
}

// Dirac bracket associated with second-class pairs (constraints cbar_I, gauge
// conditions gauge_I normalised so that {cbar_I, gauge_J} = delta_I^J):
//   {f, g}* = {f, g} + sum_I ( {f, cbar_I} {gauge_I, g} - {g, cbar_I} {gauge_I, f} ).
// The gauge conditions x^I - k^I(t) have t-independent gradients, so the value
// does not depend on the cut time.
inline double dirac_bracket(const ScalarField& f, const ScalarField& g,
                            const std::vector<ScalarField>& cbars,
                            const std::vector<ScalarField>& gauges,
                            const PhasePoint& z, double step = 0.0) {
    if (cbars.size() != gauges.size()) {
        throw ConfigError("dirac_bracket: constraint/gauge list size mismatch");
    }
    const Vector gf = gradient(f, z, step);
    const Vector gg = gradient(g, z, step);
    double sum = bracket_from_grads(gf, gg, *z.pairs);
    for (std::size_t i = 0; i < cbars.size(); ++i) {
        const Vector gc = gradient(cbars[i], z, step);
        const Vector gG = gradient(gauges[i], z, step);
        const double f_c = bracket_from_grads(gf, gc, *z.pairs);
        const double G_g = bracket_from_grads(gG, gg, *z.pairs);
        const double g_c = bracket_from_grads(gg, gc, *z.pairs);
        const double G_f = bracket_from_grads(gG, gf, *z.pairs);
        sum += f_c * G_g - g_c * G_f;
    }
    return sum;
}

}  // namespace gaugeframe
