#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gaugeframe/phase_core.hpp"

namespace gaugeframe {

// Sign selecting a solution branch of a constraint solved for its reference
// momentum.  `single` marks constraints linear in the momentum, where no sign
// choice arises.
enum class BranchSign { minus, plus, single };

inline std::string to_string(BranchSign s) {
    switch (s) {
        case BranchSign::minus: return "-";
        case BranchSign::plus: return "+";
        default: return "single";
    }
}

inline BranchSign parse_branch_sign(const std::string& text) {
    if (text == "-" || text == "minus") return BranchSign::minus;
    if (text == "+" || text == "plus") return BranchSign::plus;
    if (text == "single") return BranchSign::single;
    throw ConfigError("unknown branch sign '" + text + "'");
}

struct BranchSigns {
    std::vector<BranchSign> signs;

    std::size_t size() const { return signs.size(); }
    BranchSign operator[](std::size_t i) const { return signs.at(i); }

    // A reference momentum value is consistent with its branch sign when it
    // lies on the selected side, within a scaled roundoff slack.
    bool admits(std::size_t i, double y, double slack) const {
        switch (signs.at(i)) {
            case BranchSign::minus: return y <= slack;
            case BranchSign::plus: return y >= -slack;
            default: return true;
        }
    }
};

// Reference-field schedule t -> k^I(t).  Linear clocks are a coefficient pair
// (offset, rate); polynomial clocks hold ascending coefficients.
struct GaugeClock {
    enum class Kind { linear, polynomial };
    Kind kind = Kind::linear;
    std::vector<double> coefficients = {0.0, 1.0};

    static GaugeClock linear(double offset, double rate) {
        return GaugeClock{Kind::linear, {offset, rate}};
    }
    static GaugeClock polynomial(std::vector<double> coeffs) {
        return GaugeClock{Kind::polynomial, std::move(coeffs)};
    }

    double value(double t) const {
        double v = 0.0;
        for (std::size_t j = coefficients.size(); j-- > 0;) {
            v = v * t + coefficients[j];
        }
        return v;
    }

    double rate(double t) const {
        double v = 0.0;
        for (std::size_t j = coefficients.size(); j-- > 1;) {
            v = v * t + static_cast<double>(j) * coefficients[j];
        }
        return v;
    }

    // True when some non-constant coefficient is nonzero, i.e. the clock
    // actually advances its reference field.
    bool advances() const {
        for (std::size_t j = 1; j < coefficients.size(); ++j) {
            if (coefficients[j] != 0.0) return true;
        }
        return false;
    }
};

// Constraints of a model, in raw form C_I and in solved (abelianized) form
// cbar_I = y_I + h_I(x; q, p).  The `solved` fields store h_I; the full
// cbar_I fields are assembled against a split by `finalize`.
struct ConstraintSystem {
    std::vector<ScalarField> raw;
    std::vector<ScalarField> solved;  // h_I, independent of every y
    BranchSigns branch;
    std::vector<ScalarField> cbar;    // y_I + h_I, built by finalize()

    void finalize(const CoordinateSplit& split) {
        if (solved.size() != split.n_gauge()) {
            throw ConfigError("ConstraintSystem: " + std::to_string(solved.size()) +
                              " solved constraints for " + std::to_string(split.n_gauge()) +
                              " gauge pairs");
        }
        if (branch.size() != solved.size()) {
            throw ConfigError("ConstraintSystem: branch sign count mismatch");
        }
        cbar.clear();
        cbar.reserve(solved.size());
        for (std::size_t i = 0; i < solved.size(); ++i) {
            const ScalarField h = solved[i];
            const Eigen::Index y_idx = static_cast<Eigen::Index>(split.y_index(i));
            ScalarField c;
            c.label = "cbar_" + h.label;
            c.eval = [h, y_idx](const PhasePoint& z) {
                return z.coords[y_idx] + h.eval(z);
            };
            if (h.has_analytic_grad()) {
                c.grad = [h, y_idx](const PhasePoint& z) {
                    Vector g = h.grad(z);
                    g[y_idx] += 1.0;
                    return g;
                };
            }
            cbar.push_back(std::move(c));
        }
    }
};

// A gauge frame: the split designating reference pairs, one clock per
// reference index, and the constraints solved with respect to those
// reference fields.
struct GaugeFrame {
    std::string name;
    std::shared_ptr<const CoordinateSplit> split;
    std::vector<GaugeClock> clocks;
    ConstraintSystem constraints;

    std::size_t n_gauge() const { return split->n_gauge(); }
    std::size_t n_true() const { return split->n_true(); }

    Vector clock_values(double t) const {
        Vector k(static_cast<Eigen::Index>(clocks.size()));
        for (std::size_t i = 0; i < clocks.size(); ++i) {
            k[static_cast<Eigen::Index>(i)] = clocks[i].value(t);
        }
        return k;
    }

    Vector clock_rates(double t) const {
        Vector kdot(static_cast<Eigen::Index>(clocks.size()));
        for (std::size_t i = 0; i < clocks.size(); ++i) {
            kdot[static_cast<Eigen::Index>(i)] = clocks[i].rate(t);
        }
        return kdot;
    }

    // A frame in the strict sense requires at least one advancing clock; the
    // scenario layer enforces this on configuration input.  Trivial frames
    // remain constructible for degenerate checks.
    bool has_advancing_clock() const {
        for (const auto& c : clocks) {
            if (c.advances()) return true;
        }
        return false;
    }

    // Gauge condition G^I(t) = x^I - k^I(t) as a scalar field.
    ScalarField gauge_condition(std::size_t i, double t) const {
        const double k = clocks.at(i).value(t);
        ScalarField g = coordinate_field(split->pairs(), split->x_index(i),
                                         "G_" + split->x_label(i));
        auto base_eval = g.eval;
        g.eval = [base_eval, k](const PhasePoint& z) { return base_eval(z) - k; };
        return g;
    }

    // Branch membership of the reference momenta at z.
    bool on_branch(const PhasePoint& z, double slack) const {
        for (std::size_t i = 0; i < n_gauge(); ++i) {
            const double scaled = slack * std::max(1.0, std::abs(split->y(z, i)));
            if (!constraints.branch.admits(i, split->y(z, i), scaled)) return false;
        }
        return true;
    }
};

// Largest solved-constraint residual max_I |cbar_I(z)|.
inline double constraint_residual(const GaugeFrame& frame, const PhasePoint& z) {
    double r = 0.0;
    for (const auto& c : frame.constraints.cbar) {
        const double v = c.eval(z);
        require_finite(v, "constraint_residual");
        r = std::max(r, std::abs(v));
    }
    return r;
}

// Directed gauge residuals G^I(t) = x^I - k^I(t) at z.
inline Vector gauge_residual(const GaugeFrame& frame, double t, const PhasePoint& z) {
    Vector r(static_cast<Eigen::Index>(frame.n_gauge()));
    for (std::size_t i = 0; i < frame.n_gauge(); ++i) {
        r[static_cast<Eigen::Index>(i)] = frame.split->x(z, i) - frame.clocks[i].value(t);
    }
    return r;
}

// Newton solve of the raw constraints for the reference momenta y_I, holding
// every other coordinate of `z` fixed.  The initial iterate is taken from the
// branch signs (or the caller's guess); convergence is measured against
// 1e-12 scaled by the constraint magnitude at the initial iterate.  After
// convergence the branch signs of the solution are checked.
inline Vector solve_for_momenta(const ConstraintSystem& system,
                                const CoordinateSplit& split, const PhasePoint& z,
                                const Tolerances& tol = {},
                                std::optional<Vector> guess = std::nullopt) {
    const std::size_t m = split.n_gauge();
    if (system.raw.size() != m) {
        throw ConfigError("solve_for_momenta: raw constraint count " +
                          std::to_string(system.raw.size()) + " does not match " +
                          std::to_string(m) + " gauge pairs");
    }
    PhasePoint work = z;
    Vector y(static_cast<Eigen::Index>(m));
    if (guess) {
        y = *guess;
    } else {
        for (std::size_t i = 0; i < m; ++i) {
            y[static_cast<Eigen::Index>(i)] =
                system.branch[i] == BranchSign::plus ? 1.0 : -1.0;
        }
    }

    auto residual = [&](const Vector& yv) {
        for (std::size_t i = 0; i < m; ++i) {
            work.coords[static_cast<Eigen::Index>(split.y_index(i))] = yv[static_cast<Eigen::Index>(i)];
        }
        Vector r(static_cast<Eigen::Index>(m));
        for (std::size_t i = 0; i < m; ++i) {
            r[static_cast<Eigen::Index>(i)] = system.raw[i].eval(work);
        }
        require_finite(r, "solve_for_momenta");
        return r;
    };

    Vector r = residual(y);
    double scale = 1.0;
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        scale = std::max(scale, std::abs(r[i]));
    }
    const double target = tol.newton_tol * scale;

    for (int iter = 0; iter < tol.newton_max_iter; ++iter) {
        if (r.lpNorm<Eigen::Infinity>() <= target) break;
        Matrix jac(m, m);
        for (std::size_t i = 0; i < m; ++i) {
            const Vector g = gradient(system.raw[i], work, tol.fd_step);
            for (std::size_t j = 0; j < m; ++j) {
                jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    g[static_cast<Eigen::Index>(split.y_index(j))];
            }
        }
        Eigen::FullPivLU<Matrix> lu(jac);
        if (!lu.isInvertible()) {
            throw SingularTransversality(
                "solve_for_momenta: singular Jacobian with respect to reference momenta");
        }
        const Vector step = lu.solve(r);
        // Damped update: halve until the residual improves.
        double lambda = 1.0;
        Vector y_next = y - step;
        Vector r_next = residual(y_next);
        int halvings = 0;
        while (r_next.lpNorm<Eigen::Infinity>() > r.lpNorm<Eigen::Infinity>() &&
               halvings < 12) {
            lambda *= 0.5;
            y_next = y - lambda * step;
            r_next = residual(y_next);
            ++halvings;
        }
        y = y_next;
        r = r_next;
    }
    if (r.lpNorm<Eigen::Infinity>() > target) {
        throw NoConvergence("solve_for_momenta: residual " +
                            std::to_string(r.lpNorm<Eigen::Infinity>()) +
                            " above tolerance");
    }
    for (std::size_t i = 0; i < m; ++i) {
        const double yi = y[static_cast<Eigen::Index>(i)];
        const double slack = 1e-9 * std::max(1.0, std::abs(yi));
        if (!system.branch.admits(i, yi, slack)) {
            throw BranchViolation("solve_for_momenta: solution y_" + std::to_string(i) +
                                  " = " + std::to_string(yi) +
                                  " violates branch sign " + to_string(system.branch[i]));
        }
    }
    return y;
}

struct StabilityResult {
    Vector multipliers;       // X*^I solving X^J {C_J, x^I} = kdot^I
    Matrix transversality;    // entry (I, J) = {C_J, x^I}
    double condition = 0.0;   // spectral condition number of the matrix
};

// Lagrange multipliers stabilising the gauge conditions: solves
// X^J {C_J, x^I} = kdot^I(t) at z, using the raw constraints when `use_raw`
// is set and the solved ones otherwise (for which the matrix is the identity
// on unit-weight pairs and X* = kdot exactly).
inline StabilityResult stability_multipliers(const GaugeFrame& frame, double t,
                                             const PhasePoint& z, bool use_raw,
                                             const Tolerances& tol = {}) {
    const std::size_t m = frame.n_gauge();
    const auto& constraints = use_raw ? frame.constraints.raw : frame.constraints.cbar;
    if (constraints.size() != m) {
        throw ConfigError("stability_multipliers: constraint count mismatch");
    }
    Matrix delta(m, m);
    for (std::size_t j = 0; j < m; ++j) {
        const Vector g = gradient(constraints[j], z, tol.fd_step);
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t pair = frame.split->gauge_pair(i);
            // {C_J, x^I} = weight * dC_J/dy_I
            delta(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                frame.split->pairs()->weights[static_cast<Eigen::Index>(pair)] *
                g[static_cast<Eigen::Index>(frame.split->y_index(i))];
        }
    }
    Eigen::JacobiSVD<Matrix> svd(delta, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    if (smin <= 0.0 || smax / smin > tol.condition_limit) {
        throw SingularTransversality(
            "stability_multipliers: transversality matrix is numerically singular "
            "(condition " + std::to_string(smin > 0.0 ? smax / smin : 0.0) + ")");
    }
    StabilityResult out;
    out.transversality = delta;
    out.condition = smax / smin;
    out.multipliers = svd.solve(frame.clock_rates(t));
    return out;
}

// Stabilised multiplier rates V^I = d(X*^I)/dt, reported on demand via a
// central difference in t rather than stored.
inline Vector stability_multiplier_rates(const GaugeFrame& frame, double t,
                                         const PhasePoint& z, bool use_raw,
                                         const Tolerances& tol = {}) {
    const double h = fd_default_step(t);
    const Vector plus = stability_multipliers(frame, t + h, z, use_raw, tol).multipliers;
    const Vector minus = stability_multipliers(frame, t - h, z, use_raw, tol).multipliers;
    return (plus - minus) / (2.0 * h);
}

// Dirac bracket induced by a frame's constraints and gauge conditions at time
// t.  The value is t-independent because the gauge-condition gradients are.
inline double dirac_bracket(const ScalarField& f, const ScalarField& g,
                            const GaugeFrame& frame, double t, const PhasePoint& z,
                            double step = 0.0) {
    std::vector<ScalarField> gauges;
    gauges.reserve(frame.n_gauge());
    for (std::size_t i = 0; i < frame.n_gauge(); ++i) {
        gauges.push_back(frame.gauge_condition(i, t));
    }
    return dirac_bracket(f, g, frame.constraints.cbar, gauges, z, step);
}

}  // namespace gaugeframe
