#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "gaugeframe/errors.hpp"

namespace gaugeframe {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Shared numerical knobs.  Defaults are chosen so that the verification
// tolerances quoted throughout the test suite hold with comfortable margin.
struct Tolerances {
    double rtol = 1e-10;           // relative ODE tolerance
    double atol = 1e-12;           // absolute ODE tolerance
    double fd_step = 0.0;          // finite-difference step; <=0 selects automatic
    double newton_tol = 1e-12;     // momentum solve tolerance, scaled by magnitude
    int newton_max_iter = 50;
    double cut_tol = 1e-10;        // admissible gauge residual after landing on a cut
    double branch_tol = 1e-10;     // slack for branch-sign membership and radicands
    double acos_slack = 1e-9;      // clamping window for inverse-cosine arguments
    double condition_limit = 1e12; // transversality conditioning bound
};

inline constexpr double kMachineEps = std::numeric_limits<double>::epsilon();

// Default central-difference step for a coordinate of the given magnitude:
// cbrt(machine epsilon) * max(1, |value|).
inline double fd_default_step(double value) {
    static const double base = std::cbrt(kMachineEps);
    return base * std::max(1.0, std::abs(value));
}

// sqrt with a branch guard: a radicand more negative than the scaled tolerance
// is a branch violation, small negatives caused by roundoff clamp to zero.
inline double guarded_sqrt(double radicand, double scale, double branch_tol,
                           const char* context) {
    const double slack = branch_tol * std::max(1.0, std::abs(scale));
    if (radicand < -slack) {
        throw BranchViolation(std::string(context) + ": negative radicand " +
                              std::to_string(radicand));
    }
    return std::sqrt(std::max(radicand, 0.0));
}

// acos with a clamping window: arguments within the slack band outside [-1, 1]
// clamp, anything further out is a domain violation.
inline double clamped_acos(double arg, double slack, const char* context) {
    if (arg > 1.0 + slack || arg < -1.0 - slack) {
        throw DomainViolation(std::string(context) + ": inverse-cosine argument " +
                              std::to_string(arg) + " outside [-1, 1]");
    }
    return std::acos(std::clamp(arg, -1.0, 1.0));
}

inline void require_finite(double v, const char* context) {
    if (!std::isfinite(v)) {
        throw NonFiniteEvaluation(std::string(context) + ": non-finite value");
    }
}

inline void require_finite(const Vector& v, const char* context) {
    if (!v.allFinite()) {
        throw NonFiniteEvaluation(std::string(context) + ": non-finite vector entry");
    }
}

// Small deterministic generator (splitmix64) so that sampled checks are
// reproducible byte-for-byte across reruns regardless of the standard
// library's distribution internals.
class DeterministicRng {
public:
    explicit DeterministicRng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [a, b) with 53 random mantissa bits.
    double uniform(double a, double b) {
        const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
        return a + (b - a) * u;
    }

private:
    std::uint64_t state_;
};

namespace detail {

// Dormand-Prince 5(4) embedded pair.
struct DormandPrince {
    static constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0,
                            c5 = 8.0 / 9.0;
    static constexpr double a21 = 1.0 / 5.0;
    static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                            a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
    static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                            a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                            a65 = -5103.0 / 18656.0;
    static constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0,
                            b4 = 125.0 / 192.0, b5 = -2187.0 / 6784.0,
                            b6 = 11.0 / 84.0;
    static constexpr double e1 = 35.0 / 384.0 - 5179.0 / 57600.0;
    static constexpr double e3 = 500.0 / 1113.0 - 7571.0 / 16695.0;
    static constexpr double e4 = 125.0 / 192.0 - 393.0 / 640.0;
    static constexpr double e5 = -2187.0 / 6784.0 + 92097.0 / 339200.0;
    static constexpr double e6 = 11.0 / 84.0 - 187.0 / 2100.0;
    static constexpr double e7 = -1.0 / 40.0;
};

}  // namespace detail

// Adaptive embedded Runge-Kutta integration of dy/ds = rhs(s, y) from s0 to s1.
// The maximum step is capped at |s1 - s0| / 8 so that even benign right-hand
// sides are sampled along the whole span.
inline Vector integrate_adaptive(
    const std::function<Vector(double, const Vector&)>& rhs, double s0, double s1,
    Vector y, double rtol, double atol) {
    using DP = detail::DormandPrince;
    const double span = s1 - s0;
    if (span == 0.0) return y;
    const double direction = span > 0.0 ? 1.0 : -1.0;
    const double max_step = std::abs(span) / 8.0;
    const double min_step = std::abs(span) * 1e-14;
    double s = s0;
    double h = max_step / 8.0;
    const Eigen::Index n = y.size();

    Vector k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), y5(n), err(n);
    bool have_k1 = false;
    int consecutive_rejects = 0;

    while (direction * (s1 - s) > 0.0) {
        h = std::min(h, max_step);
        if (direction * (s + direction * h) > direction * s1) {
            h = std::abs(s1 - s);
        }
        if (h < min_step) {
            throw StepFailure("integrate_adaptive: step size underflow at s = " +
                              std::to_string(s));
        }
        const double hs = direction * h;
        if (!have_k1) {
            // The base point itself must be evaluable; a failure here cannot
            // be cured by a shorter step.
            k1 = rhs(s, y);
            require_finite(k1, "integrate_adaptive");
            have_k1 = true;
        }
        // Trial stages may probe outside the admissible region (branch
        // radicands, coordinate ranges).  Treat such failures as ordinary
        // step rejections and retry shorter rather than aborting the flow.
        bool stage_failed = false;
        try {
            k2 = rhs(s + DP::c2 * hs, y + hs * (DP::a21 * k1));
            k3 = rhs(s + DP::c3 * hs, y + hs * (DP::a31 * k1 + DP::a32 * k2));
            k4 = rhs(s + DP::c4 * hs,
                     y + hs * (DP::a41 * k1 + DP::a42 * k2 + DP::a43 * k3));
            k5 = rhs(s + DP::c5 * hs,
                     y + hs * (DP::a51 * k1 + DP::a52 * k2 + DP::a53 * k3 +
                               DP::a54 * k4));
            k6 = rhs(s + hs, y + hs * (DP::a61 * k1 + DP::a62 * k2 + DP::a63 * k3 +
                                       DP::a64 * k4 + DP::a65 * k5));
            y5 = y + hs * (DP::b1 * k1 + DP::b3 * k3 + DP::b4 * k4 + DP::b5 * k5 +
                           DP::b6 * k6);
            require_finite(y5, "integrate_adaptive");
            k7 = rhs(s + hs, y5);
            require_finite(k7, "integrate_adaptive");
        } catch (const NumericError&) {
            stage_failed = true;
        }
        if (stage_failed) {
            if (++consecutive_rejects > 60) {
                throw StepFailure(
                    "integrate_adaptive: repeated stage failures at s = " +
                    std::to_string(s));
            }
            h *= 0.2;
            continue;
        }
        err = hs * (DP::e1 * k1 + DP::e3 * k3 + DP::e4 * k4 + DP::e5 * k5 +
                    DP::e6 * k6 + DP::e7 * k7);

        double err_norm = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
            const double e = err[i] / sc;
            err_norm += e * e;
        }
        err_norm = std::sqrt(err_norm / static_cast<double>(n));

        if (err_norm <= 1.0) {
            s += hs;
            y.swap(y5);
            k1.swap(k7);  // first-same-as-last
            consecutive_rejects = 0;
        } else if (++consecutive_rejects > 60) {
            throw StepFailure("integrate_adaptive: persistent step rejection");
        }
        const double factor = err_norm > 0.0
                                  ? 0.9 * std::pow(err_norm, -0.2)
                                  : 5.0;
        h *= std::clamp(factor, 0.2, 5.0);
    }
    return y;
}

}  // namespace gaugeframe
