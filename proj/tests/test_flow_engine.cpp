#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "gaugeframe/flow_engine.hpp"
#include "gaugeframe/models/kepler.hpp"
#include "gaugeframe/models/linear_toy.hpp"

using namespace gaugeframe;

namespace {

std::shared_ptr<const PairStructure> two_pairs() {
    return PairStructure::make({"q", "x"}, {"p", "y"});
}

PhasePoint point(std::shared_ptr<const PairStructure> pairs, double a, double b,
                 double c, double d) {
    Vector v(4);
    v << a, b, c, d;
    return PhasePoint{v, std::move(pairs)};
}

}  // namespace

TEST_CASE("hamiltonian vector field follows the sign convention") {
    const auto pairs = two_pairs();
    const PhasePoint z = point(pairs, 0.3, -0.2, 0.9, 1.4);

    // G = p: positions move forward along their conjugate coordinate.
    const Vector rp = hamiltonian_rhs(coordinate_field(pairs, 2, "p"), z, 0.0);
    REQUIRE(rp[0] == 1.0);
    REQUIRE(rp[1] == 0.0);
    REQUIRE(rp[2] == 0.0);
    REQUIRE(rp[3] == 0.0);

    // G = q: the conjugate momentum moves backward.
    const Vector rq = hamiltonian_rhs(coordinate_field(pairs, 0, "q"), z, 0.0);
    REQUIRE(rq[0] == 0.0);
    REQUIRE(rq[2] == -1.0);
}

TEST_CASE("rotation generator flows (1, 0) to (0, -1) in a quarter turn") {
    const auto pairs = two_pairs();
    ScalarField rot;
    rot.label = "rotation";
    rot.eval = [](const PhasePoint& z) {
        return 0.5 * (z.coords[0] * z.coords[0] + z.coords[2] * z.coords[2]);
    };
    rot.grad = [](const PhasePoint& z) {
        Vector g = Vector::Zero(4);
        g[0] = z.coords[0];
        g[2] = z.coords[2];
        return g;
    };

    const PhasePoint z0 = point(pairs, 1.0, 0.4, 0.0, 0.7);
    const PhasePoint fwd = hamiltonian_flow(rot, z0, 0.0, M_PI / 2.0);
    REQUIRE(std::abs(fwd.coords[0]) < 1e-9);
    REQUIRE(std::abs(fwd.coords[2] + 1.0) < 1e-9);
    // the untouched pair is carried along unchanged
    REQUIRE(std::abs(fwd.coords[1] - 0.4) < 1e-14);
    REQUIRE(std::abs(fwd.coords[3] - 0.7) < 1e-14);

    const PhasePoint bwd = hamiltonian_flow(rot, z0, 0.0, -M_PI / 2.0);
    REQUIRE(std::abs(bwd.coords[0]) < 1e-9);
    REQUIRE(std::abs(bwd.coords[2] - 1.0) < 1e-9);
}

TEST_CASE("flow derivative of an observable equals the bracket with the generator") {
    const auto pairs = two_pairs();
    ScalarField gen;
    gen.label = "squeeze";
    gen.eval = [](const PhasePoint& z) {
        return z.coords[0] * z.coords[2] + 0.5 * z.coords[2] * z.coords[2];
    };
    ScalarField obs;
    obs.label = "probe";
    obs.eval = [](const PhasePoint& z) {
        return z.coords[0] * z.coords[0] + std::sin(z.coords[2]);
    };

    const PhasePoint z = point(pairs, 0.7, 0.0, -0.4, 0.0);
    const double eps = 1e-4;
    const double plus = obs(hamiltonian_flow(gen, z, 0.0, eps));
    const double minus = obs(hamiltonian_flow(gen, z, 0.0, -eps));
    const double along_flow = (plus - minus) / (2.0 * eps);
    const double bracket = poisson_bracket(gen, obs, z);
    REQUIRE(std::abs(along_flow - bracket) < 1e-6);
}

TEST_CASE("a constraint flow conserves its own generator") {
    const ModelSystem model = make_linear_toy({});
    const auto frame = model.frame("direct");
    Vector c(4);
    c << 0.4, -0.7, 0.5, 0.1;  // deliberately off the constraint surface
    const PhasePoint z0{c, model.pairs};
    const double before = frame->constraints.cbar[0].eval(z0);

    Vector g(1);
    g << 1.0;
    const PhasePoint moved = flow(FlowGenerator{frame, g}, z0, 2.0);
    const double after = frame->constraints.cbar[0].eval(moved);
    REQUIRE(std::abs(after - before) < 1e-10);
}

TEST_CASE("flow generator validates coefficients and treats zero flows exactly") {
    const ModelSystem model = make_linear_toy({});
    const auto frame = model.frame("direct");
    Vector c(4);
    c << 0.4, -0.7, 0.5, -0.5;
    const PhasePoint z0{c, model.pairs};

    Vector wrong(2);
    wrong << 1.0, 0.0;
    REQUIRE_THROWS_AS(flow(FlowGenerator{frame, wrong}, z0, 1.0), ConfigError);

    Vector g(1);
    g << 1.0;
    const PhasePoint still = flow(FlowGenerator{frame, g}, z0, 0.0);
    REQUIRE(still.coords == z0.coords);
}

TEST_CASE("flow to a cut lands the reference coordinate exactly") {
    const ModelSystem model = make_linear_toy({});
    const auto frame = model.frame("direct");
    Vector c(4);
    c << 0.4, -0.7, 0.5, -0.5;
    const PhasePoint z0{c, model.pairs};

    const PhasePoint at_cut = flow_to_cut(frame, 1.3, z0);
    REQUIRE(std::abs(at_cut.coords[1] - 1.3) < 1e-10);
    // cbar = y + p generates dq/ds = 1, so q advances by the gauge distance
    REQUIRE(std::abs(at_cut.coords[0] - 2.4) < 1e-10);
    REQUIRE(std::abs(at_cut.coords[2] - 0.5) < 1e-12);
    REQUIRE(std::abs(at_cut.coords[3] + 0.5) < 1e-12);

    // a point already on the cut stays put
    const PhasePoint fixed = flow_to_cut(frame, -0.7, z0);
    REQUIRE(std::abs(fixed.coords[0] - 0.4) < 1e-12);
    REQUIRE(std::abs(fixed.coords[1] + 0.7) < 1e-12);
}

TEST_CASE("orbit traces sample the gauge orbit and preserve the surface") {
    const ModelSystem model = make_linear_toy({});
    const auto frame = model.frame("direct");
    Vector c(4);
    c << 0.1, -0.3, 0.5, -0.5;
    const PhasePoint z0{c, model.pairs};

    const OrbitTrace trace = trace_orbit(frame, z0, 0.0, 1.0, 5);
    REQUIRE_FALSE(trace.truncated);
    REQUIRE(trace.points.size() == 5);
    for (std::size_t j = 0; j < trace.points.size(); ++j) {
        const double s = trace.s[j];
        REQUIRE(std::abs(trace.points[j].coords[0] - (0.1 + s)) < 1e-10);
        REQUIRE(trace.residuals[j] < 1e-10);
    }
    REQUIRE_THROWS_AS(trace_orbit(frame, z0, 0.0, 1.0, 0), ConfigError);
}

TEST_CASE("orbit traces truncate where the branch domain ends") {
    const ModelSystem model = make_kepler({1.0, 1.0, 0.5});
    const auto frame = model.frame("radial");
    // radicand 1 + 2/r - 4/r^2 vanishes at r = sqrt(5) - 1, so pushing r
    // below that radius must stop the trace.
    Vector c(4);
    c << 3.0, 1.0, -std::sqrt(1.0 + 2.0 / 3.0 - 4.0 / 9.0), -2.0;
    const PhasePoint z0{c, model.pairs};

    const OrbitTrace trace = trace_orbit(frame, z0, 0.0, -3.0, 7);
    REQUIRE(trace.truncated);
    REQUIRE_FALSE(trace.truncation_reason.empty());
    REQUIRE(trace.points.size() >= 3);
    REQUIRE(trace.points.size() < 7);
    for (const double r : trace.residuals) {
        REQUIRE(r < 1e-8);
    }
}

TEST_CASE("non-finite generator values surface as numeric errors") {
    const auto pairs = two_pairs();
    ScalarField bad;
    bad.label = "bad";
    bad.eval = [](const PhasePoint& z) {
        if (z.coords[0] > 1.5) return std::numeric_limits<double>::quiet_NaN();
        return z.coords[2];
    };
    const PhasePoint z0 = point(pairs, 1.0, 0.0, 0.0, 0.0);
    REQUIRE_THROWS_AS(hamiltonian_flow(bad, z0, 0.0, 5.0), NumericError);
}
