#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "gaugeframe/relational.hpp"
#include "gaugeframe/models/kepler.hpp"
#include "gaugeframe/models/linear_toy.hpp"
#include "gaugeframe/models/relativistic_particle.hpp"

using namespace gaugeframe;

TEST_CASE("embedding a true-sector state lands on the cut and the surface") {
    const ModelSystem model = make_relativistic_particle({1, 1.0});
    const auto frame = model.frame("temporal");
    Vector qp(2);
    qp << 0.4, -1.0;
    const PhasePoint z = embed_at_cut(*frame, 1.7, qp);
    REQUIRE(z.coords[0] == 1.7);                       // K0 at the clock value
    REQUIRE(z.coords[1] == 0.4);                       // K1 carried over
    REQUIRE(std::abs(z.coords[2] + std::sqrt(2.0)) < 1e-12);  // M0 = -sqrt(m^2+p^2)
    REQUIRE(z.coords[3] == -1.0);
    REQUIRE(constraint_residual(*frame, z) < 1e-12);
}

TEST_CASE("particle position observable matches its closed form") {
    const ModelSystem model = make_relativistic_particle({1, 1.0});
    const auto frame = model.frame("temporal");
    Vector c(4);
    c << 0.0, 0.0, -std::sqrt(2.0), -1.0;  // x = 0, q = 0, on shell
    const PhasePoint z{c, model.pairs};

    const RelationalObservable obs{coordinate_field(model.pairs, 1, "K1"), frame};
    // transport to the cut K0 = 2: q moves at rate p/sqrt(m^2+p^2) = -1/sqrt(2)
    const double value = evaluate_observable(obs, 2.0, z);
    REQUIRE(std::abs(value - (-std::sqrt(2.0))) < 1e-10);

    const auto params = std::get<RelativisticParticleParams>(model.params);
    const double closed = particle_closed::observable_q(params, z, 2.0, 1);
    REQUIRE(std::abs(value - closed) < 1e-10);
}

TEST_CASE("toy position observable matches its closed form") {
    const ModelSystem model = make_linear_toy({});
    const auto frame = model.frame("direct");
    Vector c(4);
    c << 1.0, 3.0, 0.5, -0.5;
    const PhasePoint z{c, model.pairs};

    const RelationalObservable obs{coordinate_field(model.pairs, 0, "q"), frame};
    const double value = evaluate_observable(obs, 0.0, z);
    REQUIRE(std::abs(value - (-2.0)) < 1e-10);
    REQUIRE(std::abs(value - toy_closed::observable_q(1.0, 3.0, 0.0)) < 1e-10);
}

TEST_CASE("the reference coordinate's observable is the clock value") {
    const ModelSystem model = make_relativistic_particle({1, 1.0});
    const auto frame = model.frame("temporal");
    Vector c(4);
    c << -0.8, 0.3, -std::sqrt(2.0), -1.0;
    const PhasePoint z{c, model.pairs};

    const RelationalObservable obs{coordinate_field(model.pairs, 0, "K0"), frame};
    for (const double t : {-1.0, 0.0, 1.7}) {
        REQUIRE(std::abs(evaluate_observable(obs, t, z) - t) < 1e-12);
    }
}

TEST_CASE("observables are invariant along the constraint orbit") {
    const ModelSystem model = make_linear_toy({});
    const auto frame = model.frame("direct");
    Vector c(4);
    c << 0.4, -0.2, 0.5, -0.5;
    const PhasePoint z{c, model.pairs};
    Vector g(1);
    g << 1.0;
    const PhasePoint moved = flow(FlowGenerator{frame, g}, z, 0.7);

    const RelationalObservable obs{coordinate_field(model.pairs, 0, "q"), frame};
    const double a = evaluate_observable(obs, 0.9, z);
    const double b = evaluate_observable(obs, 0.9, moved);
    REQUIRE(std::abs(a - b) < 1e-10);
}

TEST_CASE("observable fields wrap the map with a labelled evaluator") {
    const ModelSystem model = make_linear_toy({});
    const auto frame = model.frame("direct");
    Vector c(4);
    c << 1.0, 3.0, 0.5, -0.5;
    const PhasePoint z{c, model.pairs};

    const RelationalObservable obs{coordinate_field(model.pairs, 0, "q"), frame};
    const ScalarField field = observable_field(obs, 0.0);
    REQUIRE(field.label == "O[q]");
    REQUIRE(std::abs(field.eval(z) - evaluate_observable(obs, 0.0, z)) < 1e-14);
}

TEST_CASE("reduced Hamiltonians take their closed-form values") {
    const ModelSystem particle = make_relativistic_particle({1, 1.0});
    Vector qp(2);
    qp << 0.0, -1.0;
    REQUIRE(std::abs(reduced_hamiltonian(*particle.frame("temporal"), 0.3, qp) -
                     std::sqrt(2.0)) < 1e-12);

    const ModelSystem toy = make_linear_toy({});
    Vector tqp(2);
    tqp << 0.2, 0.5;
    REQUIRE(std::abs(reduced_hamiltonian(*toy.frame("direct"), 0.0, tqp) - 0.5) <
            1e-14);

    const ModelSystem kepler = make_kepler({1.0, 1.0, 0.5});
    Vector kqp(2);
    kqp << 10.0, -0.3;  // true sector (r, p) of the angular frame
    REQUIRE(std::abs(reduced_hamiltonian(*kepler.frame("angular"), 1.0, kqp) -
                     std::sqrt(111.0)) < 1e-12);
}

TEST_CASE("reduced dynamics of the toy model advance q linearly") {
    const ModelSystem model = make_linear_toy({});
    const auto frame = model.frame("direct");
    Vector qp0(2);
    qp0 << 0.2, 0.5;

    const Trajectory traj = evolve_hamiltonian(*frame, qp0, 0.0, 1.0, 6);
    REQUIRE(traj.times.size() == 6);
    REQUIRE(traj.states.size() == 6);
    REQUIRE(traj.labels.size() == 2);
    for (std::size_t j = 0; j < traj.times.size(); ++j) {
        REQUIRE(std::abs(traj.states[j][0] - (0.2 + traj.times[j])) < 1e-9);
        REQUIRE(std::abs(traj.states[j][1] - 0.5) < 1e-12);
    }

    const Vector geometric = evolve_geometric(frame, qp0, 0.0, 1.0);
    REQUIRE(std::abs(geometric[0] - 1.2) < 1e-9);
    REQUIRE(std::abs(geometric[1] - 0.5) < 1e-12);

    REQUIRE_THROWS_AS(evolve_hamiltonian(*frame, qp0, 0.0, 1.0, 1), ConfigError);
}

TEST_CASE("the spatial-frame Hamiltonian rejects sub-threshold energies") {
    const ModelSystem model = make_relativistic_particle({1, 1.0});
    const auto spatial = model.frame("spatial");
    Vector qp(2);
    qp << 0.3, -0.5;  // |M0| < m: no real solved momentum exists
    REQUIRE_THROWS_AS(reduced_hamiltonian(*spatial, 0.0, qp), NumericError);
}

TEST_CASE("Dirac brackets through a frame are clock-time independent") {
    const ModelSystem model = make_linear_toy({});
    const auto frame = model.frame("direct");
    Vector c(4);
    c << 0.4, -0.2, 0.5, -0.5;
    const PhasePoint z{c, model.pairs};

    const ScalarField f = coordinate_field(model.pairs, 0, "q");
    const ScalarField g = coordinate_field(model.pairs, 2, "p");
    const double early = dirac_bracket(f, g, *frame, 0.3, z);
    const double late = dirac_bracket(f, g, *frame, 1.7, z);
    REQUIRE(std::abs(early - (-1.0)) < 1e-12);
    REQUIRE(early == late);
}
