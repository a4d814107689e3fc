#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "gaugeframe/relational.hpp"
#include "gaugeframe/models/energy_constrained.hpp"
#include "gaugeframe/models/kepler.hpp"
#include "gaugeframe/models/linear_toy.hpp"
#include "gaugeframe/models/relativistic_particle.hpp"

using namespace gaugeframe;

TEST_CASE("model factories validate their parameters") {
    REQUIRE_THROWS_AS(make_relativistic_particle({0, 1.0}), ConfigError);
    REQUIRE_THROWS_AS(make_relativistic_particle({1, 0.0}), ConfigError);
    REQUIRE_THROWS_AS(make_relativistic_particle({2, -0.5}), ConfigError);
    REQUIRE_THROWS_AS(make_kepler({0.0, 1.0, 0.5}), ConfigError);
    REQUIRE_THROWS_AS(make_kepler({1.0, -1.0, 0.5}), ConfigError);
    REQUIRE_THROWS_AS(make_kepler({1.0, 1.0, -0.1}), ConfigError);

    EnergyConstrainedParams bad;
    bad.dim = 2;
    bad.reference = 5;
    REQUIRE_THROWS_AS(make_energy_constrained(bad), ConfigError);
    bad.dim = 0;
    REQUIRE_THROWS_AS(make_energy_constrained(bad), ConfigError);
}

TEST_CASE("models expose their frames by name") {
    const ModelSystem particle = make_relativistic_particle({1, 1.0});
    REQUIRE(particle.frame("temporal")->n_gauge() == 1);
    REQUIRE(particle.frame("spatial")->n_gauge() == 1);
    REQUIRE_THROWS_AS(particle.frame("nonexistent"), ConfigError);

    const ModelSystem kepler = make_kepler({1.0, 1.0, 0.5});
    REQUIRE(kepler.frame("angular")->split->x_label(0) == "phi");
    REQUIRE(kepler.frame("radial")->split->x_label(0) == "r");

    const ModelSystem toy = make_linear_toy({});
    REQUIRE(toy.frame("direct")->split->x_label(0) == "x");
    REQUIRE(toy.frame("swapped")->split->x_label(0) == "q");
}

TEST_CASE("make_point enforces the coordinate count") {
    const ModelSystem model = make_linear_toy({});
    Vector good(4);
    good << 0.0, 0.0, 0.0, 0.0;
    REQUIRE_NOTHROW(model.make_point(good));
    Vector bad(3);
    bad << 0.0, 0.0, 0.0;
    REQUIRE_THROWS_AS(model.make_point(bad), ConfigError);
}

TEST_CASE("Kepler orbit scales satisfy their defining identities") {
    const KeplerParams params{1.0, 1.0, 0.5};
    DeterministicRng rng(4711);
    for (int i = 0; i < 50; ++i) {
        const double l = rng.uniform(-3.0, -0.8);
        const double r = rng.uniform(1.5, 12.0);
        const double A = 2.0 * params.m * (params.energy + params.alpha / r);
        const double radicand = A - l * l / (r * r);
        if (radicand <= 1e-6) continue;

        const double r0 = kepler_closed::r0_scale(params, l);
        const double r1 = kepler_closed::r1_scale(params, l);
        REQUIRE(std::abs(r0 - l * l / (params.m * params.alpha)) < 1e-14);

        // 1/r1^2 - 1/r0^2 = 2 m E / l^2
        REQUIRE(std::abs(1.0 / (r1 * r1) - 1.0 / (r0 * r0) -
                         2.0 * params.m * params.energy / (l * l)) < 1e-12);

        // p^2 = l^2 (1 - F^2) / r1^2 on the energy shell
        const double F = kepler_closed::shape_parameter(params, r, l);
        REQUIRE(std::abs(radicand - l * l * (1.0 - F * F) / (r1 * r1)) < 1e-10);

        // b = r0^2 / (r0 + r1)
        REQUIRE(std::abs(kepler_closed::impact_parameter(params, l) -
                         r0 * r0 / (r0 + r1)) < 1e-13);
    }
}

TEST_CASE("Kepler observables reduce to identities at their own cut") {
    const KeplerParams params{1.0, 1.0, 0.5};
    DeterministicRng rng(1213);
    for (int i = 0; i < 25; ++i) {
        const double l = rng.uniform(-3.0, -1.0);
        const double r = rng.uniform(2.0, 9.0);
        const double phi = rng.uniform(0.5, 5.0);
        const double F = kepler_closed::shape_parameter(params, r, l);
        if (std::abs(F) > 0.999) continue;

        REQUIRE(std::abs(kepler_closed::shape(params, r, phi, l, phi) - r) < 1e-10);
        REQUIRE(std::abs(kepler_closed::phi_hat(params, r, phi, l, r) - phi) < 1e-10);

        // the image momentum of the angular -> radial map is l itself
        const double A = 2.0 * params.m * (params.energy + params.alpha / r);
        const double radicand = A - l * l / (r * r);
        if (radicand <= 1e-6) continue;
        Vector qp(2);
        qp << r, -std::sqrt(radicand);
        const Vector image = kepler_closed::rrft_image(params, qp, phi, r);
        REQUIRE(std::abs(image[1] - l) < 1e-9);
        REQUIRE(std::abs(image[0] - phi) < 1e-9);
    }
}

TEST_CASE("Kepler position ranges restrict the radius and angle slots") {
    const ModelSystem model = make_kepler({1.0, 1.0, 0.5});
    REQUIRE(model.pairs->position_ranges[0].first == 0.0);
    REQUIRE(std::isinf(model.pairs->position_ranges[0].second));
    REQUIRE(model.pairs->position_ranges[1].second == 2.0 * M_PI);
}

TEST_CASE("the default energy-constrained model moves on a circle") {
    const ModelSystem model = make_energy_constrained({});
    const auto frame = model.frame("reference");
    Vector qp(2);
    qp << 0.3, 0.6;
    REQUIRE(std::abs(reduced_hamiltonian(*frame, 0.0, qp) - 0.8) < 1e-12);

    const PhasePoint z = embed_at_cut(*frame, 0.2, qp);
    REQUIRE(std::abs(z.coords[2] + 0.8) < 1e-12);  // M0 = -sqrt(1 - p^2)
    REQUIRE(constraint_residual(*frame, z) < 1e-12);
}

TEST_CASE("the branch sign selects the sign of the solved momentum") {
    EnergyConstrainedParams params;
    params.branch = BranchSign::plus;
    const ModelSystem model = make_energy_constrained(params);
    Vector qp(2);
    qp << 0.3, 0.6;
    REQUIRE(std::abs(reduced_hamiltonian(*model.frame("reference"), 0.0, qp) + 0.8) <
            1e-12);
}

TEST_CASE("a custom potential feeds the Newton-solved frame") {
    EnergyConstrainedParams params;
    params.dim = 2;
    params.energy = 1.0;
    params.potential = [](const Vector& K) { return 0.5 * K.squaredNorm(); };
    params.potential_grad = [](const Vector& K) { return Vector(K); };
    const ModelSystem model = make_energy_constrained(params);
    const auto frame = model.frame("reference");

    // at K = (0.6, 0.8), p = 0.8: h = sqrt(2 (E - U) - p^2) = sqrt(0.36)
    Vector qp(2);
    qp << 0.8, 0.8;
    const PhasePoint z = embed_at_cut(*frame, 0.6, qp);
    REQUIRE(std::abs(z.coords[2] + 0.6) < 1e-10);
    REQUIRE(constraint_residual(*frame, z) < 1e-10);
}

TEST_CASE("spatial particle frames subtract the transverse momenta") {
    const ModelSystem model = make_relativistic_particle({3, 1.0});
    const auto spatial = model.frame("spatial");
    // true sector (K0, K2, K3, M0, M2, M3)
    Vector qp(6);
    qp << 0.1, -0.2, 0.4, -2.0, 0.3, -0.4;
    const double expected = std::sqrt(4.0 - 1.0 - 0.09 - 0.16);
    REQUIRE(std::abs(reduced_hamiltonian(*spatial, 0.0, qp) - expected) < 1e-12);
}
