#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "gaugeframe/phase_core.hpp"

using namespace gaugeframe;

namespace {

std::shared_ptr<const PairStructure> two_pairs(double weight = 1.0) {
    return PairStructure::make({"q", "x"}, {"p", "y"}, weight);
}

PhasePoint point(const std::shared_ptr<const PairStructure>& pairs, double q,
                 double x, double p, double y) {
    Vector c(4);
    c << q, x, p, y;
    return PhasePoint{c, pairs};
}

}  // namespace

TEST_CASE("pair structure exposes slots in position-then-momentum order") {
    auto pairs = two_pairs();
    REQUIRE(pairs->n_pairs() == 2);
    REQUIRE(pairs->dim() == 4);
    REQUIRE(pairs->position_index(0) == 0);
    REQUIRE(pairs->position_index(1) == 1);
    REQUIRE(pairs->momentum_index(0) == 2);
    REQUIRE(pairs->momentum_index(1) == 3);
    REQUIRE(pairs->position_labels[1] == "x");
    REQUIRE(pairs->momentum_labels[0] == "p");
    REQUIRE(pairs->weights[0] == 1.0);
}

TEST_CASE("phase point validates its coordinate length") {
    auto pairs = two_pairs();
    Vector short_vec(3);
    short_vec << 1.0, 2.0, 3.0;
    REQUIRE_THROWS_AS(PhasePoint(short_vec, pairs), ConfigError);
    const PhasePoint z = point(pairs, 1.0, 2.0, 3.0, 4.0);
    REQUIRE(z.position(1) == 2.0);
    REQUIRE(z.momentum(0) == 3.0);
}

TEST_CASE("coordinate split separates true and gauge sectors") {
    auto pairs = two_pairs();
    CoordinateSplit split(pairs, {1});  // pair (x, y) is the reference
    REQUIRE(split.n_true() == 1);
    REQUIRE(split.n_gauge() == 1);
    REQUIRE(split.q_index(0) == 0);
    REQUIRE(split.p_index(0) == 2);
    REQUIRE(split.x_index(0) == 1);
    REQUIRE(split.y_index(0) == 3);
    REQUIRE(split.q_label(0) == "q");
    REQUIRE(split.y_label(0) == "y");

    const PhasePoint z = point(pairs, 1.5, -0.5, 2.5, -2.5);
    const Vector qp = split.true_values(z);
    REQUIRE(qp.size() == 2);
    REQUIRE(qp[0] == 1.5);
    REQUIRE(qp[1] == 2.5);

    PhasePoint w = z;
    Vector replace(2);
    replace << 7.0, 8.0;
    split.set_true_values(w, replace);
    REQUIRE(w.coords[0] == 7.0);
    REQUIRE(w.coords[2] == 8.0);
    REQUIRE(w.coords[1] == -0.5);  // gauge sector untouched

    REQUIRE_THROWS_AS(CoordinateSplit(pairs, {5}), ConfigError);
    REQUIRE_THROWS_AS(CoordinateSplit(pairs, {0, 0}), ConfigError);
}

TEST_CASE("gradient falls back to finite differences and matches analytics") {
    auto pairs = two_pairs();
    const PhasePoint z = point(pairs, 0.3, -0.2, 0.7, 1.1);

    ScalarField cubic;
    cubic.label = "cubic";
    cubic.eval = [](const PhasePoint& w) {
        return w.coords[0] * w.coords[0] * w.coords[0] + 2.0 * w.coords[2];
    };
    const Vector g = gradient(cubic, z);
    REQUIRE(std::abs(g[0] - 3.0 * 0.3 * 0.3) < 1e-9);
    REQUIRE(std::abs(g[1]) < 1e-10);
    REQUIRE(std::abs(g[2] - 2.0) < 1e-10);

    const Vector exact = gradient(coordinate_field(pairs, 2, "p"), z);
    REQUIRE(exact[2] == 1.0);
    REQUIRE(exact.lpNorm<1>() == 1.0);
}

TEST_CASE("poisson bracket of a momentum with its position is plus one") {
    auto pairs = two_pairs();
    const PhasePoint z = point(pairs, 0.4, 1.0, -0.9, 0.2);
    const ScalarField q = coordinate_field(pairs, 0, "q");
    const ScalarField p = coordinate_field(pairs, 2, "p");
    const ScalarField x = coordinate_field(pairs, 1, "x");
    const ScalarField y = coordinate_field(pairs, 3, "y");

    REQUIRE(poisson_bracket(p, q, z) == 1.0);
    REQUIRE(poisson_bracket(q, p, z) == -1.0);
    REQUIRE(poisson_bracket(y, x, z) == 1.0);
    REQUIRE(poisson_bracket(p, x, z) == 0.0);
    REQUIRE(poisson_bracket(q, x, z) == 0.0);
    REQUIRE(poisson_bracket(p, y, z) == 0.0);
}

TEST_CASE("bracket weight rescales conjugate pairs") {
    const double dz = 0.1;
    auto pairs = two_pairs(1.0 / dz);  // lattice-style weight 1/dz
    const PhasePoint z = point(pairs, 0.0, 0.0, 0.0, 0.0);
    const ScalarField q = coordinate_field(pairs, 0, "q");
    const ScalarField p = coordinate_field(pairs, 2, "p");
    REQUIRE(std::abs(poisson_bracket(p, q, z) - 10.0) < 1e-12);
}

TEST_CASE("poisson bracket satisfies the Jacobi identity") {
    auto pairs = two_pairs();
    const PhasePoint z = point(pairs, 0.7, -0.3, 0.45, 0.8);

    auto field = [&](const char* label, auto fn) {
        ScalarField f;
        f.label = label;
        f.eval = fn;
        return f;
    };
    const ScalarField f =
        field("f", [](const PhasePoint& w) { return w.coords[0] * w.coords[2]; });
    const ScalarField g = field("g", [](const PhasePoint& w) {
        return std::sin(w.coords[1]) + w.coords[2] * w.coords[3];
    });
    const ScalarField h = field("h", [](const PhasePoint& w) {
        return w.coords[0] * w.coords[0] + std::cos(w.coords[3]);
    });

    auto bracket_field = [&](const ScalarField& a, const ScalarField& b) {
        ScalarField out;
        out.label = "{" + a.label + "," + b.label + "}";
        out.eval = [&a, &b](const PhasePoint& w) { return poisson_bracket(a, b, w); };
        return out;
    };
    const double jacobi = poisson_bracket(f, bracket_field(g, h), z) +
                          poisson_bracket(g, bracket_field(h, f), z) +
                          poisson_bracket(h, bracket_field(f, g), z);
    REQUIRE(std::abs(jacobi) < 1e-6);
}

TEST_CASE("dirac bracket corrects the kinematical bracket on the cut") {
    auto pairs = two_pairs();
    // Solved constraint cbar = y + p with gauge condition G = x - k.
    ScalarField cbar;
    cbar.label = "cbar";
    cbar.eval = [](const PhasePoint& w) { return w.coords[3] + w.coords[2]; };
    ScalarField gauge;
    gauge.label = "G";
    gauge.eval = [](const PhasePoint& w) { return w.coords[1] - 0.3; };

    const PhasePoint z = point(pairs, 0.2, 0.3, 0.5, -0.5);
    const ScalarField q = coordinate_field(pairs, 0, "q");
    const ScalarField p = coordinate_field(pairs, 2, "p");
    const ScalarField y = coordinate_field(pairs, 3, "y");

    // {q, p}* keeps its kinematical value; {q, y}* picks up the correction
    // {q, cbar}{G, y} = (-1)(-1) = +1.
    REQUIRE(std::abs(dirac_bracket(q, p, {cbar}, {gauge}, z) - (-1.0)) < 1e-9);
    REQUIRE(std::abs(dirac_bracket(q, y, {cbar}, {gauge}, z) - 1.0) < 1e-9);
    // The constraint is a Dirac-bracket Casimir.
    REQUIRE(std::abs(dirac_bracket(q, cbar, {cbar}, {gauge}, z)) < 1e-9);
    REQUIRE(std::abs(dirac_bracket(p, cbar, {cbar}, {gauge}, z)) < 1e-9);
}
