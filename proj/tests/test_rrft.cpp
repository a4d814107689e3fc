#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "gaugeframe/rrft.hpp"
#include "gaugeframe/models/kepler.hpp"
#include "gaugeframe/models/linear_toy.hpp"
#include "gaugeframe/models/relativistic_particle.hpp"

using namespace gaugeframe;

TEST_CASE("frame pairs classify shared and swapped pairs") {
    const ModelSystem model = make_relativistic_particle({2, 1.0});
    const FramePair pair(model.frame("temporal"), model.frame("spatial"));
    REQUIRE(pair.swapped_a == std::vector<std::size_t>{1});  // K1 leaves the true sector
    REQUIRE(pair.swapped_b == std::vector<std::size_t>{0});  // K0 joins it
    REQUIRE(pair.shared_true == std::vector<std::size_t>{2});
    REQUIRE(pair.shared_gauge.empty());

    const ModelSystem toy = make_linear_toy({});
    const ModelSystem other = make_linear_toy({});
    REQUIRE_THROWS_AS(FramePair(toy.frame("direct"), other.frame("swapped")),
                      ConfigError);  // distinct pair-structure instances
}

TEST_CASE("particle frame transformation matches its closed form") {
    const ModelSystem model = make_relativistic_particle({1, 1.0});
    const FrameMap map{FramePair(model.frame("temporal"), model.frame("spatial")),
                       0.0, 0.0};

    Vector qp(2);
    qp << 0.0, -1.0;
    const Vector image = apply_rrft(map, qp);
    REQUIRE(std::abs(image[0]) < 1e-10);                    // K^0 image
    REQUIRE(std::abs(image[1] + std::sqrt(2.0)) < 1e-10);   // M_0 = -sqrt(2)

    Vector shifted(2);
    shifted << 1.0, -1.0;
    const Vector image2 = apply_rrft(map, shifted);
    REQUIRE(std::abs(image2[0] - std::sqrt(2.0)) < 1e-10);

    const auto params = std::get<RelativisticParticleParams>(model.params);
    const Vector closed = particle_closed::rrft_image(params, shifted, 0.0, 0.0);
    REQUIRE((image2 - closed).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("transforming forward and back returns the original state") {
    const ModelSystem model = make_relativistic_particle({1, 1.0});
    const FrameMap map{FramePair(model.frame("temporal"), model.frame("spatial")),
                       0.7, -0.2};
    const FrameMap inverse = invert_rrft(map);

    Vector qp(2);
    qp << 0.4, -1.3;
    const Vector there = apply_rrft(map, qp);
    const Vector back = apply_rrft(inverse, there);
    REQUIRE((back - qp).lpNorm<Eigen::Infinity>() < 1e-9);
}

TEST_CASE("toy frame transformation is the reflection through the cuts") {
    const ModelSystem model = make_linear_toy({});
    const FrameMap map{FramePair(model.frame("direct"), model.frame("swapped")),
                       1.0, 2.0};
    Vector qp(2);
    qp << 0.5, 0.25;
    const Vector image = apply_rrft(map, qp);
    REQUIRE(std::abs(image[0] - 2.5) < 1e-10);   // k + khat - q
    REQUIRE(std::abs(image[1] + 0.25) < 1e-10);  // -p
    const Vector closed = toy_closed::rrft_image(qp, 1.0, 2.0);
    REQUIRE((image - closed).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("pullback pairs both reduced Hamiltonians across the map") {
    const ModelSystem model = make_relativistic_particle({1, 1.0});
    const FrameMap map{FramePair(model.frame("temporal"), model.frame("spatial")),
                       0.0, 0.0};
    Vector qp(2);
    qp << 0.0, -1.0;
    const PullbackResult pb = pullback_hamiltonian(map, qp, 0.3);
    REQUIRE(std::abs(pb.h_a - std::sqrt(2.0)) < 1e-10);
    REQUIRE(std::abs(pb.h_b_pullback - 1.0) < 1e-9);  // -khatdot p_1
    const auto params = std::get<RelativisticParticleParams>(model.params);
    REQUIRE(std::abs(pb.h_b_pullback - particle_closed::pullback(1.0, qp, 1)) < 1e-9);
    REQUIRE(pb.image.size() == 2);
}

TEST_CASE("symplectic checks accept canonical maps and flag scaling maps") {
    const ModelSystem model = make_linear_toy({});
    const FrameMap map{FramePair(model.frame("direct"), model.frame("swapped")),
                       0.5, 1.5};
    Vector qp(2);
    qp << 0.3, 0.8;
    REQUIRE(check_symplectic(map, qp) < 1e-8);

    const auto stretch = [](const Vector& v) {
        Vector out = v;
        out[0] *= 2.0;
        return out;
    };
    REQUIRE(check_symplectic(stretch, qp) > 0.5);
}

TEST_CASE("index transformations rescale only the swapped slots") {
    const ModelSystem model = make_linear_toy({});
    const FramePair pair(model.frame("direct"), model.frame("swapped"), 2.0);
    Vector qp(2);
    qp << 1.0, 3.0;
    const Vector image = apply_irft(pair, qp);
    REQUIRE(image[0] == 0.5);  // position divided by the scale
    REQUIRE(image[1] == 6.0);  // momentum multiplied by it

    Vector wrong(3);
    wrong << 1.0, 2.0, 3.0;
    REQUIRE_THROWS_AS(apply_irft(pair, wrong), ConfigError);
}

TEST_CASE("index transformations enforce the target coordinate ranges") {
    const ModelSystem model = make_kepler({1.0, 1.0, 0.5});
    // angular true sector (r, p) maps onto radial true sector (phi, l), and
    // phi only admits values inside (0, 2 pi)
    const FramePair pair(model.frame("angular"), model.frame("radial"));
    Vector fine(2);
    fine << 3.0, -0.5;
    REQUIRE_NOTHROW(apply_irft(pair, fine));
    Vector outside(2);
    outside << 6.5, -0.5;
    REQUIRE_THROWS_AS(apply_irft(pair, outside), RangeViolation);
}

TEST_CASE("transformations reject states off the target branch") {
    const ModelSystem model = make_relativistic_particle({1, 1.0});
    const FrameMap map{FramePair(model.frame("temporal"), model.frame("spatial")),
                       0.0, 0.0};
    Vector qp(2);
    qp << 0.5, 1.0;  // p_1 > 0 cannot sit on the spatial frame's branch
    REQUIRE_THROWS_AS(apply_rrft(map, qp), SectorMismatch);
}
