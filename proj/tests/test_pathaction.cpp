#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "levylab/pathaction.hpp"
#include "levylab/rng.hpp"

using namespace levylab;

namespace {

LevyModel asym_1d_model() {
    ModelConfig cfg;
    cfg.alpha = 0.5;
    cfg.d = 1;
    cfg.gamma = PolynomialCurve::monomial(1);
    cfg.outer_skew = 0.6;
    return LevyModel::build(cfg);
}

}  // namespace

TEST_CASE("action of a constant path is L(0)") {
    auto m = asym_1d_model();  // L(0) > 0 here, so the check is not vacuous
    const double l0 = legendre(m, VectorXd::Zero(1)).value;
    DiscretePath p;
    p.times = {0.0, 0.3, 1.0};
    p.points = {VectorXd::Constant(1, 0.2), VectorXd::Constant(1, 0.2),
                VectorXd::Constant(1, 0.2)};
    CHECK(action(m, p) == doctest::Approx(l0).epsilon(1e-9));
    CHECK(l0 > 0.0);
}

TEST_CASE("straight mean-velocity path has zero action") {
    auto m = default_model();
    const VectorXd mean = hamiltonian(m, VectorXd::Zero(2)).grad;
    auto p = DiscretePath::straight(VectorXd::Zero(2), mean, 5);
    CHECK(action(m, p) <= 1e-8);
}

TEST_CASE("two-segment action unrolls to the definition") {
    auto m = default_model();
    VectorXd x0 = VectorXd::Zero(2), x1(2), x2(2);
    x1 << 2.0, 1.0;
    x2 << 1.0, 2.0;
    DiscretePath p;
    p.times = {0.0, 0.5, 1.0};
    p.points = {x0, x1, x2};
    const double direct = 0.5 * legendre(m, 2.0 * (x1 - x0)).value +
                          0.5 * legendre(m, 2.0 * (x2 - x1)).value;
    CHECK(action(m, p) == doctest::Approx(direct).epsilon(1e-10));
}

TEST_CASE("infeasible segments give infinite action") {
    auto m = default_model();
    DiscretePath p;
    VectorXd up(2), down(2);
    up << 0.0, 1.0;
    down << 0.0, -0.5;
    p.times = {0.0, 0.5, 1.0};
    p.points = {VectorXd::Zero(2), up, down};  // second segment moves down
    CHECK(action(m, p) == std::numeric_limits<double>::infinity());
}

TEST_CASE("minimize_action") {
    auto m = default_model();
    const VectorXd x = VectorXd::Zero(2);

    SUBCASE("one segment is the straight line") {
        VectorXd y(2);
        y << 0.5, 1.0;
        auto res = minimize_action(m, x, y, 1);
        CHECK(res.value == doctest::Approx(rate_l(m, x, y)).epsilon(1e-10));
    }
    SUBCASE("N=16 agrees with rate_l and stays collinear") {
        VectorXd y(2);
        y << 1.0, 1.0;
        auto res = minimize_action(m, x, y, 16);
        CHECK(res.value == doctest::Approx(rate_l(m, x, y)).epsilon(1e-5));
        for (int i = 1; i < 16; ++i) {
            const VectorXd expect = x + (y - x) * res.path.times[i];
            CHECK((res.path.points[i] - expect).norm() <= 1e-4);
        }
    }
    SUBCASE("mean displacement costs nothing") {
        const VectorXd mean = hamiltonian(m, VectorXd::Zero(2)).grad;
        auto res = minimize_action(m, x, x + mean, 8);
        CHECK(res.value <= 1e-8);
    }
    SUBCASE("perturbed starts descend back to the straight line") {
        VectorXd y(2);
        y << 1.2, 1.4;
        auto init = DiscretePath::straight(x, y, 8);
        RngStream stream = make_stream(5, 0);
        for (int i = 1; i < 8; ++i) {
            init.points[i][0] += 0.2 * (stream.uniform() - 0.5);
            init.points[i][1] += 0.2 * stream.uniform();  // keep segments feasible
        }
        auto res = minimize_action(m, x, y, 8, init);
        CHECK(res.value <= rate_l(m, x, y) + 1e-5);
        CHECK(res.value >= rate_l(m, x, y) - 1e-5);
    }
}

TEST_CASE("Jensen consistency for random feasible endpoints") {
    auto m = default_model();
    RngStream stream = make_stream(31, 0);
    for (int trial = 0; trial < 10; ++trial) {
        VectorXd x(2), y(2);
        x << stream.uniform() - 0.5, stream.uniform() - 0.5;
        VectorXd v(2);
        v << 2.0 * (stream.uniform() - 0.5), 0.3 + 1.8 * stream.uniform();
        y = x + v;
        const double lr = rate_l(m, x, y);
        for (int n : {4, 16}) {
            const double diff = minimize_action(m, x, y, n).value - lr;
            CHECK(diff >= -1e-5);
            CHECK(diff <= 1e-3);
        }
    }
}

TEST_CASE("refinement monotonicity on nested grids") {
    auto m = default_model();
    VectorXd x = VectorXd::Zero(2), y(2);
    y << 0.8, 1.6;
    const double v4 = minimize_action(m, x, y, 4).value;
    const double v16 = minimize_action(m, x, y, 16).value;
    CHECK(v16 <= v4 + 1e-9);
}

TEST_CASE("action is consistent under reparametrization of the grid") {
    auto m = default_model();
    VectorXd a = VectorXd::Zero(2), b(2), c(2);
    b << 0.4, 0.9;
    c << 0.2, 1.5;
    DiscretePath uneven;
    uneven.times = {0.0, 0.7, 1.0};
    uneven.points = {a, b, c};
    const double via_action = action(m, uneven);
    const double direct = 0.7 * legendre(m, (b - a) / 0.7).value +
                          0.3 * legendre(m, (c - b) / 0.3).value;
    CHECK(via_action == doctest::Approx(direct).epsilon(1e-12));
}
