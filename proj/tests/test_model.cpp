#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/LU>
#include <cmath>

#include "levylab/model.hpp"
#include "levylab/rng.hpp"
#include "oracles.hpp"

using namespace levylab;

namespace {

ModelConfig base_config() {
    ModelConfig cfg;
    cfg.alpha = 0.5;
    cfg.big_c = 1.0;
    cfg.d = 2;
    cfg.cutoff_inner = 0.5;
    return cfg;
}

}  // namespace

TEST_CASE("build_model accepts the default curve and computes k_hyp") {
    auto m = LevyModel::build(base_config());
    CHECK(m.k_hyp() == 2);  // derivatives at 0 are (1,0) and (0,2)
    CHECK(m.dim() == 2);
    CHECK(m.levy_mass_check() > 0.0);
}

TEST_CASE("build_model rejects invalid parameters") {
    SUBCASE("alpha outside ]0,1[") {
        for (double a : {0.0, 1.0, 1.2, -0.1}) {
            auto cfg = base_config();
            cfg.alpha = a;
            CHECK_THROWS_AS((void)LevyModel::build(cfg), std::invalid_argument);
        }
    }
    SUBCASE("gamma(0) != 0") {
        auto cfg = base_config();
        cfg.d = 1;
        MatrixXd c(1, 1);
        c << 1.0;
        cfg.gamma = std::make_shared<PolynomialCurve>(c);
        // shift the curve through a callback so gamma(0) = 0.5
        cfg.gamma = std::make_shared<CallbackCurve>(1, [](double z, Eigen::Ref<VectorXd> out) {
            out[0] = z + 0.5;
        });
        CHECK_THROWS_WITH_AS((void)LevyModel::build(cfg),
                             doctest::Contains("gamma(0) must vanish"), std::invalid_argument);
    }
    SUBCASE("collinear derivatives violate Hypothesis H") {
        auto cfg = base_config();
        MatrixXd c(2, 1);
        c << 1.0, 1.0;  // gamma(z) = (z, z)
        cfg.gamma = std::make_shared<PolynomialCurve>(c);
        CHECK_THROWS_WITH_AS((void)LevyModel::build(cfg), doctest::Contains("Hypothesis H"),
                             std::invalid_argument);
    }
}

TEST_CASE("check_hypothesis_h finds the smallest spanning order") {
    SUBCASE("diagonal monomials") {
        auto curve = PolynomialCurve::monomial(3);
        auto rep = check_hypothesis_h(*curve, 7);
        CHECK(rep.satisfied);
        CHECK(rep.k_hyp == 3);
    }
    SUBCASE("first derivative vanishes") {
        MatrixXd c = MatrixXd::Zero(2, 3);
        c(0, 1) = 1.0;  // z^2
        c(1, 2) = 1.0;  // z^3
        PolynomialCurve curve(c);
        auto rep = check_hypothesis_h(curve, 6);
        CHECK(rep.satisfied);
        CHECK(rep.k_hyp == 3);
    }
    SUBCASE("callback curve uses finite differences") {
        CallbackCurve curve(2, [](double z, Eigen::Ref<VectorXd> out) {
            out[0] = std::sin(z);
            out[1] = z * z;
        });
        auto rep = check_hypothesis_h(curve, 6);
        CHECK(rep.satisfied);
        CHECK(rep.k_hyp == 2);
    }
    SUBCASE("failure reports the achieved rank") {
        MatrixXd c(2, 1);
        c << 1.0, 1.0;
        PolynomialCurve curve(c);
        auto rep = check_hypothesis_h(curve, 5);
        CHECK_FALSE(rep.satisfied);
        CHECK(rep.achieved_rank == 1);
        CHECK(rep.to_string().find("rank 1") != std::string::npos);
    }
}

TEST_CASE("k_hyp is invariant under invertible linear maps of gamma") {
    auto m = LevyModel::build(base_config());
    const int base_k = m.k_hyp();
    RngStream stream = make_stream(2024, 0);
    for (int trial = 0; trial < 3; ++trial) {
        MatrixXd map(2, 2);
        do {
            for (int i = 0; i < 4; ++i) map(i / 2, i % 2) = stream.normal();
        } while (std::abs(map.determinant()) < 0.1);
        // columns of the coefficient matrix transform by the same map
        MatrixXd c = MatrixXd::Zero(2, 2);
        c(0, 0) = 1.0;
        c(1, 1) = 1.0;
        auto cfg = base_config();
        cfg.gamma = std::make_shared<PolynomialCurve>(map * c);
        auto mapped = LevyModel::build(cfg);
        CHECK(mapped.k_hyp() == base_k);
    }
}

TEST_CASE("g has the exact power core and a continuous taper") {
    auto m = LevyModel::build(base_config());
    CHECK(m.g(0.25) == doctest::Approx(std::pow(0.25, -1.5)).epsilon(1e-14));
    CHECK(m.g(-0.25) == m.g(0.25));
    CHECK(m.g(1.0) == 0.0);
    CHECK(m.g(1.5) == 0.0);
    // continuity across the cutoff and near the support edge
    CHECK(m.g(0.5 - 1e-9) == doctest::Approx(m.g(0.5 + 1e-9)).epsilon(1e-6));
    CHECK(m.g(1.0 - 1e-6) < 1e-9);
    for (double z = -0.99; z < 1.0; z += 0.07) {
        if (z != 0.0) CHECK(m.g(z) >= 0.0);
    }
}

TEST_CASE("levy_integral matches the closed-form-plus-oracle reference") {
    auto m = LevyModel::build(base_config());

    SUBCASE("zero integrand") {
        CHECK(levy_integral(m, [](double) { return 0.0; }) == 0.0);
    }

    SUBCASE("(z^2 ^ 1) splits into an analytic core and a smooth tail") {
        // core: 2C int_0^delta z^{2-1-alpha} dz = 2C delta^{2-alpha}/(2-alpha)
        const double core = 2.0 * std::pow(0.5, 1.5) / 1.5;
        const double tail = oracles::levy_integral_dense(
            m, [](double z) { return std::min(z * z, 1.0); }, 0.5, 1.0, 400000);
        const double expected = core + tail;
        const double got = levy_integral(m, [](double z) { return std::min(z * z, 1.0); });
        CHECK(got == doctest::Approx(expected).epsilon(1e-8));
        CHECK(got == doctest::Approx(m.levy_mass_check()).epsilon(1e-12));
    }

    SUBCASE("exp(z)-1 against the dense graded-grid oracle") {
        auto f = [](double z) { return std::expm1(z); };
        const double got = levy_integral(m, f);
        const double ref = oracles::levy_integral_dense(m, f);
        CHECK(got > 0.0);
        CHECK(std::isfinite(got));
        CHECK(got == doctest::Approx(ref).epsilon(1e-8));
    }

    SUBCASE("odd integrands vanish for the symmetric density") {
        const double v = levy_integral(m, [](double z) { return z; });
        CHECK(std::abs(v) <= 1e-10);
    }

    SUBCASE("doubling the panel budget is self-consistent") {
        auto f = [](double z) { return std::expm1(z) + z * z; };
        auto cfg = base_config();
        const double v1 = levy_integral(LevyModel::build(cfg), f);
        cfg.quadrature.max_panels *= 2;
        const double v2 = levy_integral(LevyModel::build(cfg), f);
        CHECK(std::abs(v1 - v2) <= cfg.quadrature.rel_tol * std::abs(v1));
    }
}

TEST_CASE("restricted integrals agree with the closed-form core mass") {
    auto m = LevyModel::build(base_config());
    const double eps = 1e-3;
    auto one = [](double) { return 1.0; };
    auto tail = m.integrate(one, eps, 1.0);
    REQUIRE(tail.converged);
    const double tail_smooth = oracles::levy_integral_dense(m, one, 0.5, 1.0, 400000);
    const double expected = 2.0 * m.core_mass(eps, 0.5) + tail_smooth;
    CHECK(tail.value == doctest::Approx(expected).epsilon(1e-7));

    auto inner = m.integrate([](double z) { return std::abs(z); }, 0.0, eps);
    REQUIRE(inner.converged);
    // 2C int_0^eps z^{-alpha} dz = 2C eps^{1-alpha}/(1-alpha)
    CHECK(inner.value == doctest::Approx(2.0 * std::pow(eps, 0.5) / 0.5).epsilon(1e-8));
}

TEST_CASE("asymmetric outer region shifts the drift") {
    auto cfg = base_config();
    cfg.d = 1;
    cfg.gamma = PolynomialCurve::monomial(1);
    cfg.outer_skew = 0.5;
    auto m = LevyModel::build(cfg);
    const double mean = levy_integral(m, [](double z) { return z; });
    CHECK(mean > 1e-3);  // the positive side carries more outer mass
}

TEST_CASE("non-convergence carries the best estimate") {
    auto cfg = base_config();
    cfg.quadrature.max_panels = 4;  // no room to refine past the initial panels
    auto m = LevyModel::build(cfg);
    bool threw = false;
    try {
        levy_integral(m, [](double z) { return std::expm1(std::sin(40.0 * z)); });
    } catch (const QuadratureError& e) {
        threw = true;
        CHECK(std::isfinite(e.best_estimate));
        CHECK(e.error_bound > 0.0);
    }
    CHECK(threw);
}
